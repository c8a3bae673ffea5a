#pragma once

// Between-subjects experiment runner over simulated agent populations.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "inclab/agents.hpp"
#include "inclab/calibration.hpp"
#include "inclab/error.hpp"
#include "inclab/random.hpp"
#include "inclab/records.hpp"
#include "inclab/task_bank.hpp"

namespace inclab {

struct PopulationEntry {
  std::string name;
  double weight = 1.0;
  AgentProfile profile;
};

/// Mixed population: mostly rational deciders, a noisy group, and a group
/// that games collectible bonuses on high-confidence advice.
inline std::vector<PopulationEntry> default_population() {
  AgentProfile rational;
  rational.name = "rational";

  AgentProfile noisy;
  noisy.name = "noisy";
  noisy.rationality_temperature = 0.004;
  noisy.skill_scale = 0.95;

  AgentProfile gamer;
  gamer.name = "gamer";
  gamer.rationality_temperature = 0.002;
  gamer.gaming_propensity = 0.7;

  return {{"rational", 0.45, rational}, {"noisy", 0.35, noisy}, {"gamer", 0.20, gamer}};
}

struct BankSource {
  std::optional<std::string> manifest;  // load instead of generating
  std::uint64_t seed = 7;
  BankScheme scheme;
};

struct ExperimentConfig {
  std::uint64_t seed = 20250101;
  int n_per_arm = 60;
  double time_budget_s = 300.0;
  double base_payment = 1.00;
  unsigned threads = 0;  // 0 = hardware concurrency
  CalibrationInputs calibration;
  std::vector<TreatmentSpec> treatments;
  BankSource bank;
  std::vector<PopulationEntry> population = default_population();
};

/// Baseline, static and dynamic schedules calibrated from `in`.
inline std::vector<TreatmentSpec> default_treatments(const CalibrationInputs& in = {}) {
  return {calibrate(TreatmentKind::baseline, in), calibrate(TreatmentKind::static_bonus, in),
          calibrate(TreatmentKind::dynamic_bonus, in)};
}

inline void validate(const ExperimentConfig& c) {
  if (c.n_per_arm <= 0) throw ConfigError("n_per_arm must be > 0");
  if (c.treatments.empty()) throw ConfigError("at least one treatment is required");
  if (!(c.time_budget_s > 0.0)) throw ConfigError("time_budget_s must be > 0");
  if (c.population.empty()) throw ConfigError("agent population is empty");
  double total = 0.0;
  for (const auto& e : c.population) {
    if (!(e.weight >= 0.0)) throw ConfigError("population weights must be >= 0");
    validate(e.profile);
    total += e.weight;
  }
  if (!(total > 0.0)) throw ConfigError("population weights sum to zero");
  for (const auto& t : c.treatments) validate(t);
}

struct Dataset {
  std::vector<DecisionRecord> records;
  std::vector<ParticipantSummary> summaries;
  std::vector<TaskInstance> bank;
};

inline std::vector<TaskInstance> resolve_bank(const BankSource& src) {
  if (src.manifest) return load_manifest(*src.manifest);
  return build_bank(src.seed, src.scheme);
}

inline std::string participant_id(TreatmentKind kind, int index) {
  std::string num = std::to_string(index + 1);
  if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
  return std::string(to_string(kind)) + "-" + num;
}

inline const PopulationEntry& draw_profile(std::span<const PopulationEntry> population, Rng& rng) {
  double total = 0.0;
  for (const auto& e : population) total += e.weight;
  double u = rng.uniform() * total;
  for (const auto& e : population) {
    if (u < e.weight) return e;
    u -= e.weight;
  }
  return population.back();
}

/// Simulate every arm. Each participant owns the stream
/// derive_seed(seed, arm, index), so output does not depend on threading.
inline Dataset run_experiment(const ExperimentConfig& config) {
  validate(config);
  Dataset data;
  data.bank = resolve_bank(config.bank);
  if (data.bank.empty()) throw ConfigError("task bank is empty");

  const auto arms = config.treatments.size();
  const auto per_arm = static_cast<std::size_t>(config.n_per_arm);
  const std::size_t total = arms * per_arm;
  std::vector<ParticipantRecord> results(total);

  auto simulate_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t slot = begin; slot < end; ++slot) {
      const std::size_t arm = slot / per_arm;
      const auto index = static_cast<int>(slot % per_arm);
      const auto& spec = config.treatments[arm];
      Rng rng(derive_seed(config.seed, arm, static_cast<std::uint64_t>(index)));
      const auto& entry = draw_profile(config.population, rng);
      std::vector<TaskInstance> order = data.bank;
      rng.shuffle(std::span(order));
      results[slot] = simulate_participant(entry.profile, spec, order, config.time_budget_s, rng,
                                           participant_id(spec.kind, index), config.bank.scheme.n_classes);
    }
  };

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    simulate_range(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(total, b + chunk);
      if (b < e) pool.emplace_back(simulate_range, b, e);
    }
  }

  for (std::size_t slot = 0; slot < total; ++slot) {
    const auto& pr = results[slot];
    const auto& spec = config.treatments[slot / per_arm];
    data.records.insert(data.records.end(), pr.decisions.begin(), pr.decisions.end());
    auto metrics = compute_metrics(pr.decisions);
    ParticipantSummary s;
    if (!metrics.summaries.empty()) {
      s = metrics.summaries.front();
    } else {
      s.participant_id = participant_id(spec.kind, static_cast<int>(slot % per_arm));
      s.treatment = spec.kind;
    }
    s.cognitive_load = pr.cognitive_load;
    data.summaries.push_back(std::move(s));
  }
  return data;
}

inline void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "records.jsonl", std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir / "records.jsonl").string());
    write_jsonl<DecisionRecord>(os, data.records);
  }
  {
    std::ofstream os(dir / "summaries.jsonl", std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir / "summaries.jsonl").string());
    write_jsonl<ParticipantSummary>(os, data.summaries);
  }
  if (!data.bank.empty()) save_manifest((dir / "bank.jsonl").string(), data.bank);
}

}  // namespace inclab

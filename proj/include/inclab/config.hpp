#pragma once

// INI study configuration:
//
//   [experiment]        seed, n_per_arm, time_budget_s, base_payment, threads
//   [calibration]       inputs for calibrate(); used when no [treatment.*] exists
//   [treatment.<name>]  kind, gamma, theta_high_conf, theta_low_conf
//   [agents.<name>]     weight plus AgentProfile overrides
//   [bank]              seed, manifest, generation scheme
//   [server]            host, port, seed, capacity, static_dir, event_log, ...

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "inclab/error.hpp"
#include "inclab/experiment.hpp"

namespace inclab {

struct ServerSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t seed = 1;
  int capacity = 180;  // total sessions; 0 = unlimited
  int training_count = 2;
  int comprehension_attempts = 2;
  double tlx_min = 1.0;
  double tlx_max = 7.0;
  std::optional<std::string> static_dir;
  std::optional<std::string> event_log;
  std::optional<std::string> training_manifest;  // default: drawn from the generated pool
};

struct StudyConfig {
  ExperimentConfig experiment;
  ServerSettings server;
};

namespace detail {

using Section = boost::property_tree::ptree;

class SectionReader {
 public:
  SectionReader(const Section& s, std::string name) : s_(s), name_(std::move(name)) {}

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto v = s_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
    if (!v) return;
    out = parse<T>(key, *v);
  }

  template <typename T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto v = s_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
    if (!v || v->empty()) return;
    out = parse<T>(key, *v);
  }

  void finish() const {
    for (const auto& [k, _] : s_)
      if (!seen_.count(k)) throw ConfigError("[" + name_ + "] unknown key '" + k + "'");
  }

 private:
  template <typename T>
  T parse(const char* key, const std::string& text) const {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else {
      std::istringstream is(text);
      T v{};
      is >> v;
      if (!is || !(is >> std::ws).eof()) throw ConfigError("[" + name_ + "] bad value for " + key + ": '" + text + "'");
      return v;
    }
  }

  const Section& s_;
  std::string name_;
  std::set<std::string> seen_;
};

inline BeliefSource belief_source_from_string(const std::string& s) {
  if (s == "bin_midpoint") return BeliefSource::bin_midpoint;
  if (s == "calibrated_confidence") return BeliefSource::calibrated_confidence;
  throw ConfigError("unknown belief_source '" + s + "'");
}

inline std::string_view to_string(BeliefSource b) {
  return b == BeliefSource::bin_midpoint ? "bin_midpoint" : "calibrated_confidence";
}

inline AgentProfile read_profile(SectionReader& r, AgentProfile p) {
  r.read("rationality_temperature", p.rationality_temperature);
  r.read("perceived_lambda", p.perceived_lambda);
  r.read("solve_time_s", p.solve_time_s);
  r.read("accept_time_s", p.accept_time_s);
  r.read("gaming_propensity", p.gaming_propensity);
  r.read("skill_scale", p.skill_scale);
  r.read("load_sensitivity", p.load_sensitivity);
  r.read("load_base", p.load_base);
  r.read("load_noise_sd", p.load_noise_sd);
  r.read("load_time_slope", p.load_time_slope);
  std::string belief(to_string(p.belief_source));
  r.read("belief_source", belief);
  p.belief_source = belief_source_from_string(belief);
  return p;
}

}  // namespace detail

inline StudyConfig parse_config(std::istream& is) {
  using detail::SectionReader;
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  StudyConfig cfg;
  auto& ex = cfg.experiment;
  std::vector<std::pair<std::string, TreatmentSpec>> treatments;
  std::vector<PopulationEntry> population;

  // defaults for [agents.<name>] come from the default profile of that name
  std::map<std::string, AgentProfile> known;
  for (const auto& e : default_population()) known[e.name] = e.profile;

  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) throw ConfigError("config: key '" + name + "' outside a section");
    SectionReader r(section, name);
    if (name == "experiment") {
      r.read("seed", ex.seed);
      r.read("n_per_arm", ex.n_per_arm);
      r.read("time_budget_s", ex.time_budget_s);
      r.read("base_payment", ex.base_payment);
      r.read("threads", ex.threads);
    } else if (name == "calibration") {
      auto& c = ex.calibration;
      r.read("max_var_payment", c.max_var_payment);
      r.read("n_instances", c.n_instances);
      r.read("t_max", c.t_max);
      r.read("t_per_instance", c.t_per_instance);
      r.read("p_h_avg", c.p_h_avg);
      r.read("p_ai_avg", c.p_ai_avg);
      r.read("low_conf_fraction", c.low_conf_fraction);
      r.read("dynamic_gamma", c.dynamic_gamma);
    } else if (name == "bank") {
      auto& b = ex.bank;
      r.read("seed", b.seed);
      r.read("manifest", b.manifest);
      r.read("pool_size", b.scheme.pool_size);
      r.read("validation_size", b.scheme.validation_size);
      r.read("n_classes", b.scheme.n_classes);
      r.read("distortion_temperature", b.scheme.distortion_temperature);
      r.read("quota_s1", b.scheme.scenario_quota[0]);
      r.read("quota_s2", b.scheme.scenario_quota[1]);
      r.read("quota_s3", b.scheme.scenario_quota[2]);
      r.read("low_confidence_count", b.scheme.low_confidence_count);
      r.read("max_attempts", b.scheme.max_attempts);
    } else if (name == "server") {
      auto& s = cfg.server;
      r.read("host", s.host);
      r.read("port", s.port);
      r.read("seed", s.seed);
      r.read("capacity", s.capacity);
      r.read("training_count", s.training_count);
      r.read("comprehension_attempts", s.comprehension_attempts);
      r.read("tlx_min", s.tlx_min);
      r.read("tlx_max", s.tlx_max);
      r.read("static_dir", s.static_dir);
      r.read("event_log", s.event_log);
      r.read("training_manifest", s.training_manifest);
    } else if (name.starts_with("treatment.")) {
      TreatmentSpec t;
      std::string kind;
      r.read("kind", kind);
      if (kind.empty()) throw ConfigError("[" + name + "] kind is required");
      try {
        t.kind = treatment_kind_from_string(kind);
      } catch (const DomainError& e) {
        throw ConfigError("[" + name + "] " + e.what());
      }
      r.read("gamma", t.gamma);
      r.read("theta_high_conf", t.theta_high_conf);
      r.read("theta_low_conf", t.theta_low_conf);
      treatments.emplace_back(name.substr(10), t);
    } else if (name.starts_with("agents.")) {
      PopulationEntry e;
      e.name = name.substr(7);
      r.read("weight", e.weight);
      auto it = known.find(e.name);
      AgentProfile base = it != known.end() ? it->second : AgentProfile{};
      base.name = e.name;
      e.profile = detail::read_profile(r, base);
      population.push_back(std::move(e));
    } else {
      throw ConfigError("config: unknown section [" + name + "]");
    }
    r.finish();
  }

  if (cfg.server.training_count < 0) throw ConfigError("[server] training_count must be >= 0");
  if (cfg.server.comprehension_attempts < 1) throw ConfigError("[server] comprehension_attempts must be >= 1");
  if (!(cfg.server.tlx_min < cfg.server.tlx_max)) throw ConfigError("[server] tlx_min must be < tlx_max");

  if (treatments.empty()) {
    try {
      ex.treatments = default_treatments(ex.calibration);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("calibration failed: ") + e.what());
    }
  } else {
    std::set<TreatmentKind> kinds;
    for (auto& [name, t] : treatments) {
      if (!kinds.insert(t.kind).second) throw ConfigError("[treatment." + name + "] duplicates treatment kind " + std::string(to_string(t.kind)));
      ex.treatments.push_back(t);
    }
  }
  if (!population.empty()) ex.population = std::move(population);
  try {
    validate(ex);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline StudyConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  return parse_config(is);
}

namespace detail {

inline std::string num(double v) {
  // shortest representation that round-trips
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

}  // namespace detail

inline std::string format_treatment_section(const std::string& name, const TreatmentSpec& t) {
  std::ostringstream os;
  os << "[treatment." << name << "]\n";
  os << "kind = " << to_string(t.kind) << "\n";
  os << "gamma = " << detail::num(t.gamma) << "\n";
  os << "theta_high_conf = " << detail::num(t.theta_high_conf) << "\n";
  os << "theta_low_conf = " << detail::num(t.theta_low_conf) << "\n";
  return os.str();
}

inline std::string format_config(const StudyConfig& cfg) {
  using detail::num;
  const auto& ex = cfg.experiment;
  std::ostringstream os;
  os << "[experiment]\n"
     << "seed = " << ex.seed << "\n"
     << "n_per_arm = " << ex.n_per_arm << "\n"
     << "time_budget_s = " << num(ex.time_budget_s) << "\n"
     << "base_payment = " << num(ex.base_payment) << "\n"
     << "threads = " << ex.threads << "\n\n";
  const auto& c = ex.calibration;
  os << "[calibration]\n"
     << "max_var_payment = " << num(c.max_var_payment) << "\n"
     << "n_instances = " << c.n_instances << "\n"
     << "t_max = " << num(c.t_max) << "\n"
     << "t_per_instance = " << num(c.t_per_instance) << "\n"
     << "p_h_avg = " << num(c.p_h_avg) << "\n"
     << "p_ai_avg = " << num(c.p_ai_avg) << "\n"
     << "low_conf_fraction = " << num(c.low_conf_fraction) << "\n";
  if (c.dynamic_gamma) os << "dynamic_gamma = " << num(*c.dynamic_gamma) << "\n";
  os << "\n";
  for (const auto& t : ex.treatments) os << format_treatment_section(std::string(to_string(t.kind)), t) << "\n";
  for (const auto& e : ex.population) {
    const auto& p = e.profile;
    os << "[agents." << e.name << "]\n"
       << "weight = " << num(e.weight) << "\n"
       << "rationality_temperature = " << num(p.rationality_temperature) << "\n"
       << "perceived_lambda = " << num(p.perceived_lambda) << "\n"
       << "solve_time_s = " << num(p.solve_time_s) << "\n"
       << "accept_time_s = " << num(p.accept_time_s) << "\n"
       << "gaming_propensity = " << num(p.gaming_propensity) << "\n"
       << "skill_scale = " << num(p.skill_scale) << "\n"
       << "load_sensitivity = " << num(p.load_sensitivity) << "\n"
       << "load_base = " << num(p.load_base) << "\n"
       << "load_noise_sd = " << num(p.load_noise_sd) << "\n"
       << "load_time_slope = " << num(p.load_time_slope) << "\n"
       << "belief_source = " << detail::to_string(p.belief_source) << "\n\n";
  }
  const auto& b = ex.bank;
  os << "[bank]\n"
     << "seed = " << b.seed << "\n";
  if (b.manifest) os << "manifest = " << *b.manifest << "\n";
  os << "pool_size = " << b.scheme.pool_size << "\n"
     << "validation_size = " << b.scheme.validation_size << "\n"
     << "n_classes = " << b.scheme.n_classes << "\n"
     << "distortion_temperature = " << num(b.scheme.distortion_temperature) << "\n"
     << "quota_s1 = " << b.scheme.scenario_quota[0] << "\n"
     << "quota_s2 = " << b.scheme.scenario_quota[1] << "\n"
     << "quota_s3 = " << b.scheme.scenario_quota[2] << "\n"
     << "low_confidence_count = " << b.scheme.low_confidence_count << "\n"
     << "max_attempts = " << b.scheme.max_attempts << "\n\n";
  const auto& s = cfg.server;
  os << "[server]\n"
     << "host = " << s.host << "\n"
     << "port = " << s.port << "\n"
     << "seed = " << s.seed << "\n"
     << "capacity = " << s.capacity << "\n"
     << "training_count = " << s.training_count << "\n"
     << "comprehension_attempts = " << s.comprehension_attempts << "\n"
     << "tlx_min = " << num(s.tlx_min) << "\n"
     << "tlx_max = " << num(s.tlx_max) << "\n";
  if (s.static_dir) os << "static_dir = " << *s.static_dir << "\n";
  if (s.event_log) os << "event_log = " << *s.event_log << "\n";
  if (s.training_manifest) os << "training_manifest = " << *s.training_manifest << "\n";
  return os.str();
}

}  // namespace inclab

// inclab command line: calibrate, bank, simulate, analyze, serve.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "inclab/inclab.hpp"
#include "inclab/session_http.hpp"

namespace fs = std::filesystem;
using namespace inclab;

namespace {

httplib::Server* g_http = nullptr;

void on_signal(int) {
  if (g_http) g_http->stop();
}

void print_spec(std::ostream& os, const TreatmentSpec& t, const CalibrationInputs& in) {
  os << std::left << std::setw(10) << to_string(t.kind) << std::right << std::fixed << std::setprecision(4)
     << std::setw(10) << t.gamma << std::setw(12) << t.theta_high_conf << std::setw(12) << t.theta_low_conf << std::setw(12)
     << verify_budget(t, in.n_instances, in.low_conf_fraction) << "\n";
}

int cmd_calibrate(const CalibrationInputs& in, const std::string& out) {
  validate(in);
  const auto specs = default_treatments(in);
  std::cout << std::left << std::setw(10) << "treatment" << std::right << std::setw(10) << "gamma" << std::setw(12)
            << "theta_high" << std::setw(12) << "theta_low" << std::setw(12) << "budget" << "\n";
  for (const auto& t : specs) print_spec(std::cout, t, in);
  const auto& st = specs[1];
  std::cout << std::setprecision(4) << "static strategy payouts: solve-all "
            << strategy_expected_payout(Strategy::solve_all, st, in) << ", accept-all "
            << strategy_expected_payout(Strategy::accept_all, st, in) << "\n";
  std::string sections;
  for (const auto& t : specs) sections += format_treatment_section(std::string(to_string(t.kind)), t) + "\n";
  if (out.empty()) {
    std::cout << "\n" << sections;
  } else {
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot write " + out);
    os << sections;
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_bank(std::uint64_t seed, const std::string& out, int training, const std::string& training_out) {
  BankScheme scheme;
  const auto pool = build_pool(seed, scheme);
  const auto bank = select_bank(pool, seed, scheme);
  save_manifest(out, bank);
  std::cout << "pool temperature " << std::setprecision(4) << pool.temperature << "; wrote " << bank.size()
            << " instances to " << out << "\n";
  if (training > 0 && !training_out.empty()) {
    save_manifest(training_out, select_training(pool, bank, training, seed));
    std::cout << "wrote " << training << " training instances to " << training_out << "\n";
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
                 std::optional<int> n_per_arm) {
  auto cfg = config_path.empty() ? StudyConfig{} : load_config(config_path);
  if (cfg.experiment.treatments.empty()) cfg.experiment.treatments = default_treatments(cfg.experiment.calibration);
  if (seed) cfg.experiment.seed = *seed;
  if (n_per_arm) cfg.experiment.n_per_arm = *n_per_arm;
  const auto data = run_experiment(cfg.experiment);
  write_dataset(data, out);
  std::cout << "simulated " << data.summaries.size() << " participants, " << data.records.size() << " decisions -> "
            << out << "\n";
  return 0;
}

int cmd_analyze(const std::string& records_path, std::string summaries_path, const std::string& out, int sims,
                std::uint64_t seed, unsigned threads) {
  const auto records = load_records(records_path);
  if (summaries_path.empty()) {
    const auto guess = fs::path(records_path).parent_path() / "summaries.jsonl";
    if (fs::exists(guess)) summaries_path = guess.string();
  }
  std::vector<ParticipantSummary> summaries;
  if (!summaries_path.empty()) {
    summaries = load_summaries(summaries_path);
  } else {
    std::cerr << "no summaries file; cognitive load unavailable\n";
    summaries = compute_metrics(records).summaries;
  }
  AnalysisOptions opt;
  opt.mediation_sims = sims;
  opt.mediation_seed = seed;
  opt.threads = threads;
  const auto report = analyze(records, summaries, opt);

  if (out.empty() || out == "-") {
    write_text_report(std::cout, report);
    return 0;
  }
  const fs::path report_path(out);
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  const auto stem = (report_path.parent_path() / report_path.stem()).string();
  {
    std::ofstream os(report_path);
    if (!os) throw ConfigError("cannot write " + out);
    write_text_report(os, report);
  }
  std::ofstream(stem + "_comparisons.csv") << [&] {
    std::ostringstream s;
    write_comparisons_csv(s, report);
    return s.str();
  }();
  std::ofstream(stem + "_means.csv") << [&] {
    std::ostringstream s;
    write_means_csv(s, report);
    return s.str();
  }();
  std::ofstream(stem + "_completion.csv") << [&] {
    std::ostringstream s;
    write_completion_csv(s, summaries);
    return s.str();
  }();
  std::cout << "wrote " << out << " and " << stem << "_{comparisons,means,completion}.csv\n";
  return 0;
}

int cmd_serve(const std::string& config_path, std::optional<int> port, std::optional<std::uint64_t> seed,
              std::optional<std::string> host, std::optional<std::string> event_log, std::optional<std::string> static_dir) {
  auto cfg = config_path.empty() ? StudyConfig{} : load_config(config_path);
  if (cfg.experiment.treatments.empty()) cfg.experiment.treatments = default_treatments(cfg.experiment.calibration);
  if (port) cfg.server.port = *port;
  if (seed) cfg.server.seed = *seed;
  if (host) cfg.server.host = *host;
  if (event_log) cfg.server.event_log = *event_log;
  if (static_dir) cfg.server.static_dir = *static_dir;

  SessionServer server(server_options(cfg));
  httplib::Server http;
  bind_routes(http, server);
  g_http = &http;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << cfg.experiment.treatments.size() << " arms on http://" << cfg.server.host << ":"
            << cfg.server.port << " (" << server.session_count() << " sessions restored)" << std::endl;
  if (!http.listen(cfg.server.host, cfg.server.port)) {
    std::cerr << "cannot listen on " << cfg.server.host << ":" << cfg.server.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incentive-mechanism lab: calibrate, simulate, analyze, serve"};
  app.require_subcommand(1);

  CalibrationInputs cal;
  double dyn_gamma = -1.0;
  std::string cal_out;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Derive baseline/static/dynamic payment schedules");
  calibrate_cmd->add_option("--budget", cal.max_var_payment, "Performance-pay budget")->capture_default_str();
  calibrate_cmd->add_option("--n", cal.n_instances, "Instances in the main task")->capture_default_str();
  calibrate_cmd->add_option("--t-max", cal.t_max, "Main-task time limit (s)")->capture_default_str();
  calibrate_cmd->add_option("--t-per", cal.t_per_instance, "Seconds per independent solve")->capture_default_str();
  calibrate_cmd->add_option("--p-h", cal.p_h_avg, "Average human accuracy")->capture_default_str();
  calibrate_cmd->add_option("--p-ai", cal.p_ai_avg, "Average AI accuracy")->capture_default_str();
  calibrate_cmd->add_option("--f", cal.low_conf_fraction, "Share of low-confidence instances")->capture_default_str();
  calibrate_cmd->add_option("--dynamic-gamma", dyn_gamma, "Override the dynamic-arm reward");
  calibrate_cmd->add_option("--out", cal_out, "Write [treatment.*] config sections here");

  std::uint64_t bank_seed = 7;
  std::string bank_out = "bank.jsonl", training_out;
  int training = 2;
  auto* bank_cmd = app.add_subcommand("bank", "Generate a synthetic task bank manifest");
  bank_cmd->add_option("--seed", bank_seed)->capture_default_str();
  bank_cmd->add_option("--out", bank_out)->capture_default_str();
  bank_cmd->add_option("--training", training, "Training instances to draw")->capture_default_str();
  bank_cmd->add_option("--training-out", training_out, "Training manifest path");

  std::string sim_config, sim_out = "out";
  std::optional<std::uint64_t> sim_seed;
  std::optional<int> sim_n;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulated between-subjects experiment");
  sim_cmd->add_option("--config", sim_config, "Study config (INI)")->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim_out, "Output directory")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Override [experiment] seed");
  sim_cmd->add_option("--n-per-arm", sim_n, "Override [experiment] n_per_arm");

  std::string an_records, an_summaries, an_out;
  int an_sims = 5000;
  std::uint64_t an_seed = 1;
  unsigned an_threads = 0;
  auto* an_cmd = app.add_subcommand("analyze", "Weighted analysis of decision records");
  an_cmd->add_option("--records", an_records, "records.jsonl")->required()->check(CLI::ExistingFile);
  an_cmd->add_option("--summaries", an_summaries, "summaries.jsonl (default: next to records)")->check(CLI::ExistingFile);
  an_cmd->add_option("--out", an_out, "Report path; CSVs are written beside it (default: stdout)");
  an_cmd->add_option("--sims", an_sims, "Bootstrap resamples for mediation")->capture_default_str();
  an_cmd->add_option("--seed", an_seed, "Bootstrap seed")->capture_default_str();
  an_cmd->add_option("--threads", an_threads, "Bootstrap threads (0 = all cores)")->capture_default_str();

  std::string sv_config;
  std::optional<int> sv_port;
  std::optional<std::uint64_t> sv_seed;
  std::optional<std::string> sv_host, sv_log, sv_static;
  auto* sv_cmd = app.add_subcommand("serve", "Serve live study sessions over HTTP");
  sv_cmd->add_option("--config", sv_config, "Study config (INI)")->check(CLI::ExistingFile);
  sv_cmd->add_option("--port", sv_port, "Listen port (default from config, 8080)");
  sv_cmd->add_option("--seed", sv_seed, "Assignment/order seed");
  sv_cmd->add_option("--host", sv_host, "Bind address");
  sv_cmd->add_option("--event-log", sv_log, "Append-only event log; replayed on start");
  sv_cmd->add_option("--static-dir", sv_static, "Participant UI bundle to serve at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate_cmd) {
      if (dyn_gamma >= 0.0) cal.dynamic_gamma = dyn_gamma;
      return cmd_calibrate(cal, cal_out);
    }
    if (*bank_cmd) return cmd_bank(bank_seed, bank_out, training, training_out);
    if (*sim_cmd) return cmd_simulate(sim_config, sim_out, sim_seed, sim_n);
    if (*an_cmd) return cmd_analyze(an_records, an_summaries, an_out, an_sims, an_seed, an_threads);
    if (*sv_cmd) return cmd_serve(sv_config, sv_port, sv_seed, sv_host, sv_log, sv_static);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

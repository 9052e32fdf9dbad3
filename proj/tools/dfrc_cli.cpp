#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfrc/harness.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool quick = false;
  bool print_config = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON scenario config path");
  cmd->add_option("--out", opts.out_dir, "output directory for CSV + manifest");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_flag("--quick", opts.quick, "desk-scale preset: 10 channel / 200 error trials");
  cmd->add_flag("--print-config", opts.print_config, "echo the fully resolved config and exit");
  cmd->add_option("--threads", opts.threads, "worker threads (default from config)");
}

struct Overrides {
  CLI::App* cmd = nullptr;
  double gamma_db = 0.0, p_out = 0.0, sigma_e2 = 0.0, lambda = 0.0, delta = 0.0;
  double c1 = 0.0, c2 = 0.0, power_dbm = 0.0, noise_dbm = 0.0, duty_ratio = 0.0;
  int users = 0, antennas = 0, channel_trials = 0, error_trials = 0, candidates = 0;
  std::string entry_law, error_variant;
  bool plain_row_norm = false;

  void attach(CLI::App* c) {
    cmd = c;
    c->add_option("--gamma-db", gamma_db, "SINR threshold, dB (all users)");
    c->add_option("--p-out", p_out, "outage probability (all users)");
    c->add_option("--users", users, "number of downlink users K");
    c->add_option("--antennas", antennas, "number of transmit antennas N");
    c->add_option("--sigma-e2", sigma_e2, "error variance sigma_e^2");
    c->add_option("--lambda", lambda, "correlation decay for the dependent model");
    c->add_option("--delta", delta, "cross-correlation loss weight");
    c->add_option("--c1", c1, "matching-loss threshold (comm-centric)");
    c->add_option("--c2", c2, "cross-correlation threshold (comm-centric)");
    c->add_option("--power-dbm", power_dbm, "transmit power budget, dBm");
    c->add_option("--noise-dbm", noise_dbm, "noise power, dBm");
    c->add_option("--channel-trials", channel_trials, "channel realizations");
    c->add_option("--error-trials", error_trials, "error realizations per design");
    c->add_option("--entry-law", entry_law, "uniform | gaussian | sum_of_uniforms");
    c->add_option("--error-variant", error_variant, "independent | dependent");
    c->add_option("--candidates", candidates, "randomization candidates (baseline)");
    c->add_option("--duty-ratio", duty_ratio, "radar/comm duty ratio for sum rate");
    c->add_flag("--baseline-row-norm", plain_row_norm,
                "rescale candidate row norms instead of squared row norms");
  }

  void apply(dfrc::ScenarioConfig& cfg) const {
    auto set = [&](const char* flag, auto& field, const auto& value) {
      if (cmd->count(flag) > 0) field = value;
    };
    if (cmd->count("--gamma-db") > 0) cfg.gamma_db = {gamma_db};
    if (cmd->count("--p-out") > 0) cfg.p_out = {p_out};
    set("--users", cfg.users, users);
    set("--antennas", cfg.num_antennas, antennas);
    set("--sigma-e2", cfg.sigma_e2, sigma_e2);
    set("--lambda", cfg.lambda, lambda);
    set("--delta", cfg.delta, delta);
    set("--c1", cfg.c1, c1);
    set("--c2", cfg.c2, c2);
    set("--power-dbm", cfg.power_dbm, power_dbm);
    set("--noise-dbm", cfg.noise_dbm, noise_dbm);
    set("--channel-trials", cfg.channel_trials, channel_trials);
    set("--error-trials", cfg.error_trials, error_trials);
    set("--entry-law", cfg.entry_law, entry_law);
    set("--error-variant", cfg.error_variant, error_variant);
    set("--candidates", cfg.baseline_candidates, candidates);
    set("--duty-ratio", cfg.duty_ratio, duty_ratio);
    if (cmd->count("--baseline-row-norm") > 0) cfg.baseline_squared_row_norm = false;
  }
};

dfrc::ScenarioConfig resolve_config(const CommonOptions& opts, const Overrides& over,
                                    const std::string& algorithm) {
  dfrc::ScenarioConfig cfg;
  if (!opts.config_path.empty()) cfg = dfrc::config_from_json_file(opts.config_path);
  cfg.algorithm = algorithm;
  if (opts.quick) {
    cfg.channel_trials = 10;
    cfg.error_trials = 200;
  }
  over.apply(cfg);
  if (over.cmd->count("--seed") > 0) cfg.seed = opts.seed;
  if (opts.threads > 0) cfg.threads = opts.threads;
  return cfg;
}

int run_single(const CommonOptions& opts, const dfrc::ScenarioConfig& cfg) {
  if (opts.print_config) {
    std::cout << dfrc::config_to_json(cfg);
    return 0;
  }
  cfg.validate();
  const dfrc::ExperimentResult result = dfrc::run_scenario(cfg);
  dfrc::write_rows_csv(result, opts.out_dir);
  dfrc::write_aggregate_csv(result, opts.out_dir);
  if (cfg.algorithm == "clt_validate") {
    dfrc::emit_plot_data(result, "histogram", opts.out_dir);
    dfrc::emit_plot_data(result, "kl_curve", opts.out_dir);
  } else if (result.beampattern_mean.size() > 0) {
    dfrc::emit_plot_data(result, "beampattern", opts.out_dir);
  }
  int ok = 0;
  for (const auto& row : result.rows)
    if (row.status == "ok") ++ok;
  std::cout << cfg.algorithm << ": " << ok << "/" << result.rows.size()
            << " realizations ok; outputs in " << opts.out_dir << "\n";
  for (const auto& m : result.aggregate)
    std::cout << "  " << m.name << " = " << m.mean << " (se " << m.std_error << ")\n";
  if (cfg.algorithm != "clt_validate" && ok == 0) {
    std::cerr << "no realization produced a usable design\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-function radar-communication beamforming designer"};
  app.require_subcommand(1);

  CLI::App* radar = app.add_subcommand("radar-centric", "minimize radar loss under QoS");
  CLI::App* comm = app.add_subcommand("comm-centric", "minimize outage under loss thresholds");
  CLI::App* baseline = app.add_subcommand("baseline", "gaussian randomization comparison");
  CLI::App* clt = app.add_subcommand("clt-validate", "gaussian approximation diagnostics");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a scenario across an axis");

  CommonOptions opts;
  Overrides over_radar, over_comm, over_base, over_clt, over_sweep;
  for (CLI::App* cmd : {radar, comm, baseline, clt, sweep_cmd}) add_common(cmd, opts);
  over_radar.attach(radar);
  over_comm.attach(comm);
  over_base.attach(baseline);
  over_clt.attach(clt);
  over_sweep.attach(sweep_cmd);

  std::string axis = "gamma_db";
  std::vector<double> axis_values;
  std::string sweep_algorithm = "radar_centric";
  sweep_cmd->add_option("--axis", axis, "gamma_db | p_out | K | M | sigma_e2");
  sweep_cmd->add_option("--values", axis_values, "axis values")->expected(-1);
  sweep_cmd->add_option("--algorithm", sweep_algorithm,
                        "radar_centric | comm_centric | baseline");

  CLI11_PARSE(app, argc, argv);

  try {
    if (radar->parsed()) return run_single(opts, resolve_config(opts, over_radar, "radar_centric"));
    if (comm->parsed()) return run_single(opts, resolve_config(opts, over_comm, "comm_centric"));
    if (baseline->parsed()) return run_single(opts, resolve_config(opts, over_base, "baseline"));
    if (clt->parsed()) return run_single(opts, resolve_config(opts, over_clt, "clt_validate"));
    if (sweep_cmd->parsed()) {
      const dfrc::ScenarioConfig cfg = resolve_config(opts, over_sweep, sweep_algorithm);
      if (opts.print_config) {
        std::cout << dfrc::config_to_json(cfg);
        return 0;
      }
      if (axis_values.empty()) {
        std::cerr << "sweep: --values required\n";
        return 1;
      }
      const dfrc::SweepResult result = dfrc::sweep(cfg, axis, axis_values);
      dfrc::emit_plot_data(result, "sweep_curve", opts.out_dir);
      std::cout << "sweep over " << axis << ": " << result.points.size()
                << " points; outputs in " << opts.out_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

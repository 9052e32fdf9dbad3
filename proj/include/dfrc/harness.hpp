#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/channel.hpp"
#include "dfrc/optimizer.hpp"

namespace dfrc {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct ScenarioConfig {
  // array + grid
  int num_antennas = 10;
  double carrier_hz = 5e9;
  double spacing_wavelengths = 0.5;
  int grid_points = 181;
  // radar template
  std::vector<double> dois_deg = {-30.0, 0.0, 30.0};
  double halfwidth_deg = 5.0;
  // users
  int users = 3;
  std::vector<double> gamma_db = {10.0};  // length 1 broadcasts to all users
  std::vector<double> p_out = {0.1};
  // powers
  double power_dbm = 30.0;
  double noise_dbm = 10.0;
  // error model
  std::string error_variant = "independent";  // independent | dependent
  double sigma_e2 = 0.005;
  double lambda = 10.0;
  std::string entry_law = "gaussian";  // uniform | gaussian | sum_of_uniforms
  int stat_trials = 20000;             // draws for realized-statistics estimation
  // loss + thresholds
  double delta = 1.0;
  double c1 = 0.3;
  double c2 = 5.0;
  // algorithm
  std::string algorithm = "radar_centric";  // radar_centric | comm_centric | baseline | clt_validate
  // schedules
  double zeta1 = 0.0;  // 0 = auto
  double mu = 0.5;
  double rank_tol = 1e-4;
  double bisection_tol = 1e-3;
  int max_outer_iters = 60;
  // solver
  double solver_tol = 1e-6;
  int solver_max_iters = 50000;
  double solver_rho = 1.0;
  // experiment size
  int channel_trials = 100;
  int error_trials = 1000;
  int threads = 1;
  std::uint64_t seed = 1;
  // reporting
  double duty_ratio = 1.0;
  std::string sum_rate_mode = "estimated";  // estimated | perturbed
  // baseline
  int baseline_candidates = 40000;
  bool baseline_squared_row_norm = true;
  // clt validation
  std::vector<int> clt_n_values = {4, 6, 8, 10, 12};
  int clt_bins = 100;
  int clt_trials = 100000;

  void validate() const;  // throws std::invalid_argument
};

ScenarioConfig config_from_json_file(const std::string& path);
ScenarioConfig config_from_json_text(const std::string& text);
std::string config_to_json(const ScenarioConfig& cfg);

// Derived pieces assembled from a config.
ArrayConfig make_array_config(const ScenarioConfig& cfg);
BeampatternSpec make_spec(const ScenarioConfig& cfg);
ErrorModel make_error_model(const ScenarioConfig& cfg);
std::vector<UserQoS> make_qos(const ScenarioConfig& cfg);
std::vector<double> doi_placement(int m);  // degrees, sweep convention

struct ResultRow {
  int index = 0;
  std::string status;  // ok | infeasible | not_rank1 | error:<what>
  LossBreakdown loss;
  double relaxed_loss = 0.0;
  double sum_rate = 0.0;
  std::vector<double> outage;
  std::vector<double> rank_ratios;
  double t_star = 0.0;
  int outer_iterations = 0;
  long solver_iterations = 0;
  double wall_seconds = 0.0;
  double baseline_loss = 0.0;
  int baseline_feasible = 0;
};

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
};

struct ExperimentResult {
  ScenarioConfig config;
  std::vector<ResultRow> rows;
  std::vector<MetricSummary> aggregate;
  // beampattern series (radar designs)
  Eigen::VectorXd grid_deg;
  Eigen::VectorXd beampattern_mean;     // linear scale, averaged over ok rows
  Eigen::VectorXd beampattern_desired;  // mean alpha * template
  // clt series
  std::vector<int> clt_n;
  std::vector<CltReport> clt;
};

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<ExperimentResult> points;
};

ExperimentResult run_scenario(const ScenarioConfig& cfg);
SweepResult sweep(const ScenarioConfig& cfg, const std::string& axis,
                  const std::vector<double>& values);

// kinds: beampattern | sweep_curve | histogram | kl_curve. Writes CSV files and
// appends to a plain-text manifest in out_dir. Throws when the result lacks the
// requested series.
void emit_plot_data(const ExperimentResult& result, const std::string& kind,
                    const std::string& out_dir);
void emit_plot_data(const SweepResult& result, const std::string& kind,
                    const std::string& out_dir);

void write_rows_csv(const ExperimentResult& result, const std::string& out_dir);
void write_aggregate_csv(const ExperimentResult& result, const std::string& out_dir);

std::vector<MetricSummary> summarize(const std::vector<ResultRow>& rows, int users);

}  // namespace dfrc

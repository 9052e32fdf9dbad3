#include "dfrc/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dfrc/array.hpp"
#include "dfrc/radar_loss.hpp"
#include "dfrc/rng.hpp"

namespace dfrc {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

EntryLaw parse_law(const std::string& name) {
  if (name == "uniform") return EntryLaw::uniform;
  if (name == "gaussian") return EntryLaw::gaussian;
  if (name == "sum_of_uniforms") return EntryLaw::sum_of_uniforms;
  throw std::invalid_argument("unknown entry_law: " + name);
}

std::ofstream open_out(const std::filesystem::path& path, bool append = false) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

void manifest_line(const std::string& out_dir, const std::string& line) {
  auto out = open_out(std::filesystem::path(out_dir) / "manifest.txt", true);
  out << line << '\n';
}

struct RowOutput {
  ResultRow row;
  Eigen::MatrixXcd covariance;  // sum of lifted blocks when a design exists
  double alpha = 0.0;
  bool has_design = false;
};

void fill_design_row(ResultRow& row, RowOutput& out, const DesignResult& res,
                     const ChannelSet& channels, const ScenarioConfig& cfg,
                     std::uint64_t row_seed) {
  row.status = !res.feasible ? "infeasible" : (res.rank1_ok ? "ok" : "not_rank1");
  if (!res.message.empty() && row.status != "ok") row.status += ":" + res.message;
  row.loss = res.loss;
  row.relaxed_loss = res.relaxed_loss;
  row.rank_ratios = res.rank_ratios;
  row.t_star = res.t_star;
  row.outer_iterations = res.outer_iterations;
  row.solver_iterations = res.solver_iterations;
  for (const auto& rep : res.outage) row.outage.push_back(rep.fraction);
  if (!res.w.empty()) {
    row.sum_rate =
        cfg.sum_rate_mode == "perturbed"
            ? sum_rate_perturbed(res.w, channels, make_error_model(cfg), cfg.error_trials,
                                 mix_seed(row_seed, 0x5e7a), cfg.duty_ratio)
            : sum_rate(res.w, channels, cfg.duty_ratio);
  }
  if (res.feasible && !res.lifted.empty()) {
    const int n = static_cast<int>(res.lifted[0].rows());
    out.covariance = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& w : res.lifted) out.covariance += w;
    out.alpha = res.loss.alpha;
    out.has_design = true;
  }
}

RowOutput run_realization(int index, const ScenarioConfig& cfg, const ArrayConfig& arr,
                          const BeampatternSpec& spec, const ErrorModel& model,
                          const ErrorStats& stats, const std::vector<UserQoS>& qos) {
  RowOutput out;
  out.row.index = index;
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t row_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(index));
  try {
    const double power = dbm_to_watts(cfg.power_dbm);
    const double noise = dbm_to_watts(cfg.noise_dbm);
    ChannelSet channels;
    channels.noise_power = noise;
    if (cfg.users > 0) channels = generate_rayleigh(cfg.users, cfg.num_antennas, row_seed, noise);

    SolveSettings solver;
    solver.tol_primal = cfg.solver_tol;
    solver.tol_dual = cfg.solver_tol;
    solver.max_iters = cfg.solver_max_iters;
    solver.rho = cfg.solver_rho;

    if (cfg.algorithm == "comm_centric") {
      CommCentricConfig cc;
      cc.array = arr;
      for (const auto& q : qos) cc.gamma.push_back(q.gamma);
      cc.c1 = cfg.c1;
      cc.c2 = cfg.c2;
      cc.bisection_tol = cfg.bisection_tol;
      cc.rank_tol = cfg.rank_tol;
      cc.power_budget = power;
      cc.loss = RadarLossConfig{cfg.delta, spec};
      cc.mu = cfg.mu;
      cc.zeta1 = cfg.zeta1;
      cc.max_outer_iters = cfg.max_outer_iters;
      cc.solver = solver;
      cc.outage_eval_trials = cfg.error_trials;
      cc.outage_eval_seed = row_seed;
      fill_design_row(out.row, out, solve_comm_centric(channels, model, stats, cc), channels,
                      cfg, row_seed);
    } else {
      RadarCentricConfig rc;
      rc.array = arr;
      rc.qos = qos;
      rc.power_budget = power;
      rc.loss = RadarLossConfig{cfg.delta, spec};
      rc.zeta1 = cfg.zeta1;
      rc.mu = cfg.mu;
      rc.rank_tol = cfg.rank_tol;
      rc.max_outer_iters = cfg.max_outer_iters;
      rc.solver = solver;
      rc.outage_eval_trials = cfg.error_trials;
      rc.outage_eval_seed = row_seed;
      const DesignResult res = solve_radar_centric(channels, model, stats, rc);
      fill_design_row(out.row, out, res, channels, cfg, row_seed);
      if (cfg.algorithm == "baseline" && !res.relaxed_lifted.empty()) {
        const BaselineResult base = randomization_baseline(
            res.relaxed_lifted, channels, stats, rc, cfg.baseline_candidates,
            mix_seed(row_seed, 0xca4d), cfg.baseline_squared_row_norm);
        out.row.baseline_feasible = base.feasible_candidates;
        out.row.baseline_loss =
            base.found ? base.loss.combined : std::numeric_limits<double>::quiet_NaN();
      }
    }
  } catch (const std::exception& e) {
    out.row.status = std::string("error:") + e.what();
    out.has_design = false;
  }
  out.row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void run_clt(const ScenarioConfig& cfg, ExperimentResult& out) {
  const EntryLaw law = parse_law(cfg.entry_law);
  for (int n : cfg.clt_n_values) {
    ErrorModel model = cfg.error_variant == "independent"
                           ? ErrorModel::independent(n, cfg.sigma_e2, law)
                           : ErrorModel::dependent(cfg.lambda, law, cfg.sigma_e2);
    RngStream rng(mix_seed(cfg.seed, 0xb000 + static_cast<std::uint64_t>(n)));
    Eigen::MatrixXcd g(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g(i, j) = rng.cnormal();
    Eigen::MatrixXcd b = 0.5 * (g + g.adjoint());
    b /= b.norm();
    out.clt_n.push_back(n);
    out.clt.push_back(clt_validate(model, b, cfg.clt_trials, cfg.clt_bins,
                                   mix_seed(cfg.seed, 0xc000 + static_cast<std::uint64_t>(n))));
  }
  for (std::size_t i = 0; i < out.clt.size(); ++i)
    out.aggregate.push_back(
        {"kl_n" + std::to_string(out.clt_n[i]), out.clt[i].kl_divergence, 0.0});
}

void append_metric(std::vector<MetricSummary>& agg, const std::string& name,
                   const std::vector<double>& values) {
  if (values.empty()) return;
  const int n = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double se = n > 1 ? std::sqrt(var / (n - 1)) / std::sqrt(double(n)) : 0.0;
  agg.push_back({name, mean, se});
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  if (watts <= 0.0) throw std::invalid_argument("watts_to_dbm: nonpositive power");
  return 10.0 * std::log10(watts) + 30.0;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (num_antennas < 2) fail("num_antennas must be >= 2");
  if (carrier_hz <= 0.0) fail("carrier_hz must be positive");
  if (spacing_wavelengths <= 0.0) fail("spacing_wavelengths must be positive");
  if (grid_points < 2) fail("grid_points must be >= 2");
  if (dois_deg.empty()) fail("dois_deg must be nonempty");
  for (double d : dois_deg)
    if (d < -90.0 || d > 90.0) fail("dois_deg entries must lie in [-90, 90]");
  if (halfwidth_deg <= 0.0) fail("halfwidth_deg must be positive");
  if (users < 0) fail("users must be >= 0");
  if (users > 0) {
    const auto sizes_ok = [&](std::size_t s) { return s == 1 || s == std::size_t(users); };
    if (gamma_db.empty() || !sizes_ok(gamma_db.size())) fail("gamma_db must have 1 or K entries");
    if (p_out.empty() || !sizes_ok(p_out.size())) fail("p_out must have 1 or K entries");
    for (double p : p_out)
      if (p <= 0.0 || p >= 0.5) fail("p_out entries must lie in (0, 0.5)");
  }
  if (error_variant != "independent" && error_variant != "dependent")
    fail("error_variant must be independent or dependent");
  parse_law(entry_law);
  if (sigma_e2 <= 0.0) fail("sigma_e2 must be positive");
  if (error_variant == "dependent" && lambda <= 0.0) fail("lambda must be positive");
  if (stat_trials < 100) fail("stat_trials must be >= 100");
  if (delta < 0.0) fail("delta must be >= 0");
  if (c1 <= 0.0 || c2 <= 0.0) fail("c1 and c2 must be positive");
  if (algorithm != "radar_centric" && algorithm != "comm_centric" && algorithm != "baseline" &&
      algorithm != "clt_validate")
    fail("unknown algorithm: " + algorithm);
  if (algorithm == "comm_centric" && users < 1) fail("comm_centric needs users >= 1");
  if (zeta1 < 0.0) fail("zeta1 must be >= 0");
  if (mu <= 0.0 || mu >= 1.0) fail("mu must lie in (0, 1)");
  if (rank_tol <= 0.0) fail("rank_tol must be positive");
  if (bisection_tol <= 0.0) fail("bisection_tol must be positive");
  if (max_outer_iters < 1) fail("max_outer_iters must be >= 1");
  if (solver_tol <= 0.0) fail("solver_tol must be positive");
  if (solver_max_iters < 1) fail("solver_max_iters must be >= 1");
  if (solver_rho <= 0.0) fail("solver_rho must be positive");
  if (channel_trials < 1) fail("channel_trials must be >= 1");
  if (algorithm != "clt_validate" && users > 0 && error_trials < 100)
    fail("error_trials must be >= 100");
  if (threads < 1) fail("threads must be >= 1");
  if (duty_ratio < 1.0) fail("duty_ratio must be >= 1");
  if (sum_rate_mode != "estimated" && sum_rate_mode != "perturbed")
    fail("sum_rate_mode must be estimated or perturbed");
  if (baseline_candidates < 1) fail("baseline_candidates must be >= 1");
  if (algorithm == "clt_validate") {
    if (clt_n_values.empty()) fail("clt_n_values must be nonempty");
    for (int n : clt_n_values)
      if (n < 2) fail("clt_n_values entries must be >= 2");
    if (clt_bins < 10) fail("clt_bins must be >= 10");
    if (clt_trials < 1000) fail("clt_trials must be >= 1000");
  }
}

ScenarioConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json_text(text.str());
}

ScenarioConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  ScenarioConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "num_antennas") cfg.num_antennas = value.get<int>();
      else if (key == "carrier_hz") cfg.carrier_hz = value.get<double>();
      else if (key == "spacing_wavelengths") cfg.spacing_wavelengths = value.get<double>();
      else if (key == "grid_points") cfg.grid_points = value.get<int>();
      else if (key == "dois_deg") cfg.dois_deg = value.get<std::vector<double>>();
      else if (key == "halfwidth_deg") cfg.halfwidth_deg = value.get<double>();
      else if (key == "users") cfg.users = value.get<int>();
      else if (key == "gamma_db") cfg.gamma_db = value.get<std::vector<double>>();
      else if (key == "p_out") cfg.p_out = value.get<std::vector<double>>();
      else if (key == "power_dbm") cfg.power_dbm = value.get<double>();
      else if (key == "noise_dbm") cfg.noise_dbm = value.get<double>();
      else if (key == "error_variant") cfg.error_variant = value.get<std::string>();
      else if (key == "sigma_e2") cfg.sigma_e2 = value.get<double>();
      else if (key == "lambda") cfg.lambda = value.get<double>();
      else if (key == "entry_law") cfg.entry_law = value.get<std::string>();
      else if (key == "stat_trials") cfg.stat_trials = value.get<int>();
      else if (key == "delta") cfg.delta = value.get<double>();
      else if (key == "c1") cfg.c1 = value.get<double>();
      else if (key == "c2") cfg.c2 = value.get<double>();
      else if (key == "algorithm") cfg.algorithm = value.get<std::string>();
      else if (key == "zeta1") cfg.zeta1 = value.get<double>();
      else if (key == "mu") cfg.mu = value.get<double>();
      else if (key == "rank_tol") cfg.rank_tol = value.get<double>();
      else if (key == "bisection_tol") cfg.bisection_tol = value.get<double>();
      else if (key == "max_outer_iters") cfg.max_outer_iters = value.get<int>();
      else if (key == "solver_tol") cfg.solver_tol = value.get<double>();
      else if (key == "solver_max_iters") cfg.solver_max_iters = value.get<int>();
      else if (key == "solver_rho") cfg.solver_rho = value.get<double>();
      else if (key == "channel_trials") cfg.channel_trials = value.get<int>();
      else if (key == "error_trials") cfg.error_trials = value.get<int>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "duty_ratio") cfg.duty_ratio = value.get<double>();
      else if (key == "sum_rate_mode") cfg.sum_rate_mode = value.get<std::string>();
      else if (key == "baseline_candidates") cfg.baseline_candidates = value.get<int>();
      else if (key == "baseline_squared_row_norm")
        cfg.baseline_squared_row_norm = value.get<bool>();
      else if (key == "clt_n_values") cfg.clt_n_values = value.get<std::vector<int>>();
      else if (key == "clt_bins") cfg.clt_bins = value.get<int>();
      else if (key == "clt_trials") cfg.clt_trials = value.get<int>();
      else throw std::invalid_argument("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config type error: ") + e.what());
  }
  return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["num_antennas"] = cfg.num_antennas;
  j["carrier_hz"] = cfg.carrier_hz;
  j["spacing_wavelengths"] = cfg.spacing_wavelengths;
  j["grid_points"] = cfg.grid_points;
  j["dois_deg"] = cfg.dois_deg;
  j["halfwidth_deg"] = cfg.halfwidth_deg;
  j["users"] = cfg.users;
  j["gamma_db"] = cfg.gamma_db;
  j["p_out"] = cfg.p_out;
  j["power_dbm"] = cfg.power_dbm;
  j["noise_dbm"] = cfg.noise_dbm;
  j["error_variant"] = cfg.error_variant;
  j["sigma_e2"] = cfg.sigma_e2;
  j["lambda"] = cfg.lambda;
  j["entry_law"] = cfg.entry_law;
  j["stat_trials"] = cfg.stat_trials;
  j["delta"] = cfg.delta;
  j["c1"] = cfg.c1;
  j["c2"] = cfg.c2;
  j["algorithm"] = cfg.algorithm;
  j["zeta1"] = cfg.zeta1;
  j["mu"] = cfg.mu;
  j["rank_tol"] = cfg.rank_tol;
  j["bisection_tol"] = cfg.bisection_tol;
  j["max_outer_iters"] = cfg.max_outer_iters;
  j["solver_tol"] = cfg.solver_tol;
  j["solver_max_iters"] = cfg.solver_max_iters;
  j["solver_rho"] = cfg.solver_rho;
  j["channel_trials"] = cfg.channel_trials;
  j["error_trials"] = cfg.error_trials;
  j["threads"] = cfg.threads;
  j["seed"] = cfg.seed;
  j["duty_ratio"] = cfg.duty_ratio;
  j["sum_rate_mode"] = cfg.sum_rate_mode;
  j["baseline_candidates"] = cfg.baseline_candidates;
  j["baseline_squared_row_norm"] = cfg.baseline_squared_row_norm;
  j["clt_n_values"] = cfg.clt_n_values;
  j["clt_bins"] = cfg.clt_bins;
  j["clt_trials"] = cfg.clt_trials;
  return j.dump(2) + "\n";
}

ArrayConfig make_array_config(const ScenarioConfig& cfg) {
  ArrayConfig arr;
  arr.num_antennas = cfg.num_antennas;
  arr.carrier_hz = cfg.carrier_hz;
  arr.wavelength = 299792458.0 / cfg.carrier_hz;
  arr.spacing = cfg.spacing_wavelengths * arr.wavelength;
  return arr;
}

BeampatternSpec make_spec(const ScenarioConfig& cfg) {
  std::vector<double> dois_rad;
  for (double d : cfg.dois_deg) dois_rad.push_back(d * kDegToRad);
  return make_beampattern_spec(dois_rad, cfg.halfwidth_deg * kDegToRad,
                               AngleGrid::uniform(cfg.grid_points));
}

ErrorModel make_error_model(const ScenarioConfig& cfg) {
  const EntryLaw law = parse_law(cfg.entry_law);
  return cfg.error_variant == "independent"
             ? ErrorModel::independent(cfg.num_antennas, cfg.sigma_e2, law)
             : ErrorModel::dependent(cfg.lambda, law, cfg.sigma_e2);
}

std::vector<UserQoS> make_qos(const ScenarioConfig& cfg) {
  std::vector<UserQoS> qos;
  for (int k = 0; k < cfg.users; ++k) {
    const double db = cfg.gamma_db[cfg.gamma_db.size() == 1 ? 0 : k];
    const double p = cfg.p_out[cfg.p_out.size() == 1 ? 0 : k];
    qos.push_back({std::pow(10.0, db / 10.0), p});
  }
  return qos;
}

std::vector<double> doi_placement(int m) {
  if (m < 1) throw std::invalid_argument("doi_placement: need m >= 1");
  switch (m) {
    case 1: return {0.0};
    case 2: return {-30.0, 30.0};
    case 3: return {-30.0, 0.0, 30.0};
    case 4: return {-45.0, -15.0, 15.0, 45.0};
    default: break;
  }
  std::vector<double> dois(m);
  for (int i = 0; i < m; ++i) dois[i] = -45.0 + 90.0 * i / (m - 1);
  return dois;
}

ExperimentResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ExperimentResult out;
  out.config = cfg;
  const BeampatternSpec spec = make_spec(cfg);
  out.grid_deg = spec.grid.points / kDegToRad;

  if (cfg.algorithm == "clt_validate") {
    run_clt(cfg, out);
    return out;
  }

  const ArrayConfig arr = make_array_config(cfg);
  const ErrorModel model = make_error_model(cfg);
  const std::vector<UserQoS> qos = make_qos(cfg);
  ErrorStats stats;
  if (cfg.users > 0)
    stats = estimate_error_stats(model, cfg.num_antennas, cfg.stat_trials,
                                 mix_seed(cfg.seed, 0x57a7));

  std::vector<RowOutput> outputs(cfg.channel_trials);
  const int workers = std::max(1, std::min(cfg.threads, cfg.channel_trials));
  if (workers == 1) {
    for (int i = 0; i < cfg.channel_trials; ++i)
      outputs[i] = run_realization(i, cfg, arr, spec, model, stats, qos);
  } else {
    std::atomic<int> next{0};
    auto work = [&] {
      for (int i = next.fetch_add(1); i < cfg.channel_trials; i = next.fetch_add(1))
        outputs[i] = run_realization(i, cfg, arr, spec, model, stats, qos);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  int designs = 0;
  double alpha_mean = 0.0;
  Eigen::VectorXd pattern_sum = Eigen::VectorXd::Zero(spec.grid.size());
  for (auto& o : outputs) {
    if (o.has_design) {
      pattern_sum += beampattern(o.covariance, arr, spec.grid);
      alpha_mean += o.alpha;
      ++designs;
    }
    out.rows.push_back(std::move(o.row));
  }
  if (designs > 0) {
    out.beampattern_mean = pattern_sum / designs;
    out.beampattern_desired = (alpha_mean / designs) * spec.desired;
  }
  out.aggregate = summarize(out.rows, cfg.users);
  return out;
}

SweepResult sweep(const ScenarioConfig& cfg, const std::string& axis,
                  const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
  SweepResult result;
  result.axis = axis;
  result.values = values;
  for (double v : values) {
    ScenarioConfig point = cfg;
    if (axis == "gamma_db") point.gamma_db = {v};
    else if (axis == "p_out") point.p_out = {v};
    else if (axis == "K") point.users = static_cast<int>(std::lround(v));
    else if (axis == "M") point.dois_deg = doi_placement(static_cast<int>(std::lround(v)));
    else if (axis == "sigma_e2") point.sigma_e2 = v;
    else throw std::invalid_argument("unknown sweep axis: " + axis);
    try {
      result.points.push_back(run_scenario(point));
    } catch (const std::exception& e) {
      ExperimentResult failed;
      failed.config = point;
      ResultRow row;
      row.status = std::string("error:") + e.what();
      failed.rows.push_back(row);
      result.points.push_back(std::move(failed));
    }
  }
  return result;
}

void emit_plot_data(const ExperimentResult& result, const std::string& kind,
                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  if (kind == "beampattern") {
    if (result.beampattern_mean.size() == 0)
      throw std::invalid_argument("emit_plot_data: no beampattern series in result");
    const double peak = result.beampattern_mean.maxCoeff();
    if (peak <= 0.0) throw std::invalid_argument("emit_plot_data: degenerate beampattern");
    auto out = open_out(dir / "beampattern.csv");
    out << "theta_deg,power_db_relative,power_linear,desired_linear\n";
    for (int l = 0; l < result.grid_deg.size(); ++l)
      out << fmt(result.grid_deg[l]) << ','
          << fmt(10.0 * std::log10(std::max(result.beampattern_mean[l] / peak, 1e-12))) << ','
          << fmt(result.beampattern_mean[l]) << ',' << fmt(result.beampattern_desired[l])
          << '\n';
    manifest_line(out_dir,
                  "beampattern.csv x=theta_deg y=power_db_relative label=transmit beampattern");
  } else if (kind == "histogram") {
    if (result.clt.empty())
      throw std::invalid_argument("emit_plot_data: no clt series in result");
    for (std::size_t i = 0; i < result.clt.size(); ++i) {
      const std::string name = "histogram_n" + std::to_string(result.clt_n[i]) + ".csv";
      auto out = open_out(dir / name);
      out << "bin_center,empirical_density,fitted_density\n";
      const CltReport& rep = result.clt[i];
      for (int b = 0; b < rep.bin_centers.size(); ++b)
        out << fmt(rep.bin_centers[b]) << ',' << fmt(rep.empirical_density[b]) << ','
            << fmt(rep.fitted_density[b]) << '\n';
      manifest_line(out_dir, name + " x=bin_center y=density label=statistic histogram vs "
                                    "gaussian fit");
    }
  } else if (kind == "kl_curve") {
    if (result.clt.empty())
      throw std::invalid_argument("emit_plot_data: no clt series in result");
    auto out = open_out(dir / "kl_curve.csv");
    out << "n,kl_nats\n";
    for (std::size_t i = 0; i < result.clt.size(); ++i)
      out << result.clt_n[i] << ',' << fmt(result.clt[i].kl_divergence) << '\n';
    manifest_line(out_dir, "kl_curve.csv x=n y=kl_nats label=gaussian fit divergence vs size");
  } else {
    throw std::invalid_argument("emit_plot_data: unsupported kind for a single run: " + kind);
  }
}

void emit_plot_data(const SweepResult& result, const std::string& kind,
                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  if (kind == "sweep_curve") {
    if (result.points.empty())
      throw std::invalid_argument("emit_plot_data: empty sweep result");
    std::vector<std::string> metrics;
    std::set<std::string> seen;
    for (const auto& point : result.points)
      for (const auto& m : point.aggregate)
        if (seen.insert(m.name).second) metrics.push_back(m.name);
    if (metrics.empty())
      throw std::invalid_argument("emit_plot_data: sweep has no aggregate metrics");
    const std::string name = "sweep_" + result.axis + ".csv";
    auto out = open_out(dir / name);
    out << result.axis;
    for (const auto& m : metrics) out << ',' << m << "_mean," << m << "_se";
    out << '\n';
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      out << fmt(result.values[i]);
      for (const auto& m : metrics) {
        const MetricSummary* found = nullptr;
        for (const auto& agg : result.points[i].aggregate)
          if (agg.name == m) {
            found = &agg;
            break;
          }
        if (found) out << ',' << fmt(found->mean) << ',' << fmt(found->std_error);
        else out << ",nan,nan";
      }
      out << '\n';
    }
    manifest_line(out_dir, name + " x=" + result.axis + " y=<metric>_mean label=sweep over " +
                               result.axis);
  } else if (kind == "kl_curve") {
    bool any = false;
    const std::string name = "kl_sweep_" + result.axis + ".csv";
    auto out = open_out(dir / name);
    out << result.axis << ",n,kl_nats\n";
    for (std::size_t i = 0; i < result.points.size(); ++i)
      for (std::size_t j = 0; j < result.points[i].clt.size(); ++j) {
        any = true;
        out << fmt(result.values[i]) << ',' << result.points[i].clt_n[j] << ','
            << fmt(result.points[i].clt[j].kl_divergence) << '\n';
      }
    if (!any) throw std::invalid_argument("emit_plot_data: no clt series in sweep");
    manifest_line(out_dir, name + " x=n y=kl_nats label=divergence sweep");
  } else {
    throw std::invalid_argument("emit_plot_data: unsupported kind for a sweep: " + kind);
  }
}

void write_rows_csv(const ExperimentResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto out = open_out(std::filesystem::path(out_dir) / "rows.csv");
  const int users = result.config.users;
  out << "index,status,l1,l2,combined_loss,alpha,relaxed_loss,sum_rate,t_star,outer_iterations,"
         "solver_iterations,baseline_loss,baseline_feasible";
  for (int k = 0; k < users; ++k) out << ",outage_" << k;
  for (int k = 0; k < users; ++k) out << ",rank_ratio_" << k;
  out << '\n';
  for (const auto& row : result.rows) {
    out << row.index << ',' << row.status << ',' << fmt(row.loss.l1) << ',' << fmt(row.loss.l2)
        << ',' << fmt(row.loss.combined) << ',' << fmt(row.loss.alpha) << ','
        << fmt(row.relaxed_loss) << ',' << fmt(row.sum_rate) << ',' << fmt(row.t_star) << ','
        << row.outer_iterations << ',' << row.solver_iterations << ',' << fmt(row.baseline_loss)
        << ',' << row.baseline_feasible;
    for (int k = 0; k < users; ++k)
      out << ',' << (k < static_cast<int>(row.outage.size()) ? fmt(row.outage[k]) : "nan");
    for (int k = 0; k < users; ++k)
      out << ','
          << (k < static_cast<int>(row.rank_ratios.size()) ? fmt(row.rank_ratios[k]) : "nan");
    out << '\n';
  }
}

void write_aggregate_csv(const ExperimentResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto out = open_out(std::filesystem::path(out_dir) / "aggregate.csv");
  out << "metric,mean,std_error\n";
  for (const auto& m : result.aggregate)
    out << m.name << ',' << fmt(m.mean) << ',' << fmt(m.std_error) << '\n';
}

std::vector<MetricSummary> summarize(const std::vector<ResultRow>& rows, int users) {
  std::vector<MetricSummary> agg;
  if (rows.empty()) return agg;
  std::vector<double> ok_flags;
  for (const auto& r : rows) ok_flags.push_back(r.status == "ok" ? 1.0 : 0.0);
  append_metric(agg, "ok_fraction", ok_flags);

  std::vector<const ResultRow*> ok;
  for (const auto& r : rows)
    if (r.status == "ok") ok.push_back(&r);
  if (ok.empty()) return agg;

  auto collect = [&](const std::string& name, auto getter) {
    std::vector<double> values;
    for (const ResultRow* r : ok) values.push_back(getter(*r));
    append_metric(agg, name, values);
  };
  collect("combined_loss", [](const ResultRow& r) { return r.loss.combined; });
  collect("l1", [](const ResultRow& r) { return r.loss.l1; });
  collect("l2", [](const ResultRow& r) { return r.loss.l2; });
  collect("alpha", [](const ResultRow& r) { return r.loss.alpha; });
  collect("relaxed_loss", [](const ResultRow& r) { return r.relaxed_loss; });
  collect("sum_rate", [](const ResultRow& r) { return r.sum_rate; });
  collect("t_star", [](const ResultRow& r) { return r.t_star; });
  collect("outer_iterations", [](const ResultRow& r) { return double(r.outer_iterations); });
  collect("solver_iterations", [](const ResultRow& r) { return double(r.solver_iterations); });
  collect("max_rank_ratio", [](const ResultRow& r) {
    double m = 0.0;
    for (double v : r.rank_ratios) m = std::max(m, v);
    return m;
  });
  collect("baseline_loss", [](const ResultRow& r) { return r.baseline_loss; });
  for (int k = 0; k < users; ++k) {
    std::vector<double> values;
    for (const ResultRow* r : ok)
      if (k < static_cast<int>(r->outage.size())) values.push_back(r->outage[k]);
    append_metric(agg, "outage_" + std::to_string(k), values);
  }
  return agg;
}

}  // namespace dfrc

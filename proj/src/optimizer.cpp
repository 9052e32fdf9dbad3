#include "dfrc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dfrc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr int kMaxAnchorSteps = 8;  // re-anchoring budget per penalty level

class ProblemBuilder {
 public:
  explicit ProblemBuilder(int num_vars) : num_vars_(num_vars) {}

  // Constraint value sum(coeffs * x) + constant, pinned to zero.
  void add_equality(const std::vector<std::pair<int, double>>& coeffs, double constant) {
    for (const auto& [col, v] : coeffs) trip_.emplace_back(row_, col, -v);
    b_.push_back(constant);
    cones_.push_back({ConeType::zero, 1, 0});
    ++row_;
  }

  // Constraint value sum(coeffs * x) + constant, kept nonnegative.
  void add_nonneg(const std::vector<std::pair<int, double>>& coeffs, double constant) {
    for (const auto& [col, v] : coeffs) trip_.emplace_back(row_, col, -v);
    b_.push_back(constant);
    cones_.push_back({ConeType::nonneg, 1, 0});
    ++row_;
  }

  // Cone content rows given as values (coeffs, constant); row 0 is the scalar.
  void add_soc(const SocConstraint& soc) {
    if (soc.rows == 1) {
      std::vector<std::pair<int, double>> coeffs;
      for (const auto& t : soc.coeffs) coeffs.emplace_back(t.col(), t.value());
      add_nonneg(coeffs, soc.constant[0]);
      return;
    }
    for (const auto& t : soc.coeffs) trip_.emplace_back(row_ + t.row(), t.col(), -t.value());
    for (int r = 0; r < soc.rows; ++r) b_.push_back(soc.constant[r]);
    cones_.push_back({ConeType::soc, soc.rows, 0});
    row_ += soc.rows;
  }

  // ||map rows over [first_row, first_row + count)|| <= bound.
  void add_norm_bound(const LossResidualMap& map, int first_row, int count, double bound) {
    b_.push_back(bound);
    const int base = row_ + 1;
    for (int outer = 0; outer < map.a.outerSize(); ++outer) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(map.a, outer); it;
           ++it) {
        if (it.row() < first_row || it.row() >= first_row + count) continue;
        trip_.emplace_back(base + it.row() - first_row, it.col(), -it.value());
      }
    }
    for (int r = 0; r < count; ++r) b_.push_back(map.b[first_row + r]);
    cones_.push_back({ConeType::soc, count + 1, 0});
    row_ += count + 1;
  }

  // t >= ||r(x)||^2 as the cone (1 + t, 2 r(x), 1 - t).
  void add_squared_norm_epigraph(const LossResidualMap& map, int t_index) {
    const int count = static_cast<int>(map.b.size());
    trip_.emplace_back(row_, t_index, -1.0);
    b_.push_back(1.0);
    const int base = row_ + 1;
    for (int outer = 0; outer < map.a.outerSize(); ++outer)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(map.a, outer); it; ++it)
        trip_.emplace_back(base + it.row(), it.col(), -2.0 * it.value());
    for (int r = 0; r < count; ++r) b_.push_back(2.0 * map.b[r]);
    trip_.emplace_back(base + count, t_index, 1.0);
    b_.push_back(1.0);
    cones_.push_back({ConeType::soc, count + 2, 0});
    row_ += count + 2;
  }

  // svec(embedding of Hermitian block k) lies in the PSD cone.
  void add_psd_block(const VariableLayout& lay, int k) {
    const int n = lay.n;
    const int side = 2 * n;
    const int base = row_;
    auto push = [&](int r, int c, int col, double coeff) {
      trip_.emplace_back(base + svec_index(side, r, c), col, -coeff);
    };
    for (int i = 0; i < n; ++i) {
      push(i, i, lay.diag_index(k, i), 1.0);
      push(n + i, n + i, lay.diag_index(k, i), 1.0);
    }
    for (int j = 1; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        push(j, i, lay.re_index(k, i, j), kSqrt2);
        push(n + j, n + i, lay.re_index(k, i, j), kSqrt2);
        push(n + j, i, lay.im_index(k, i, j), -kSqrt2);
        push(n + i, j, lay.im_index(k, i, j), kSqrt2);
      }
    }
    const int dim = svec_dim(side);
    for (int r = 0; r < dim; ++r) b_.push_back(0.0);
    cones_.push_back({ConeType::psd, dim, side});
    row_ += dim;
  }

  ConicProblem finish(Eigen::VectorXd c, double offset = 0.0) const {
    ConicProblem problem;
    problem.num_vars = num_vars_;
    problem.c = std::move(c);
    problem.objective_offset = offset;
    problem.a.resize(row_, num_vars_);
    problem.a.setFromTriplets(trip_.begin(), trip_.end());
    problem.b = Eigen::Map<const Eigen::VectorXd>(b_.data(), b_.size());
    problem.cones = cones_;
    return problem;
  }

 private:
  int num_vars_;
  int row_ = 0;
  std::vector<Eigen::Triplet<double>> trip_;
  std::vector<double> b_;
  std::vector<ConeBlock> cones_;
};

// Internal variables carry W' = unit * W with unit = N / P_T, making the
// per-antenna rows exactly 1 and the noise sigma2' = unit * sigma2.
struct ScaledInstance {
  VariableLayout layout;
  int t_index = -1;
  int num_vars = 0;
  double unit = 1.0;
  double sigma2 = 0.0;
  ArrayConfig array;
  LossResidualMap loss_map;
  int grid_rows = 0;
  int pair_rows = 0;
};

ScaledInstance build_instance(const ArrayConfig& array, double noise_power,
                              const RadarLossConfig& loss, double power_budget, int num_blocks,
                              bool with_t_var) {
  if (power_budget <= 0.0)
    throw std::invalid_argument("optimizer: power budget must be positive");
  ScaledInstance inst;
  inst.array = array;
  inst.layout.n = array.num_antennas;
  inst.layout.num_blocks = num_blocks;
  inst.unit = array.num_antennas / power_budget;
  inst.sigma2 = noise_power * inst.unit;
  inst.t_index = with_t_var ? inst.layout.size() : -1;
  inst.num_vars = inst.layout.size() + (with_t_var ? 1 : 0);
  inst.loss_map = loss_as_conic(loss, array, inst.layout);
  inst.grid_rows = loss.spec.grid.size();
  inst.pair_rows = static_cast<int>(inst.loss_map.b.size()) - inst.grid_rows;
  return inst;
}

void add_common_rows(ProblemBuilder& builder, const ScaledInstance& inst, double alpha_min) {
  const auto& lay = inst.layout;
  for (int k = 0; k < lay.num_blocks; ++k) builder.add_psd_block(lay, k);
  for (int i = 0; i < lay.n; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    for (int k = 0; k < lay.num_blocks; ++k) coeffs.emplace_back(lay.diag_index(k, i), 1.0);
    builder.add_equality(coeffs, -1.0);
  }
  builder.add_nonneg({{lay.alpha_index(), 1.0}}, -alpha_min * inst.unit);
}

std::vector<Eigen::MatrixXcd> read_lifted(const SolveReport& report, const ScaledInstance& inst) {
  std::vector<Eigen::MatrixXcd> lifted;
  lifted.reserve(inst.layout.num_blocks);
  int offset = 0;
  const int dim = svec_dim(2 * inst.layout.n);
  for (int k = 0; k < inst.layout.num_blocks; ++k) {
    lifted.push_back(unembed_hermitian(smat(report.s.segment(offset, dim))) / inst.unit);
    offset += dim;
  }
  return lifted;
}

// Per-antenna congruence making sum_k diag(W_k) exactly P_T / N.
void polish_power(std::vector<Eigen::MatrixXcd>& lifted, double power_budget) {
  if (lifted.empty()) return;
  const int n = static_cast<int>(lifted[0].rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (const auto& w : lifted) diag += w.diagonal().real();
  const double target = power_budget / n;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = diag[i] > 0.0 ? std::sqrt(target / diag[i]) : 1.0;
  for (auto& w : lifted) w = d.asDiagonal() * w * d.asDiagonal();
}

std::vector<double> rank_ratios_of(const std::vector<Eigen::MatrixXcd>& lifted) {
  std::vector<double> ratios;
  ratios.reserve(lifted.size());
  for (const auto& w : lifted) ratios.push_back(extract_rank1(w).second);
  return ratios;
}

// Linearized rank-1 pressure: (1/zeta) sum_k Tr[(I - v_k v_k^H) W_k].
Eigen::VectorXd penalty_objective(const ScaledInstance& inst,
                                  const std::vector<Eigen::MatrixXcd>& anchors, double zeta,
                                  const Eigen::VectorXd& base) {
  Eigen::VectorXd c = base;
  const auto& lay = inst.layout;
  for (int k = 0; k < lay.num_blocks; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(require_hermitian(anchors[k], 1e-6));
    const Eigen::VectorXcd v = eig.eigenvectors().col(lay.n - 1);
    const Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(lay.n, lay.n) - v * v.adjoint();
    // The problem scales W by inst.unit and the loss by inst.unit^2; weighting the
    // scaled-variable coefficients by unit/zeta keeps the loss-to-penalty ratio of
    // the unscaled objective L + (1/zeta) P.
    c.segment(lay.block_offset(k), lay.block_params()) += trace_coeffs(g) * (inst.unit / zeta);
  }
  return c;
}

void append_trace(const std::string& path, const std::string& header, const std::string& row) {
  if (path.empty()) return;
  const bool fresh = !std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (fresh) out << header << '\n';
  out << row << '\n';
}

double max_ratio(const std::vector<double>& ratios) {
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, r);
  return worst;
}

}  // namespace

double penalty(const std::vector<Eigen::MatrixXcd>& lifted,
               const std::vector<Eigen::MatrixXcd>& anchors) {
  if (lifted.size() != anchors.size())
    throw std::invalid_argument("penalty: anchor count mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < lifted.size(); ++k) {
    if (lifted[k].rows() != anchors[k].rows())
      throw std::invalid_argument("penalty: anchor dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> w_eig(require_hermitian(lifted[k], 1e-6));
    const double nuclear = w_eig.eigenvalues().cwiseAbs().sum();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a_eig(require_hermitian(anchors[k], 1e-6));
    const int n = static_cast<int>(anchors[k].rows());
    const double top = a_eig.eigenvalues()[n - 1];
    const Eigen::VectorXcd v = a_eig.eigenvectors().col(n - 1);
    const double linear = (v.adjoint() * (lifted[k] - anchors[k]) * v).value().real();
    total += nuclear - top - linear;
  }
  return total;
}

std::pair<Eigen::VectorXcd, double> extract_rank1(const Eigen::MatrixXcd& w) {
  const Eigen::MatrixXcd wh = require_hermitian(w, 1e-6);
  const int n = static_cast<int>(wh.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(wh);
  const double lam1 = eig.eigenvalues()[n - 1];
  if (lam1 <= 0.0) return {Eigen::VectorXcd::Zero(n), 0.0};
  const double lam2 = n > 1 ? std::max(eig.eigenvalues()[n - 2], 0.0) : 0.0;
  Eigen::VectorXcd v = std::sqrt(lam1) * eig.eigenvectors().col(n - 1);
  int top = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[top])) top = i;
  if (std::abs(v[top]) > 0.0) v *= std::conj(v[top]) / std::abs(v[top]);
  return {v, lam2 / lam1};
}

DesignResult solve_radar_centric(const ChannelSet& channels, const ErrorModel& error_model,
                                 const ErrorStats& error_stats, const RadarCentricConfig& cfg) {
  const int users = channels.users();
  if (static_cast<int>(cfg.qos.size()) != users)
    throw std::invalid_argument("solve_radar_centric: qos count mismatch");
  const int blocks = std::max(users, 1);
  ScaledInstance inst =
      build_instance(cfg.array, channels.noise_power, cfg.loss, cfg.power_budget, blocks, true);

  ProblemBuilder builder(inst.num_vars);
  add_common_rows(builder, inst, cfg.alpha_min);
  builder.add_squared_norm_epigraph(inst.loss_map, inst.t_index);
  for (int k = 0; k < users; ++k)
    builder.add_soc(soc_rows(k, cfg.qos[k], channels.c_hat[k], inst.sigma2,
                             error_stats.gamma_factor, inst.layout));

  Eigen::VectorXd base = Eigen::VectorXd::Zero(inst.num_vars);
  base[inst.t_index] = 1.0;
  AdmmSolver solver(builder.finish(base), cfg.solver);

  DesignResult result;
  SolveReport report = solver.solve();
  result.solver_iterations += report.iterations;
  result.last_status = report.status;
  if (report.status != SolveStatus::optimal) {
    result.message = users > 0 ? "relaxation infeasible: QoS too aggressive"
                               : "radar-only relaxation did not converge";
    return result;
  }

  result.feasible = true;
  result.relaxed_loss = report.objective / (inst.unit * inst.unit);
  std::vector<Eigen::MatrixXcd> lifted = read_lifted(report, inst);
  result.relaxed_lifted = lifted;
  double alpha = report.x[inst.layout.alpha_index()] / inst.unit;

  if (users > 0) {
    std::vector<Eigen::MatrixXcd> anchors = lifted;
    if (!cfg.initial_anchors.empty()) {
      if (static_cast<int>(cfg.initial_anchors.size()) != users)
        throw std::invalid_argument("solve_radar_centric: initial_anchors count mismatch");
      for (int k = 0; k < users; ++k) {
        const Eigen::VectorXcd& v = cfg.initial_anchors[k];
        if (v.size() != inst.layout.n)
          throw std::invalid_argument("solve_radar_centric: initial_anchors size mismatch");
        if (v.norm() > 0.0) anchors[k] = v * v.adjoint();
      }
    }
    double zeta =
        cfg.zeta1 > 0.0 ? cfg.zeta1 : 100.0 * std::max(result.relaxed_loss, 1e-3);
    std::vector<double> ratios = rank_ratios_of(lifted);
    bool rank1 = max_ratio(ratios) < cfg.rank_tol;
    append_trace(cfg.trace_path, "outer,zeta,objective,max_rank_ratio,status",
                 "0,inf," + std::to_string(report.objective) + ',' +
                     std::to_string(max_ratio(ratios)) + ',' + to_string(report.status));

    // Each zeta level re-anchors the spectral-norm surrogate until the
    // penalized objective stops moving (or a step budget runs out); decaying
    // after a single step freezes the anchor near the relaxed solution's top
    // eigenvector and lands in poor rank-1 points.
    int outer = 0;
    int level_steps = 0;
    // Further decay below the floor only feeds overflow-scale coefficients to
    // the solver without making the iterates any more rank-1.
    const double zeta_floor = 1e-8 * zeta;
    double prev_objective = std::numeric_limits<double>::quiet_NaN();
    while (!rank1 && outer < cfg.max_outer_iters && zeta > zeta_floor) {
      ++outer;
      ++level_steps;
      solver.update_objective(penalty_objective(inst, anchors, zeta, base));
      report = solver.solve();
      result.solver_iterations += report.iterations;
      result.last_status = report.status;
      lifted = read_lifted(report, inst);
      alpha = report.x[inst.layout.alpha_index()] / inst.unit;
      anchors = lifted;
      ratios = rank_ratios_of(lifted);
      rank1 = report.status == SolveStatus::optimal && max_ratio(ratios) < cfg.rank_tol;
      append_trace(cfg.trace_path, "outer,zeta,objective,max_rank_ratio,status",
                   std::to_string(outer) + ',' + std::to_string(zeta) + ',' +
                       std::to_string(report.objective) + ',' +
                       std::to_string(max_ratio(ratios)) + ',' + to_string(report.status));
      const bool settled =
          level_steps >= kMaxAnchorSteps ||
          std::abs(report.objective - prev_objective) <=
              1e-4 * std::max(1.0, std::abs(prev_objective));
      prev_objective = report.objective;
      if (settled) {
        zeta *= cfg.mu;
        level_steps = 0;
        prev_objective = std::numeric_limits<double>::quiet_NaN();
      }
    }
    result.outer_iterations = outer;
    result.rank1_ok = rank1;
    if (!rank1) result.message = "max outer iterations without rank-1 iterates";
  } else {
    result.rank1_ok = true;
  }

  polish_power(lifted, cfg.power_budget);
  result.lifted = lifted;
  result.rank_ratios = rank_ratios_of(lifted);
  Eigen::MatrixXcd r_total = Eigen::MatrixXcd::Zero(inst.layout.n, inst.layout.n);
  for (const auto& w : lifted) r_total += w;
  alpha = std::max(alpha, cfg.alpha_min);
  result.loss = combined_loss(r_total, alpha, cfg.loss, cfg.array);

  if (users > 0) {
    for (const auto& w : lifted) result.w.push_back(extract_rank1(w).first);
    for (int k = 0; k < users; ++k)
      result.outage.push_back(empirical_outage(result.w, k, channels.c_hat[k], error_model,
                                               cfg.qos[k], channels.noise_power,
                                               cfg.outage_eval_trials,
                                               cfg.outage_eval_seed + 0x9e37 * (k + 1)));
  }
  return result;
}

std::vector<DesignResult> solve_radar_centric_sweep(const ChannelSet& channels,
                                                    const std::vector<RadarSweepStage>& stages) {
  std::vector<DesignResult> results;
  results.reserve(stages.size());
  std::vector<Eigen::VectorXcd> carry;
  for (const auto& stage : stages) {
    RadarCentricConfig cfg = stage.config;
    if (cfg.initial_anchors.empty()) cfg.initial_anchors = carry;
    DesignResult r = solve_radar_centric(channels, stage.error_model, stage.error_stats, cfg);
    if (r.feasible && r.rank1_ok && !r.w.empty()) carry = r.w;
    results.push_back(std::move(r));
  }
  for (int j = static_cast<int>(results.size()) - 2; j >= 0; --j) {
    const DesignResult& tighter = results[j + 1];
    DesignResult& own = results[j];
    if (!(tighter.feasible && tighter.rank1_ok && own.feasible && own.rank1_ok)) continue;
    if (tighter.loss.combined >= own.loss.combined) continue;
    DesignResult adopted = tighter;
    adopted.relaxed_loss = own.relaxed_loss;
    adopted.relaxed_lifted = own.relaxed_lifted;
    adopted.outer_iterations = own.outer_iterations;
    adopted.solver_iterations = own.solver_iterations;
    adopted.outage.clear();
    const auto& cfg = stages[j].config;
    for (int k = 0; k < channels.users(); ++k)
      adopted.outage.push_back(empirical_outage(adopted.w, k, channels.c_hat[k],
                                                stages[j].error_model, cfg.qos[k],
                                                channels.noise_power, cfg.outage_eval_trials,
                                                cfg.outage_eval_seed + 0x9e37 * (k + 1)));
    own = std::move(adopted);
  }
  return results;
}

DesignResult solve_comm_centric(const ChannelSet& channels, const ErrorModel& error_model,
                                const ErrorStats& error_stats, const CommCentricConfig& cfg) {
  const int users = channels.users();
  if (static_cast<int>(cfg.gamma.size()) != users || users < 1)
    throw std::invalid_argument("solve_comm_centric: gamma count mismatch");
  RadarLossConfig threshold_loss = cfg.loss;
  threshold_loss.delta = 1.0;
  ScaledInstance inst = build_instance(cfg.array, channels.noise_power, threshold_loss,
                                       cfg.power_budget, users, false);
  const double c1_bound = std::sqrt(cfg.c1) * inst.unit;
  const double c2_bound = std::sqrt(cfg.c2) * inst.unit;

  auto make_problem = [&](double t_level) {
    ProblemBuilder builder(inst.num_vars);
    add_common_rows(builder, inst, cfg.alpha_min);
    builder.add_norm_bound(inst.loss_map, 0, inst.grid_rows, c1_bound);
    if (inst.pair_rows > 0)
      builder.add_norm_bound(inst.loss_map, inst.grid_rows, inst.pair_rows, c2_bound);
    for (int k = 0; k < users; ++k)
      builder.add_soc(soc_rows(k, UserQoS{cfg.gamma[k], t_level}, channels.c_hat[k], inst.sigma2,
                               error_stats.gamma_factor, inst.layout));
    return builder.finish(Eigen::VectorXd::Zero(inst.num_vars));
  };

  DesignResult result;
  result.t_star = 0.5;
  const int max_steps =
      static_cast<int>(std::ceil(std::log2(0.5 / std::max(cfg.bisection_tol, 1e-12))));

  // Initialization phase: pure feasibility, storing the last feasible anchors.
  double lower = 0.0, upper = 0.5;
  std::vector<Eigen::MatrixXcd> anchors;
  for (int step = 0; step < max_steps && upper - lower > cfg.bisection_tol; ++step) {
    const double t = 0.5 * (lower + upper);
    AdmmSolver solver(make_problem(t), cfg.solver);
    const SolveReport report = solver.solve();
    result.solver_iterations += report.iterations;
    result.last_status = report.status;
    const bool feasible = report.status == SolveStatus::optimal;
    append_trace(cfg.trace_path, "phase,t,objective,max_rank_ratio,status",
                 "init," + std::to_string(t) + ',' + std::to_string(report.objective) + ",," +
                     to_string(report.status));
    if (feasible) {
      upper = t;
      anchors = read_lifted(report, inst);
    } else {
      lower = t;
    }
  }
  if (anchors.empty()) {
    result.message = "no feasible outage level in (0, 0.5)";
    return result;
  }

  // Main phase: penalty objective with the rank gate.
  result.relaxed_lifted = anchors;
  const std::vector<Eigen::MatrixXcd> seed_anchors = anchors;
  const Eigen::VectorXd zero_base = Eigen::VectorXd::Zero(inst.num_vars);
  std::vector<Eigen::MatrixXcd> best_lifted;
  double best_alpha = cfg.alpha_min;
  bool found = false;
  lower = 0.0;
  upper = 0.5;
  for (int step = 0; step < max_steps && upper - lower > cfg.bisection_tol; ++step) {
    const double t = 0.5 * (lower + upper);
    AdmmSolver solver(make_problem(t), cfg.solver);
    std::vector<Eigen::MatrixXcd> probe_anchors = seed_anchors;
    double zeta = cfg.zeta1 > 0.0
                      ? cfg.zeta1
                      : 100.0 * std::max(penalty(probe_anchors, probe_anchors), 1e-3);
    bool accepted = false;
    std::vector<Eigen::MatrixXcd> lifted;
    double alpha = cfg.alpha_min;
    int level_steps = 0;
    const double zeta_floor = 1e-8 * zeta;
    double prev_objective = std::numeric_limits<double>::quiet_NaN();
    for (int outer = 0; outer < cfg.max_outer_iters && zeta > zeta_floor; ++outer) {
      ++level_steps;
      solver.update_objective(penalty_objective(inst, probe_anchors, zeta, zero_base));
      const SolveReport report = solver.solve();
      result.solver_iterations += report.iterations;
      result.last_status = report.status;
      if (report.status != SolveStatus::optimal) break;
      lifted = read_lifted(report, inst);
      alpha = report.x[inst.layout.alpha_index()] / inst.unit;
      probe_anchors = lifted;
      const double ratio = max_ratio(rank_ratios_of(lifted));
      append_trace(cfg.trace_path, "phase,t,objective,max_rank_ratio,status",
                   "main," + std::to_string(t) + ',' + std::to_string(report.objective) + ',' +
                       std::to_string(ratio) + ',' + to_string(report.status));
      if (ratio < cfg.rank_tol) {
        accepted = true;
        break;
      }
      // Re-anchor at fixed zeta until the objective settles or the per-level
      // budget runs out, then tighten.
      const bool settled = level_steps >= kMaxAnchorSteps ||
                           std::abs(report.objective - prev_objective) <=
                               1e-4 * std::max(1.0, std::abs(prev_objective));
      prev_objective = report.objective;
      if (settled) {
        zeta *= cfg.mu;
        level_steps = 0;
        prev_objective = std::numeric_limits<double>::quiet_NaN();
      }
    }
    ++result.outer_iterations;
    if (accepted) {
      upper = t;
      best_lifted = lifted;
      best_alpha = alpha;
      found = true;
    } else {
      lower = t;
    }
  }

  result.t_star = upper;
  if (!found) {
    result.feasible = true;
    result.rank1_ok = false;
    result.message = "bisection found no rank-1 feasible level";
    best_lifted = anchors;
  } else {
    result.feasible = true;
    result.rank1_ok = true;
  }

  polish_power(best_lifted, cfg.power_budget);
  result.lifted = best_lifted;
  result.rank_ratios = rank_ratios_of(best_lifted);
  Eigen::MatrixXcd r_total = Eigen::MatrixXcd::Zero(inst.layout.n, inst.layout.n);
  for (const auto& w : best_lifted) r_total += w;
  result.loss = combined_loss(r_total, std::max(best_alpha, cfg.alpha_min), cfg.loss, cfg.array);
  for (const auto& w : best_lifted) result.w.push_back(extract_rank1(w).first);
  for (int k = 0; k < users; ++k)
    result.outage.push_back(empirical_outage(result.w, k, channels.c_hat[k], error_model,
                                             UserQoS{cfg.gamma[k], result.t_star},
                                             channels.noise_power, cfg.outage_eval_trials,
                                             cfg.outage_eval_seed + 0x9e37 * (k + 1)));
  return result;
}

BaselineResult randomization_baseline(const std::vector<Eigen::MatrixXcd>& relaxed,
                                      const ChannelSet& channels, const ErrorStats& error_stats,
                                      const RadarCentricConfig& cfg, int num_candidates,
                                      std::uint64_t seed, bool squared_row_norm) {
  BaselineResult result;
  result.num_candidates = num_candidates;
  const int users = static_cast<int>(relaxed.size());
  if (users == 0 || num_candidates <= 0) return result;
  const int n = static_cast<int>(relaxed[0].rows());
  if (channels.users() != users)
    throw std::invalid_argument("randomization_baseline: channel/user mismatch");

  std::vector<Eigen::MatrixXcd> factors;
  for (const auto& w : relaxed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(require_hermitian(w, 1e-6));
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factors.push_back(eig.eigenvectors() * lam.asDiagonal());
  }

  // Diagonal gamma factors admit the cheap entrywise variance form.
  bool diagonal_gamma = true;
  const auto& gf = error_stats.gamma_factor;
  for (int c = 0; c < gf.cols() && diagonal_gamma; ++c)
    for (int r = 0; r < gf.rows(); ++r)
      if (r != c && gf(r, c) != Cplx(0.0, 0.0)) {
        diagonal_gamma = false;
        break;
      }

  const Eigen::MatrixXcd steer = steering_matrix(cfg.array, cfg.loss.spec.grid);
  std::vector<Eigen::VectorXcd> doi_steer;
  for (double doi : cfg.loss.spec.dois) doi_steer.push_back(steering_vector(cfg.array, doi));
  const double phi2 = cfg.loss.spec.desired.squaredNorm();
  const double row_target = cfg.power_budget / n;
  const int m = static_cast<int>(cfg.loss.spec.dois.size());
  const double pair_weight = m >= 2 ? 2.0 / (static_cast<double>(m) * m - m) : 0.0;

  RngStream rng(seed, 0xba5e);
  double best_loss = 0.0;
  Eigen::MatrixXcd best(n, users);

  Eigen::MatrixXcd cand(n, users);
  Eigen::VectorXcd z(n);
  for (int trial = 0; trial < num_candidates; ++trial) {
    for (int k = 0; k < users; ++k) {
      for (int i = 0; i < n; ++i) z[i] = rng.cnormal();
      cand.col(k) = factors[k] * z;
    }
    bool valid = true;
    for (int i = 0; i < n && valid; ++i) {
      const double norm2 = cand.row(i).squaredNorm();
      if (norm2 <= 0.0) {
        valid = false;
        break;
      }
      const double scale =
          squared_row_norm ? std::sqrt(row_target / norm2) : row_target / std::sqrt(norm2);
      cand.row(i) *= scale;
    }
    if (!valid) continue;

    std::vector<Eigen::MatrixXcd> lifted;
    lifted.reserve(users);
    for (int k = 0; k < users; ++k) lifted.push_back(cand.col(k) * cand.col(k).adjoint());
    bool feasible = true;
    for (int k = 0; k < users && feasible; ++k) {
      const Eigen::MatrixXcd b = build_B(lifted, k, cfg.qos[k].gamma);
      const double margin =
          (channels.c_hat[k].transpose().cwiseProduct(b)).sum().real() - channels.noise_power;
      const double var = diagonal_gamma ? variance_independent(b, error_stats.sigma)
                                        : variance_dependent(b, gf);
      feasible = epsilon_of(cfg.qos[k].p_out) * margin >= std::sqrt(std::max(var, 0.0));
    }
    if (!feasible) continue;
    ++result.feasible_candidates;

    Eigen::VectorXd pattern(steer.cols());
    for (int l = 0; l < steer.cols(); ++l)
      pattern[l] = (steer.col(l).adjoint() * cand).squaredNorm();
    const double alpha =
        phi2 > 0.0 ? std::max(cfg.loss.spec.desired.dot(pattern) / phi2, cfg.alpha_min)
                   : cfg.alpha_min;
    double loss =
        (alpha * cfg.loss.spec.desired - pattern).squaredNorm() / steer.cols();
    if (pair_weight > 0.0) {
      Eigen::MatrixXcd u(m, users);
      for (int p = 0; p < m; ++p) u.row(p) = doi_steer[p].adjoint() * cand;
      double cross = 0.0;
      for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q)
          cross += std::norm(u.row(p).conjugate().cwiseProduct(u.row(q)).sum());
      loss += cfg.loss.delta * pair_weight * cross;
    }

    if (!result.found || loss < best_loss) {
      result.found = true;
      best_loss = loss;
      best = cand;
    }
  }

  if (result.found) {
    for (int k = 0; k < users; ++k) result.w.push_back(best.col(k));
    Eigen::MatrixXcd r_total = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < users; ++k) r_total += best.col(k) * best.col(k).adjoint();
    const Eigen::VectorXd pattern = beampattern(r_total, cfg.array, cfg.loss.spec.grid);
    const double alpha =
        phi2 > 0.0 ? std::max(cfg.loss.spec.desired.dot(pattern) / phi2, cfg.alpha_min)
                   : cfg.alpha_min;
    result.loss = combined_loss(r_total, alpha, cfg.loss, cfg.array);
  }
  return result;
}

}  // namespace dfrc

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/channel.hpp"
#include "dfrc/conic.hpp"
#include "dfrc/outage.hpp"
#include "dfrc/radar_loss.hpp"

namespace dfrc {

struct RadarCentricConfig {
  ArrayConfig array;
  std::vector<UserQoS> qos;       // one per user; empty = radar-only
  double power_budget = 1.0;      // P_T, watts
  RadarLossConfig loss;
  double zeta1 = 0.0;             // 0 = auto: 100 * max(initial relaxed objective, 1e-3)
  double mu = 0.5;
  double rank_tol = 1e-4;         // gate on lambda2/lambda1
  int max_outer_iters = 60;
  double alpha_min = 1e-6;
  SolveSettings solver;
  std::string trace_path;         // per-outer-iteration CSV when nonempty
  int outage_eval_trials = 1000;
  std::uint64_t outage_eval_seed = 0;
  // Optional rank-1 stage warm start, one direction per user. When set, the
  // first penalty anchor uses these instead of the relaxed solution, which
  // keeps a sweep tracking one solution branch across nearby operating points.
  std::vector<Eigen::VectorXcd> initial_anchors;
};

struct CommCentricConfig {
  ArrayConfig array;
  std::vector<double> gamma;      // per-user linear SINR thresholds
  double c1 = 0.3;
  double c2 = 5.0;
  double bisection_tol = 1e-3;
  double rank_tol = 1e-4;
  double power_budget = 1.0;
  RadarLossConfig loss;
  double mu = 0.5;
  double zeta1 = 0.0;
  int max_outer_iters = 60;
  double alpha_min = 1e-6;
  SolveSettings solver;
  std::string trace_path;
  int outage_eval_trials = 1000;
  std::uint64_t outage_eval_seed = 0;
};

struct DesignResult {
  bool feasible = false;
  bool rank1_ok = false;
  std::vector<Eigen::VectorXcd> w;
  std::vector<Eigen::MatrixXcd> lifted;
  std::vector<Eigen::MatrixXcd> relaxed_lifted;  // pre-penalty solution
  LossBreakdown loss;
  double relaxed_loss = 0.0;       // objective of the no-penalty relaxation
  std::vector<double> rank_ratios; // lambda2/lambda1 per user at the output
  std::vector<OutageReport> outage;
  double t_star = 0.0;             // comm-centric achieved max-outage level
  int outer_iterations = 0;
  long solver_iterations = 0;
  SolveStatus last_status = SolveStatus::max_iterations;
  std::string message;
};

// Sum of Tr[W_k] - v_k^H W_k v_k with v_k the top eigenvector of anchor k;
// equals ||W||_* plus the Taylor surrogate of -||W||_2 for PSD inputs.
double penalty(const std::vector<Eigen::MatrixXcd>& lifted,
               const std::vector<Eigen::MatrixXcd>& anchors);

// (w = sqrt(lambda1) v1 with largest-modulus entry rotated real positive,
//  ratio = lambda2/lambda1)
std::pair<Eigen::VectorXcd, double> extract_rank1(const Eigen::MatrixXcd& w);

DesignResult solve_radar_centric(const ChannelSet& channels, const ErrorModel& error_model,
                                 const ErrorStats& error_stats, const RadarCentricConfig& cfg);

struct RadarSweepStage {
  ErrorModel error_model;
  ErrorStats error_stats;
  RadarCentricConfig config;
};

// Solves a family of stages whose feasible sets are nested, ordered loosest to
// tightest (rising SINR threshold, falling outage budget, rising uncertainty).
// Each stage warm-starts the rank-1 refinement from the previous design, and a
// tighter stage's design replaces a looser stage's where it lands a strictly
// lower loss (nesting keeps it feasible there), so tradeoff curves track one
// solution branch instead of refinement scatter.
std::vector<DesignResult> solve_radar_centric_sweep(const ChannelSet& channels,
                                                    const std::vector<RadarSweepStage>& stages);

DesignResult solve_comm_centric(const ChannelSet& channels, const ErrorModel& error_model,
                                const ErrorStats& error_stats, const CommCentricConfig& cfg);

struct BaselineResult {
  bool found = false;
  std::vector<Eigen::VectorXcd> w;
  LossBreakdown loss;
  int feasible_candidates = 0;
  int num_candidates = 0;
};

// Gaussian randomization from relaxed covariances; per-antenna rescaling, SOC
// feasibility filter, combined-loss selection at each candidate's optimal alpha.
BaselineResult randomization_baseline(const std::vector<Eigen::MatrixXcd>& relaxed,
                                      const ChannelSet& channels, const ErrorStats& error_stats,
                                      const RadarCentricConfig& cfg, int num_candidates,
                                      std::uint64_t seed, bool squared_row_norm = true);

}  // namespace dfrc

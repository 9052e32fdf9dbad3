#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dfrc/array.hpp"
#include "dfrc/linalg.hpp"

namespace dfrc {

struct RadarLossConfig {
  double delta = 1.0;
  BeampatternSpec spec;
};

struct LossBreakdown {
  double l1 = 0.0;
  double l2 = 0.0;
  double combined = 0.0;
  double alpha = 0.0;
};

// (1/L) sum_l [alpha*phi(theta_l) - a^H(theta_l) R a(theta_l)]^2
double l1_loss(const Eigen::MatrixXcd& r, double alpha, const BeampatternSpec& spec,
               const ArrayConfig& cfg);

// (2/(M^2-M)) sum_{m<n} |a^H(doi_m) R a(doi_n)|^2; zero when M = 1.
double l2_loss(const Eigen::MatrixXcd& r, const std::vector<double>& dois,
               const ArrayConfig& cfg);

LossBreakdown combined_loss(const Eigen::MatrixXcd& r, double alpha, const RadarLossConfig& cfg,
                            const ArrayConfig& array);

// Affine residual map over the layout variables whose squared norm equals the
// combined loss at R = sum_k W_k. Weights 1/L and 2*delta/(M^2-M) are folded
// into the rows; cross-correlation terms contribute separate real and
// imaginary rows.
struct LossResidualMap {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  Eigen::VectorXd b;  // constant part (zero here; residuals are linear)

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const { return a * x + b; }
};

LossResidualMap loss_as_conic(const RadarLossConfig& cfg, const ArrayConfig& array,
                              const VariableLayout& layout);

}  // namespace dfrc

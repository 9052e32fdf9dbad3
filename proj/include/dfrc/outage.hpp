#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dfrc/channel.hpp"
#include "dfrc/linalg.hpp"

namespace dfrc {

struct UserQoS {
  double gamma = 10.0;  // linear SINR threshold
  double p_out = 0.1;   // outage budget in (0, 0.5)
};

// w_k^H C w_k / (sum_{j != k} w_j^H C w_j + sigma2)
double sinr_from_covariance(const Eigen::MatrixXcd& c, const std::vector<Eigen::VectorXcd>& w,
                            double sigma2, int k);

// B_k = (1/gamma_k) W_k - sum_{j != k} W_j
Eigen::MatrixXcd build_B(const std::vector<Eigen::MatrixXcd>& lifted, int k, double gamma_k);

// 1 / (sqrt(2) * erf_inv(1 - 2p))
double epsilon_of(double p);

// sum_ij |b_ij|^2 sigma_ij^2
double variance_independent(const Eigen::MatrixXcd& b, const Eigen::MatrixXd& sigma);

// ||gamma_factor^H vec(B)||^2
double variance_dependent(const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& gamma_factor);

// Diagonal gamma factor reproducing the independent model over vec(E).
Eigen::MatrixXcd gamma_factor_independent(const Eigen::MatrixXd& sigma);

// One second-order cone ||gamma_factor^H vec(B_k(x))|| <= eps_k (Tr[B_k(x) C_hat] - sigma2)
// over the layout variables. Row 0 is the cone scalar; rows with no
// coefficients are pruned. A single row means the cone degenerated to a
// nonnegativity bound (zero uncertainty).
struct SocConstraint {
  std::vector<Eigen::Triplet<double>> coeffs;  // (local row, layout column, value)
  Eigen::VectorXd constant;                    // per-row affine offset
  int rows = 0;
};

SocConstraint soc_rows(int k, const UserQoS& qos, const Eigen::MatrixXcd& c_hat, double sigma2,
                       const Eigen::MatrixXcd& gamma_factor, const VariableLayout& layout);

// The (N^2+1) x (N^2+1) block [[eps*z*I, gamma_factor^H b], [b^H gamma_factor, eps*z]]
// with z = Tr[B_k C_hat] - sigma2, evaluated at numeric W values. PSD iff the
// SOC above holds at the same point.
Eigen::MatrixXcd lmi_block(int k, const UserQoS& qos, const Eigen::MatrixXcd& c_hat, double sigma2,
                           const Eigen::MatrixXcd& gamma_factor,
                           const std::vector<Eigen::MatrixXcd>& lifted);

struct OutageReport {
  double fraction = 0.0;
  int trials = 0;
  double std_error = 0.0;
};

// Fraction of sampled E with Tr[B_k (C_hat + E)] < sigma2 (the SINR_k < gamma_k event).
OutageReport empirical_outage(const std::vector<Eigen::VectorXcd>& w, int k,
                              const Eigen::MatrixXcd& c_hat_k, const ErrorModel& model,
                              const UserQoS& qos_k, double sigma2, int trials,
                              std::uint64_t seed);

// duty_ratio * sum_k log2(1 + SINR_k) at the estimated covariances.
double sum_rate(const std::vector<Eigen::VectorXcd>& w, const ChannelSet& channels,
                double duty_ratio = 1.0);

// Same, with SINR averaged over sampled perturbed covariances C_hat + E.
double sum_rate_perturbed(const std::vector<Eigen::VectorXcd>& w, const ChannelSet& channels,
                          const ErrorModel& model, int trials, std::uint64_t seed,
                          double duty_ratio = 1.0);

}  // namespace dfrc

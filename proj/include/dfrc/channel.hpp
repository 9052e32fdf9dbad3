#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/linalg.hpp"
#include "dfrc/rng.hpp"

namespace dfrc {

struct ChannelSet {
  std::vector<Eigen::VectorXcd> h;
  std::vector<Eigen::MatrixXcd> c_hat;
  double noise_power = 1.0;  // sigma^2, linear watts

  int users() const { return static_cast<int>(h.size()); }
};

ChannelSet generate_rayleigh(int users, int antennas, std::uint64_t seed,
                             double noise_power = 1.0);

// C_hat = h h^H
Eigen::MatrixXcd estimate_covariance(const Eigen::VectorXcd& h);

enum class EntryLaw { uniform, gaussian, sum_of_uniforms };

struct ErrorModel {
  enum class Variant { independent, dependent };

  Variant variant = Variant::independent;
  EntryLaw entry_law = EntryLaw::gaussian;

  // Independent variant: per-entry standard deviations (symmetric, nonnegative).
  Eigen::MatrixXd sigma;

  // Dependent variant: latent correlation p_ij = exp(-lambda*|i-j|) over the
  // diagonalwise ordering of the strict upper triangle, plus a global scale
  // applied to the sampled matrix.
  double lambda_decay = 10.0;
  double scale = 1.0;

  static ErrorModel independent(int n, double sigma_e2, EntryLaw law = EntryLaw::gaussian);
  // Scale chosen so off-diagonal entries have variance sigma_e2.
  static ErrorModel dependent(double lambda, EntryLaw law, double sigma_e2);
};

// Diagonal-by-diagonal traversal: (0,0)..(n-1,n-1), then offsets j-i = 1, 2, ...
std::vector<std::pair<int, int>> diagonalwise_index(int n);

Eigen::MatrixXcd sample_error_matrix(const ErrorModel& model, int n, RngStream& rng);
Eigen::MatrixXcd sample_error_matrix(const ErrorModel& model, int n, std::uint64_t seed);

// Realized second-order statistics of the model, consumed by the outage rows.
// sigma holds per-entry standard deviations; gamma_factor is an N^2 x N^2
// factor with Gamma = gamma_factor * gamma_factor^H covering vec(E).
struct ErrorStats {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXcd gamma_factor;
};

// Independent variant: exact closed forms. Dependent variant: Monte-Carlo
// estimate over `trials` draws.
ErrorStats estimate_error_stats(const ErrorModel& model, int n, int trials, std::uint64_t seed);

// Eigendecomposition square root with eigenvalues clamped at zero.
Eigen::MatrixXcd gamma_factor_from(const Eigen::MatrixXcd& gamma, double clamp_tol = 1e-10);

struct CltReport {
  Eigen::VectorXd samples;
  double fitted_mean = 0.0;
  double fitted_std = 0.0;
  double kl_divergence = 0.0;
  Eigen::VectorXd bin_centers;
  Eigen::VectorXd empirical_density;
  Eigen::VectorXd fitted_density;
};

// Histogram KL divergence (empirical vs fitted Gaussian) of pre-drawn samples.
CltReport gaussian_fit_kl(const Eigen::VectorXd& samples, int bins);

// Statistic -Tr[B E] over `trials` draws of E.
CltReport clt_validate(const ErrorModel& model, const Eigen::MatrixXcd& b, int trials, int bins,
                       std::uint64_t seed);

}  // namespace dfrc

#include "dfrc/outage.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace dfrc {

double sinr_from_covariance(const Eigen::MatrixXcd& c, const std::vector<Eigen::VectorXcd>& w,
                            double sigma2, int k) {
  if (sigma2 <= 0.0) throw std::invalid_argument("sinr_from_covariance: noise must be positive");
  if (k < 0 || k >= static_cast<int>(w.size()))
    throw std::invalid_argument("sinr_from_covariance: user index out of range");
  const Eigen::MatrixXcd ch = require_hermitian(c);
  double interference = 0.0;
  for (int j = 0; j < static_cast<int>(w.size()); ++j) {
    if (j == k) continue;
    interference += (w[j].adjoint() * ch * w[j]).value().real();
  }
  const double signal = (w[k].adjoint() * ch * w[k]).value().real();
  return signal / (interference + sigma2);
}

Eigen::MatrixXcd build_B(const std::vector<Eigen::MatrixXcd>& lifted, int k, double gamma_k) {
  if (gamma_k <= 0.0) throw std::invalid_argument("build_B: gamma must be positive");
  if (k < 0 || k >= static_cast<int>(lifted.size()))
    throw std::invalid_argument("build_B: user index out of range");
  Eigen::MatrixXcd b = lifted[k] / gamma_k;
  for (int j = 0; j < static_cast<int>(lifted.size()); ++j) {
    if (j != k) b -= lifted[j];
  }
  return b;
}

double epsilon_of(double p) {
  if (p <= 0.0 || p >= 0.5) throw std::invalid_argument("epsilon_of: p must lie in (0, 0.5)");
  return 1.0 / (std::numbers::sqrt2 * boost::math::erf_inv(1.0 - 2.0 * p));
}

double variance_independent(const Eigen::MatrixXcd& b, const Eigen::MatrixXd& sigma) {
  if (b.rows() != sigma.rows() || b.cols() != sigma.cols())
    throw std::invalid_argument("variance_independent: size mismatch");
  return (b.cwiseAbs2().cwiseProduct(sigma.cwiseProduct(sigma))).sum();
}

double variance_dependent(const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& gamma_factor) {
  const Eigen::VectorXcd v = vec_columns(b);
  if (gamma_factor.rows() != v.size())
    throw std::invalid_argument("variance_dependent: factor size mismatch");
  return (gamma_factor.adjoint() * v).squaredNorm();
}

Eigen::MatrixXcd gamma_factor_independent(const Eigen::MatrixXd& sigma) {
  const int n = static_cast<int>(sigma.rows());
  Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(n * n, n * n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row) factor(col * n + row, col * n + row) = sigma(row, col);
  return factor;
}

SocConstraint soc_rows(int k, const UserQoS& qos, const Eigen::MatrixXcd& c_hat, double sigma2,
                       const Eigen::MatrixXcd& gamma_factor, const VariableLayout& layout) {
  const int n = layout.n;
  if (c_hat.rows() != n) throw std::invalid_argument("soc_rows: covariance size mismatch");
  if (gamma_factor.rows() != n * n)
    throw std::invalid_argument("soc_rows: gamma factor size mismatch");
  const double eps = epsilon_of(qos.p_out);
  const int params = layout.block_params();

  SocConstraint cone;
  std::vector<double> constants;

  // Row 0: eps * (Tr[B_k C_hat] - sigma2).
  const Eigen::VectorXd trace_row = trace_coeffs(c_hat);
  for (int j = 0; j < layout.num_blocks; ++j) {
    const double weight = (j == k ? 1.0 / qos.gamma : -1.0) * eps;
    const int off = layout.block_offset(j);
    for (int p = 0; p < params; ++p)
      if (trace_row[p] != 0.0) cone.coeffs.emplace_back(0, off + p, weight * trace_row[p]);
  }
  constants.push_back(-eps * sigma2);
  cone.rows = 1;

  // ||gamma_factor^H vec(B_k)|| residual rows, two per latent component.
  Eigen::MatrixXcd c_i(n, n);
  for (int i = 0; i < n * n; ++i) {
    if (gamma_factor.col(i).isZero(0.0)) continue;
    for (int col = 0; col < n; ++col)
      for (int row = 0; row < n; ++row) c_i(row, col) = std::conj(gamma_factor(col * n + row, i));
    const Eigen::VectorXcd coeffs = functional_coeffs(c_i);
    bool has_re = false, has_im = false;
    for (int p = 0; p < params; ++p) {
      if (coeffs[p].real() != 0.0) has_re = true;
      if (coeffs[p].imag() != 0.0) has_im = true;
    }
    for (int pass = 0; pass < 2; ++pass) {
      const bool real_part = pass == 0;
      if ((real_part && !has_re) || (!real_part && !has_im)) continue;
      for (int j = 0; j < layout.num_blocks; ++j) {
        const double weight = j == k ? 1.0 / qos.gamma : -1.0;
        const int off = layout.block_offset(j);
        for (int p = 0; p < params; ++p) {
          const double v = real_part ? coeffs[p].real() : coeffs[p].imag();
          if (v != 0.0) cone.coeffs.emplace_back(cone.rows, off + p, weight * v);
        }
      }
      constants.push_back(0.0);
      ++cone.rows;
    }
  }

  cone.constant = Eigen::Map<const Eigen::VectorXd>(constants.data(), constants.size());
  return cone;
}

Eigen::MatrixXcd lmi_block(int k, const UserQoS& qos, const Eigen::MatrixXcd& c_hat, double sigma2,
                           const Eigen::MatrixXcd& gamma_factor,
                           const std::vector<Eigen::MatrixXcd>& lifted) {
  const int n = static_cast<int>(c_hat.rows());
  const Eigen::MatrixXcd b = build_B(lifted, k, qos.gamma);
  const double eps = epsilon_of(qos.p_out);
  const double z = eps * ((c_hat.transpose().cwiseProduct(b)).sum().real() - sigma2);
  const Eigen::VectorXcd v = gamma_factor.adjoint() * vec_columns(b);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n * n + 1, n * n + 1);
  d.topLeftCorner(n * n, n * n) = z * Eigen::MatrixXcd::Identity(n * n, n * n);
  d.topRightCorner(n * n, 1) = v;
  d.bottomLeftCorner(1, n * n) = v.adjoint();
  d(n * n, n * n) = z;
  return d;
}

OutageReport empirical_outage(const std::vector<Eigen::VectorXcd>& w, int k,
                              const Eigen::MatrixXcd& c_hat_k, const ErrorModel& model,
                              const UserQoS& qos_k, double sigma2, int trials,
                              std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("empirical_outage: need at least 100 trials");
  if (w.empty()) throw std::invalid_argument("empirical_outage: no beamformers");
  const int n = static_cast<int>(w[0].size());
  std::vector<Eigen::MatrixXcd> lifted;
  lifted.reserve(w.size());
  for (const auto& wk : w) lifted.push_back(wk * wk.adjoint());
  const Eigen::MatrixXcd b = build_B(lifted, k, qos_k.gamma);
  const double base = (c_hat_k.transpose().cwiseProduct(b)).sum().real() - sigma2;
  const Eigen::MatrixXcd bt = b.transpose();

  RngStream rng(seed, 0xa7);
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd e = sample_error_matrix(model, n, rng);
    const double shift = bt.cwiseProduct(e).sum().real();
    if (base + shift < 0.0) ++bad;
  }
  OutageReport report;
  report.trials = trials;
  report.fraction = static_cast<double>(bad) / trials;
  report.std_error = std::sqrt(report.fraction * (1.0 - report.fraction) / trials);
  return report;
}

double sum_rate(const std::vector<Eigen::VectorXcd>& w, const ChannelSet& channels,
                double duty_ratio) {
  if (duty_ratio < 1.0) throw std::invalid_argument("sum_rate: duty ratio below 1");
  double rate = 0.0;
  for (int k = 0; k < channels.users(); ++k)
    rate += std::log2(1.0 + sinr_from_covariance(channels.c_hat[k], w, channels.noise_power, k));
  return duty_ratio * rate;
}

double sum_rate_perturbed(const std::vector<Eigen::VectorXcd>& w, const ChannelSet& channels,
                          const ErrorModel& model, int trials, std::uint64_t seed,
                          double duty_ratio) {
  if (duty_ratio < 1.0) throw std::invalid_argument("sum_rate_perturbed: duty ratio below 1");
  if (trials < 1) throw std::invalid_argument("sum_rate_perturbed: need trials");
  const int n = static_cast<int>(w.empty() ? 0 : w[0].size());
  double rate = 0.0;
  RngStream rng(seed, 0x5c7);
  for (int t = 0; t < trials; ++t) {
    double draw_rate = 0.0;
    for (int k = 0; k < channels.users(); ++k) {
      const Eigen::MatrixXcd c = channels.c_hat[k] + sample_error_matrix(model, n, rng);
      double interference = 0.0;
      for (int j = 0; j < static_cast<int>(w.size()); ++j)
        if (j != k) interference += std::max(0.0, (w[j].adjoint() * c * w[j]).value().real());
      const double signal = std::max(0.0, (w[k].adjoint() * c * w[k]).value().real());
      draw_rate += std::log2(1.0 + signal / (interference + channels.noise_power));
    }
    rate += draw_rate;
  }
  return duty_ratio * rate / trials;
}

}  // namespace dfrc

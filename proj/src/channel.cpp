#include "dfrc/channel.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace dfrc {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Lower-triangular factor of p_ab = exp(-lambda*|a-b|), cached per (lambda, dim).
const Eigen::MatrixXd& latent_factor(double lambda, int dim) {
  thread_local std::map<std::pair<double, int>, Eigen::MatrixXd> cache;
  const auto key = std::make_pair(lambda, dim);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd p(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) p(a, b) = std::exp(-lambda * std::abs(a - b));
  Eigen::LLT<Eigen::MatrixXd> llt(p);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("dependent error model: correlation factorization failed");
  return cache.emplace(key, llt.matrixL()).first->second;
}

// Zero-mean real draw with the requested variance under the given law.
double draw_with_variance(EntryLaw law, double variance, RngStream& rng) {
  if (variance == 0.0) return 0.0;
  if (law == EntryLaw::gaussian) return std::sqrt(variance) * rng.normal();
  return std::sqrt(12.0 * variance) * rng.uniform_centered();
}

}  // namespace

ChannelSet generate_rayleigh(int users, int antennas, std::uint64_t seed, double noise_power) {
  if (users < 0 || antennas < 1)
    throw std::invalid_argument("generate_rayleigh: bad dimensions");
  ChannelSet set;
  set.noise_power = noise_power;
  RngStream rng(seed, 0x8a11);
  for (int k = 0; k < users; ++k) {
    Eigen::VectorXcd h(antennas);
    for (int i = 0; i < antennas; ++i) h[i] = rng.cnormal();
    set.c_hat.push_back(estimate_covariance(h));
    set.h.push_back(std::move(h));
  }
  return set;
}

Eigen::MatrixXcd estimate_covariance(const Eigen::VectorXcd& h) {
  if (h.norm() == 0.0) throw std::invalid_argument("estimate_covariance: zero channel");
  return h * h.adjoint();
}

std::vector<std::pair<int, int>> diagonalwise_index(int n) {
  std::vector<std::pair<int, int>> order;
  order.reserve(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i) order.emplace_back(i, i);
  for (int d = 1; d < n; ++d)
    for (int i = 0; i + d < n; ++i) order.emplace_back(i, i + d);
  return order;
}

ErrorModel ErrorModel::independent(int n, double sigma_e2, EntryLaw law) {
  if (sigma_e2 < 0.0) throw std::invalid_argument("ErrorModel: negative variance");
  ErrorModel model;
  model.variant = Variant::independent;
  model.entry_law = law;
  model.sigma = Eigen::MatrixXd::Constant(n, n, std::sqrt(sigma_e2));
  return model;
}

ErrorModel ErrorModel::dependent(double lambda, EntryLaw law, double sigma_e2) {
  if (lambda <= 0.0) throw std::invalid_argument("ErrorModel: lambda must be positive");
  if (sigma_e2 < 0.0) throw std::invalid_argument("ErrorModel: negative variance");
  ErrorModel model;
  model.variant = Variant::dependent;
  model.entry_law = law;
  model.lambda_decay = lambda;
  const double base_var = law == EntryLaw::gaussian ? 1.0 : 1.0 / 6.0;
  model.scale = std::sqrt(sigma_e2 / base_var);
  return model;
}

Eigen::MatrixXcd sample_error_matrix(const ErrorModel& model, int n, RngStream& rng) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
  if (model.variant == ErrorModel::Variant::independent) {
    if (model.sigma.rows() != n || model.sigma.cols() != n)
      throw std::invalid_argument("sample_error_matrix: sigma size mismatch");
    for (int i = 0; i < n; ++i)
      e(i, i) = draw_with_variance(model.entry_law, model.sigma(i, i) * model.sigma(i, i), rng);
    for (int d = 1; d < n; ++d) {
      for (int i = 0; i + d < n; ++i) {
        const int j = i + d;
        const double half_var = 0.5 * model.sigma(i, j) * model.sigma(i, j);
        const Cplx v(draw_with_variance(model.entry_law, half_var, rng),
                     draw_with_variance(model.entry_law, half_var, rng));
        e(i, j) = v;
        e(j, i) = std::conj(v);
      }
    }
    return e;
  }

  if (model.lambda_decay <= 0.0)
    throw std::invalid_argument("sample_error_matrix: lambda must be positive");
  const int q = n * (n - 1) / 2;
  Eigen::VectorXd y_re(q), y_im(q);
  if (q > 0) {
    const Eigen::MatrixXd& l = latent_factor(model.lambda_decay, q);
    Eigen::VectorXd x_re(q), x_im(q);
    switch (model.entry_law) {
      case EntryLaw::uniform:
      case EntryLaw::gaussian:
        for (int a = 0; a < q; ++a) x_re[a] = rng.normal();
        for (int a = 0; a < q; ++a) x_im[a] = rng.normal();
        break;
      case EntryLaw::sum_of_uniforms:
        for (int a = 0; a < q; ++a) x_re[a] = rng.uniform_centered();
        for (int a = 0; a < q; ++a) x_im[a] = rng.uniform_centered();
        break;
    }
    y_re = l * x_re;
    y_im = l * x_im;
    if (model.entry_law == EntryLaw::uniform) {
      for (int a = 0; a < q; ++a) y_re[a] = normal_cdf(y_re[a]) - 0.5;
      for (int a = 0; a < q; ++a) y_im[a] = normal_cdf(y_im[a]) - 0.5;
    } else if (model.entry_law == EntryLaw::gaussian) {
      y_re *= std::numbers::sqrt2 / 2.0;
      y_im *= std::numbers::sqrt2 / 2.0;
    }
  }

  Eigen::VectorXd diag(n);
  const double diag_var = model.entry_law == EntryLaw::gaussian ? 0.5 : 1.0 / 12.0;
  for (int i = 0; i < n; ++i) diag[i] = draw_with_variance(model.entry_law, diag_var, rng);

  int a = 0;
  for (int d = 1; d < n; ++d) {
    for (int i = 0; i + d < n; ++i, ++a) {
      const Cplx v = model.scale * Cplx(y_re[a], y_im[a]);
      e(i, i + d) = v;
      e(i + d, i) = std::conj(v);
    }
  }
  for (int i = 0; i < n; ++i) e(i, i) = model.scale * diag[i];
  return e;
}

Eigen::MatrixXcd sample_error_matrix(const ErrorModel& model, int n, std::uint64_t seed) {
  RngStream rng(seed, 0xe440);
  return sample_error_matrix(model, n, rng);
}

Eigen::MatrixXcd gamma_factor_from(const Eigen::MatrixXcd& gamma, double clamp_tol) {
  const Eigen::MatrixXcd g = require_hermitian(gamma, 1e-6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("gamma_factor_from: eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues();
  const double floor = clamp_tol * std::max(lam.cwiseAbs().maxCoeff(), 0.0);
  for (int i = 0; i < lam.size(); ++i) lam[i] = lam[i] > floor ? std::sqrt(lam[i]) : 0.0;
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
}

ErrorStats estimate_error_stats(const ErrorModel& model, int n, int trials, std::uint64_t seed) {
  ErrorStats stats;
  if (model.variant == ErrorModel::Variant::independent) {
    stats.sigma = model.sigma;
    Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (int col = 0; col < n; ++col)
      for (int row = 0; row < n; ++row)
        factor(col * n + row, col * n + row) = model.sigma(row, col);
    stats.gamma_factor = std::move(factor);
    return stats;
  }

  if (trials < 100) throw std::invalid_argument("estimate_error_stats: too few trials");
  RngStream rng(seed, 0x57a7);
  Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(n * n, n * n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd e = sample_error_matrix(model, n, rng);
    const Eigen::VectorXcd v = vec_columns(e);
    gamma.noalias() += v * v.adjoint();
    second += e.cwiseAbs2();
  }
  gamma /= static_cast<double>(trials);
  second /= static_cast<double>(trials);
  stats.sigma = second.cwiseSqrt();
  stats.gamma_factor = gamma_factor_from(gamma);
  return stats;
}

CltReport gaussian_fit_kl(const Eigen::VectorXd& samples, int bins) {
  if (samples.size() < 2) throw std::invalid_argument("gaussian_fit_kl: too few samples");
  if (bins < 2) throw std::invalid_argument("gaussian_fit_kl: too few bins");
  CltReport report;
  report.samples = samples;
  const double n = static_cast<double>(samples.size());
  report.fitted_mean = samples.mean();
  report.fitted_std =
      std::sqrt((samples.array() - report.fitted_mean).square().sum() / (n - 1.0));
  if (report.fitted_std <= 0.0)
    throw std::invalid_argument("gaussian_fit_kl: degenerate statistic");

  const double lo = report.fitted_mean - 5.0 * report.fitted_std;
  const double hi = report.fitted_mean + 5.0 * report.fitted_std;
  const double width = (hi - lo) / bins;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  for (int i = 0; i < samples.size(); ++i) {
    const int bin = static_cast<int>((samples[i] - lo) / width);
    if (bin >= 0 && bin < bins) counts[bin] += 1.0;
  }

  report.bin_centers.resize(bins);
  report.empirical_density.resize(bins);
  report.fitted_density.resize(bins);
  double kl = 0.0;
  for (int bin = 0; bin < bins; ++bin) {
    const double left = lo + bin * width;
    const double right = left + width;
    report.bin_centers[bin] = 0.5 * (left + right);
    const double p_emp = counts[bin] / n;
    const double p_fit = normal_cdf((right - report.fitted_mean) / report.fitted_std) -
                         normal_cdf((left - report.fitted_mean) / report.fitted_std);
    report.empirical_density[bin] = p_emp / width;
    report.fitted_density[bin] = p_fit / width;
    if (p_emp > 0.0 && p_fit > 0.0) kl += p_emp * std::log(p_emp / p_fit);
  }
  report.kl_divergence = kl;
  return report;
}

CltReport clt_validate(const ErrorModel& model, const Eigen::MatrixXcd& b, int trials, int bins,
                       std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("clt_validate: need at least 1000 trials");
  const Eigen::MatrixXcd bh = require_hermitian(b);
  const int n = static_cast<int>(bh.rows());
  const Eigen::MatrixXcd bt = bh.transpose();
  RngStream rng(seed, 0xc17);
  Eigen::VectorXd samples(trials);
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd e = sample_error_matrix(model, n, rng);
    const Cplx trace = bt.cwiseProduct(e).sum();
    samples[t] = -trace.real();
  }
  return gaussian_fit_kl(samples, bins);
}

}  // namespace dfrc

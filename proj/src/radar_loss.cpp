#include "dfrc/radar_loss.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dfrc {

double l1_loss(const Eigen::MatrixXcd& r, double alpha, const BeampatternSpec& spec,
               const ArrayConfig& cfg) {
  if (r.rows() != cfg.num_antennas)
    throw std::invalid_argument("l1_loss: covariance size mismatch");
  const Eigen::VectorXd achieved = beampattern(r, cfg, spec.grid);
  const Eigen::VectorXd residual = alpha * spec.desired - achieved;
  return residual.squaredNorm() / static_cast<double>(spec.grid.size());
}

double l2_loss(const Eigen::MatrixXcd& r, const std::vector<double>& dois,
               const ArrayConfig& cfg) {
  const int m = static_cast<int>(dois.size());
  if (m < 1) throw std::invalid_argument("l2_loss: empty DOI list");
  if (m == 1) return 0.0;
  std::vector<Eigen::VectorXcd> a;
  a.reserve(m);
  for (double doi : dois) a.push_back(steering_vector(cfg, doi));
  double sum = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q)
      sum += std::norm((a[p].adjoint() * r * a[q]).value());
  return 2.0 * sum / (static_cast<double>(m) * m - m);
}

LossBreakdown combined_loss(const Eigen::MatrixXcd& r, double alpha, const RadarLossConfig& cfg,
                            const ArrayConfig& array) {
  LossBreakdown out;
  out.alpha = alpha;
  out.l1 = l1_loss(r, alpha, cfg.spec, array);
  out.l2 = l2_loss(r, cfg.spec.dois, array);
  out.combined = out.l1 + cfg.delta * out.l2;
  return out;
}

LossResidualMap loss_as_conic(const RadarLossConfig& cfg, const ArrayConfig& array,
                              const VariableLayout& layout) {
  if (layout.n != array.num_antennas)
    throw std::invalid_argument("loss_as_conic: layout/array size mismatch");
  const int grid_len = cfg.spec.grid.size();
  if (cfg.spec.desired.size() != grid_len)
    throw std::invalid_argument("loss_as_conic: desired length mismatch");
  const int m = static_cast<int>(cfg.spec.dois.size());
  const bool with_pairs = cfg.delta > 0.0 && m >= 2;
  const int pair_count = with_pairs ? m * (m - 1) / 2 : 0;
  const int rows = grid_len + 2 * pair_count;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(rows) * (layout.num_blocks * layout.block_params() + 1));

  const double grid_w = std::sqrt(1.0 / grid_len);
  const Eigen::MatrixXcd steer = steering_matrix(array, cfg.spec.grid);
  for (int l = 0; l < grid_len; ++l) {
    if (cfg.spec.desired[l] != 0.0)
      trip.emplace_back(l, layout.alpha_index(), grid_w * cfg.spec.desired[l]);
    const Eigen::MatrixXcd outer = steer.col(l) * steer.col(l).adjoint();
    const Eigen::VectorXd coeffs = trace_coeffs(outer);
    for (int k = 0; k < layout.num_blocks; ++k) {
      const int off = layout.block_offset(k);
      for (int p = 0; p < layout.block_params(); ++p)
        if (coeffs[p] != 0.0) trip.emplace_back(l, off + p, -grid_w * coeffs[p]);
    }
  }

  if (with_pairs) {
    const double pair_w = std::sqrt(2.0 * cfg.delta / (static_cast<double>(m) * m - m));
    std::vector<Eigen::VectorXcd> a;
    a.reserve(m);
    for (double doi : cfg.spec.dois) a.push_back(steering_vector(array, doi));
    int row = grid_len;
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        const Eigen::MatrixXcd c = a[p].conjugate() * a[q].transpose();
        const Eigen::VectorXcd coeffs = functional_coeffs(c);
        for (int k = 0; k < layout.num_blocks; ++k) {
          const int off = layout.block_offset(k);
          for (int i = 0; i < layout.block_params(); ++i) {
            if (coeffs[i].real() != 0.0) trip.emplace_back(row, off + i, pair_w * coeffs[i].real());
            if (coeffs[i].imag() != 0.0)
              trip.emplace_back(row + 1, off + i, pair_w * coeffs[i].imag());
          }
        }
        row += 2;
      }
    }
  }

  LossResidualMap map;
  map.a.resize(rows, layout.size());
  map.a.setFromTriplets(trip.begin(), trip.end());
  map.b = Eigen::VectorXd::Zero(rows);
  return map;
}

}  // namespace dfrc

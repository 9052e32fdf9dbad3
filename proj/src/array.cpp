#include "dfrc/array.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dfrc {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kSpeedOfLight = 299792458.0;
}  // namespace

ArrayConfig make_array(int num_antennas, double carrier_hz) {
  if (num_antennas < 1) throw std::invalid_argument("make_array: need at least one antenna");
  if (carrier_hz <= 0.0) throw std::invalid_argument("make_array: carrier must be positive");
  ArrayConfig cfg;
  cfg.num_antennas = num_antennas;
  cfg.carrier_hz = carrier_hz;
  cfg.wavelength = kSpeedOfLight / carrier_hz;
  cfg.spacing = cfg.wavelength / 2.0;
  return cfg;
}

AngleGrid AngleGrid::uniform(int count) {
  if (count < 2) throw std::invalid_argument("AngleGrid::uniform: need at least two points");
  AngleGrid grid;
  grid.points = Eigen::VectorXd::LinSpaced(count, -kHalfPi, kHalfPi);
  return grid;
}

Eigen::VectorXcd steering_vector(const ArrayConfig& cfg, double theta) {
  if (std::abs(theta) > kHalfPi + 1e-12)
    throw std::invalid_argument("steering_vector: angle outside [-pi/2, pi/2]");
  const double phase_step = 2.0 * std::numbers::pi / cfg.wavelength * cfg.spacing * std::sin(theta);
  Eigen::VectorXcd a(cfg.num_antennas);
  for (int n = 0; n < cfg.num_antennas; ++n)
    a[n] = std::polar(1.0, phase_step * static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd steering_matrix(const ArrayConfig& cfg, const AngleGrid& grid) {
  Eigen::MatrixXcd s(cfg.num_antennas, grid.size());
  for (int l = 0; l < grid.size(); ++l) s.col(l) = steering_vector(cfg, grid.points[l]);
  return s;
}

Eigen::VectorXd ideal_beampattern(const std::vector<double>& dois, double halfwidth,
                                  const AngleGrid& grid) {
  if (dois.empty()) throw std::invalid_argument("ideal_beampattern: empty DOI list");
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(grid.size());
  for (int l = 0; l < grid.size(); ++l) {
    for (double doi : dois) {
      if (std::abs(grid.points[l] - doi) <= halfwidth + 1e-12) {
        phi[l] = 1.0;
        break;
      }
    }
  }
  return phi;
}

BeampatternSpec make_beampattern_spec(const std::vector<double>& dois, double halfwidth,
                                      const AngleGrid& grid) {
  BeampatternSpec spec;
  spec.grid = grid;
  spec.desired = ideal_beampattern(dois, halfwidth, grid);
  spec.dois = dois;
  spec.mainlobe_halfwidth = halfwidth;
  return spec;
}

Eigen::VectorXd beampattern(const Eigen::MatrixXcd& r, const ArrayConfig& cfg,
                            const AngleGrid& grid) {
  if (r.rows() != cfg.num_antennas || r.cols() != cfg.num_antennas)
    throw std::invalid_argument("beampattern: covariance size mismatch");
  const Eigen::MatrixXcd rh = require_hermitian(r);
  const Eigen::MatrixXcd s = steering_matrix(cfg, grid);
  Eigen::VectorXd out(grid.size());
  for (int l = 0; l < grid.size(); ++l)
    out[l] = (s.col(l).adjoint() * rh * s.col(l)).value().real();
  return out;
}

}  // namespace dfrc

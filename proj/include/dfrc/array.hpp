#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dfrc/linalg.hpp"

namespace dfrc {

struct ArrayConfig {
  int num_antennas = 10;
  double wavelength = 0.0599584916;  // c / 5 GHz
  double spacing = 0.0299792458;     // half wavelength
  double carrier_hz = 5e9;
};

// Half-wavelength ULA at the given carrier.
ArrayConfig make_array(int num_antennas, double carrier_hz = 5e9);

struct AngleGrid {
  Eigen::VectorXd points;  // radians, strictly increasing within [-pi/2, pi/2]

  static AngleGrid uniform(int count);
  int size() const { return static_cast<int>(points.size()); }
};

struct BeampatternSpec {
  AngleGrid grid;
  Eigen::VectorXd desired;          // phi(theta_l), nonnegative
  std::vector<double> dois;         // radians
  double mainlobe_halfwidth = 0.0;  // radians
};

Eigen::VectorXcd steering_vector(const ArrayConfig& cfg, double theta);

// Column l is a(theta_l); N x L.
Eigen::MatrixXcd steering_matrix(const ArrayConfig& cfg, const AngleGrid& grid);

Eigen::VectorXd ideal_beampattern(const std::vector<double>& dois, double halfwidth,
                                  const AngleGrid& grid);

BeampatternSpec make_beampattern_spec(const std::vector<double>& dois, double halfwidth,
                                      const AngleGrid& grid);

// a^H(theta_l) R a(theta_l) per grid point; R Hermitian PSD within tolerance.
Eigen::VectorXd beampattern(const Eigen::MatrixXcd& r, const ArrayConfig& cfg,
                            const AngleGrid& grid);

}  // namespace dfrc

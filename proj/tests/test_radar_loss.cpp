#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dfrc/radar_loss.hpp"
#include "dfrc/rng.hpp"

using namespace dfrc;

namespace {

Eigen::MatrixXcd random_psd(int n, std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::MatrixXcd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.cnormal();
  return g * g.adjoint();
}

BeampatternSpec small_spec(int grid_points, std::vector<double> dois, double halfwidth) {
  return make_beampattern_spec(dois, halfwidth, AngleGrid::uniform(grid_points));
}

}  // namespace

TEST_CASE("l1 loss vanishes when the pattern matches alpha*phi exactly") {
  const ArrayConfig cfg = make_array(3);
  const BeampatternSpec spec = small_spec(5, {0.0}, 10.0);  // phi == 1 nowhere except near 0
  // phi is 1 only where |theta| <= 10 rad, i.e. everywhere here; R = (alpha/3) I matches.
  const double alpha = 2.0;
  const Eigen::MatrixXcd r = (alpha / 3.0) * Eigen::MatrixXcd::Identity(3, 3);
  CHECK(l1_loss(r, alpha, spec, cfg) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("l1 loss is zero for phi = 0 and R = 0") {
  const ArrayConfig cfg = make_array(4);
  BeampatternSpec spec = small_spec(7, {0.0}, 0.0);
  spec.desired.setZero();
  CHECK(l1_loss(Eigen::MatrixXcd::Zero(4, 4), 3.7, spec, cfg) == doctest::Approx(0.0));
}

TEST_CASE("l1 loss equals the per-angle residual average") {
  const ArrayConfig cfg = make_array(2);
  const BeampatternSpec spec = small_spec(3, {0.0}, 0.2);
  const Eigen::MatrixXcd r = random_psd(2, 11);
  const double alpha = 1.0;
  double acc = 0.0;
  for (int l = 0; l < spec.grid.size(); ++l) {
    const Eigen::VectorXcd a = steering_vector(cfg, spec.grid.points[l]);
    const double residual = alpha * spec.desired[l] - (a.adjoint() * r * a).value().real();
    acc += residual * residual;
  }
  acc /= spec.grid.size();
  CHECK(l1_loss(r, alpha, spec, cfg) == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("l2 loss is zero for a single DOI") {
  const ArrayConfig cfg = make_array(4);
  CHECK(l2_loss(random_psd(4, 3), {0.3}, cfg) == doctest::Approx(0.0));
}

TEST_CASE("l2 loss is zero for orthogonal steering directions") {
  const ArrayConfig cfg = make_array(2);
  const double t1 = 0.0, t2 = std::numbers::pi / 2;  // a = [1,1] vs [1,-1]
  const Eigen::VectorXcd a1 = steering_vector(cfg, t1);
  const Eigen::MatrixXcd r = a1 * a1.adjoint();
  CHECK(l2_loss(r, {t1, t2}, cfg) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("l2 loss matches brute-force pair enumeration") {
  const ArrayConfig cfg = make_array(4);
  const std::vector<double> dois = {-0.5, 0.1, 0.8};
  const Eigen::MatrixXcd r = random_psd(4, 29);
  double acc = 0.0;
  for (std::size_t m = 0; m < dois.size(); ++m) {
    for (std::size_t q = m + 1; q < dois.size(); ++q) {
      const Eigen::VectorXcd am = steering_vector(cfg, dois[m]);
      const Eigen::VectorXcd aq = steering_vector(cfg, dois[q]);
      acc += std::norm((am.adjoint() * r * aq).value());
    }
  }
  const int m = 3;
  acc *= 2.0 / (m * m - m);
  CHECK(l2_loss(r, dois, cfg) == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("l2 loss is symmetric under DOI relabeling") {
  const ArrayConfig cfg = make_array(3);
  const Eigen::MatrixXcd r = random_psd(3, 101);
  CHECK(l2_loss(r, {-0.4, 0.2, 0.9}, cfg) ==
        doctest::Approx(l2_loss(r, {0.9, -0.4, 0.2}, cfg)).epsilon(1e-13));
}

TEST_CASE("combined loss composes l1 and l2 with weight delta") {
  const ArrayConfig cfg = make_array(4);
  RadarLossConfig loss;
  loss.spec = small_spec(9, {-0.3, 0.4}, 0.1);
  loss.delta = 2.5;
  const Eigen::MatrixXcd r = random_psd(4, 59);
  const double alpha = 1.3;
  const LossBreakdown out = combined_loss(r, alpha, loss, cfg);
  CHECK(out.l1 == doctest::Approx(l1_loss(r, alpha, loss.spec, cfg)));
  CHECK(out.l2 == doctest::Approx(l2_loss(r, loss.spec.dois, cfg)));
  CHECK(out.combined == doctest::Approx(out.l1 + 2.5 * out.l2));
  CHECK(out.alpha == doctest::Approx(alpha));

  loss.delta = 0.0;
  CHECK(combined_loss(r, alpha, loss, cfg).combined == doctest::Approx(out.l1));
}

TEST_CASE("conic residual map reproduces the combined loss on random points") {
  const ArrayConfig cfg = make_array(3);
  RadarLossConfig loss;
  loss.spec = small_spec(11, {-0.5, 0.3}, 0.15);
  loss.delta = 1.7;
  VariableLayout lay;
  lay.n = 3;
  lay.num_blocks = 2;
  const LossResidualMap map = loss_as_conic(loss, cfg, lay);
  REQUIRE(map.a.rows() == 11 + 2);  // grid rows + (re, im) for the single pair
  REQUIRE(map.a.cols() == lay.size());

  RngStream rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(lay.size());
    const Eigen::MatrixXcd w0 = random_psd(3, 1000 + trial);
    const Eigen::MatrixXcd w1 = random_psd(3, 2000 + trial);
    params_from_hermitian(w0, lay, 0, x);
    params_from_hermitian(w1, lay, 1, x);
    const double alpha = 0.2 + rng.uniform();
    x[lay.alpha_index()] = alpha;
    const double quadratic = map.evaluate(x).squaredNorm();
    const double direct = combined_loss(w0 + w1, alpha, loss, cfg).combined;
    CHECK(quadratic == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("conic residual map is identically zero at zero variables with phi = 0") {
  const ArrayConfig cfg = make_array(2);
  RadarLossConfig loss;
  loss.spec = small_spec(5, {0.0}, 0.1);
  loss.spec.desired.setZero();
  VariableLayout lay;
  lay.n = 2;
  lay.num_blocks = 1;
  const LossResidualMap map = loss_as_conic(loss, cfg, lay);
  CHECK(map.evaluate(Eigen::VectorXd::Zero(lay.size())).norm() == doctest::Approx(0.0));
}

TEST_CASE("single grid point residual is linear in alpha and W") {
  const ArrayConfig cfg = make_array(2);
  RadarLossConfig loss;
  loss.delta = 0.0;
  AngleGrid grid;
  grid.points = Eigen::VectorXd::Constant(1, 0.25);
  loss.spec = make_beampattern_spec({0.25}, 0.1, grid);
  VariableLayout lay;
  lay.n = 2;
  lay.num_blocks = 1;
  const LossResidualMap map = loss_as_conic(loss, cfg, lay);
  REQUIRE(map.a.rows() == 1);

  Eigen::VectorXd x(lay.size());
  const Eigen::MatrixXcd w = random_psd(2, 999);
  params_from_hermitian(w, lay, 0, x);
  x[lay.alpha_index()] = 1.9;
  const Eigen::VectorXcd a = steering_vector(cfg, 0.25);
  const double expected = 1.9 * 1.0 - (a.adjoint() * w * a).value().real();
  // Row weight is sqrt(1/L) = 1 here.
  CHECK(map.evaluate(x)[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("combined loss is midpoint-convex in the lifted variables") {
  const ArrayConfig cfg = make_array(3);
  RadarLossConfig loss;
  loss.spec = small_spec(7, {-0.2, 0.6}, 0.1);
  loss.delta = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd ra = random_psd(3, 300 + trial);
    const Eigen::MatrixXcd rb = random_psd(3, 400 + trial);
    RngStream rng(500 + trial);
    const double aa = 0.5 + rng.uniform(), ab = 0.5 + rng.uniform();
    const double mid = combined_loss(0.5 * (ra + rb), 0.5 * (aa + ab), loss, cfg).combined;
    const double ends = 0.5 * combined_loss(ra, aa, loss, cfg).combined +
                        0.5 * combined_loss(rb, ab, loss, cfg).combined;
    CHECK(mid <= ends + 1e-10);
  }
}

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dfrc {

using Cplx = std::complex<double>;

// Real parameterization of a set of Hermitian N x N matrix variables plus one
// trailing scalar (the beampattern scale alpha). Block k occupies n*n reals:
// the n diagonal entries first, then (re, im) pairs for the strict upper
// triangle ordered (0,1), (0,2), (1,2), (0,3), ...
struct VariableLayout {
  int n = 0;
  int num_blocks = 0;

  int block_params() const { return n * n; }
  int block_offset(int k) const { return k * block_params(); }
  int diag_index(int k, int i) const { return block_offset(k) + i; }
  int pair_rank(int i, int j) const { return j * (j - 1) / 2 + i; }
  int re_index(int k, int i, int j) const { return block_offset(k) + n + 2 * pair_rank(i, j); }
  int im_index(int k, int i, int j) const { return block_offset(k) + n + 2 * pair_rank(i, j) + 1; }
  int alpha_index() const { return num_blocks * block_params(); }
  int size() const { return num_blocks * block_params() + 1; }
};

inline Eigen::MatrixXcd hermitian_from_params(const Eigen::VectorXd& x, const VariableLayout& lay,
                                              int k) {
  Eigen::MatrixXcd w(lay.n, lay.n);
  for (int i = 0; i < lay.n; ++i) w(i, i) = x[lay.diag_index(k, i)];
  for (int j = 1; j < lay.n; ++j) {
    for (int i = 0; i < j; ++i) {
      const Cplx v(x[lay.re_index(k, i, j)], x[lay.im_index(k, i, j)]);
      w(i, j) = v;
      w(j, i) = std::conj(v);
    }
  }
  return w;
}

inline void params_from_hermitian(const Eigen::MatrixXcd& w, const VariableLayout& lay, int k,
                                  Eigen::VectorXd& x) {
  for (int i = 0; i < lay.n; ++i) x[lay.diag_index(k, i)] = w(i, i).real();
  for (int j = 1; j < lay.n; ++j) {
    for (int i = 0; i < j; ++i) {
      x[lay.re_index(k, i, j)] = w(i, j).real();
      x[lay.im_index(k, i, j)] = w(i, j).imag();
    }
  }
}

// Coefficients of the complex-linear functional H -> sum_ij C_ij H_ij over the
// real parameters of one Hermitian block, in block-local ordering. Entry p of
// the result multiplies parameter p.
inline Eigen::VectorXcd functional_coeffs(const Eigen::MatrixXcd& c) {
  const int n = static_cast<int>(c.rows());
  Eigen::VectorXcd out(n * n);
  for (int i = 0; i < n; ++i) out[i] = c(i, i);
  int p = n;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      out[p++] = c(i, j) + c(j, i);
      out[p++] = Cplx(0.0, 1.0) * (c(i, j) - c(j, i));
    }
  }
  return out;
}

// Coefficients of H -> Tr[G H] for Hermitian G (a real functional).
inline Eigen::VectorXd trace_coeffs(const Eigen::MatrixXcd& g) {
  const int n = static_cast<int>(g.rows());
  Eigen::VectorXd out(n * n);
  for (int i = 0; i < n; ++i) out[i] = g(i, i).real();
  int p = n;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      out[p++] = 2.0 * g(i, j).real();
      out[p++] = 2.0 * g(i, j).imag();
    }
  }
  return out;
}

// Real-symmetric embedding of a Hermitian matrix W = X + iY as [[X, -Y], [Y, X]].
inline Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& w) {
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = w.real();
  s.bottomRightCorner(n, n) = w.real();
  s.topRightCorner(n, n) = -w.imag();
  s.bottomLeftCorner(n, n) = w.imag();
  return s;
}

inline Eigen::MatrixXcd unembed_hermitian(const Eigen::MatrixXd& s) {
  const int n = static_cast<int>(s.rows()) / 2;
  const Eigen::MatrixXd x = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  const Eigen::MatrixXd y = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  Eigen::MatrixXcd w = Eigen::MatrixXd(0.5 * (x + x.transpose())).cast<Cplx>();
  w.imag() = 0.5 * (y - y.transpose());
  return w;
}

inline Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}

// Accepts nearly-Hermitian input (asymmetry below tol, Frobenius-relative) and
// returns the Hermitian part; otherwise throws.
inline Eigen::MatrixXcd require_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-8) {
  if (m.rows() != m.cols()) throw std::invalid_argument("require_hermitian: matrix not square");
  const double scale = std::max(m.norm(), 1e-300);
  const double asym = (m - m.adjoint()).norm() / scale;
  if (asym > tol) throw std::invalid_argument("require_hermitian: asymmetry above tolerance");
  return hermitian_part(m);
}

inline Eigen::VectorXcd vec_columns(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace dfrc

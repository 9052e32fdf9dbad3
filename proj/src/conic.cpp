#include "dfrc/conic.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dfrc {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

void ConicProblem::validate() const {
  if (c.size() != num_vars) throw std::invalid_argument("ConicProblem: objective size mismatch");
  if (a.cols() != num_vars) throw std::invalid_argument("ConicProblem: column count mismatch");
  if (a.rows() != b.size()) throw std::invalid_argument("ConicProblem: row count mismatch");
  int total = 0;
  for (const auto& cone : cones) {
    if (cone.dim <= 0) throw std::invalid_argument("ConicProblem: nonpositive cone dimension");
    if (cone.type == ConeType::psd && cone.dim != svec_dim(cone.psd_side))
      throw std::invalid_argument("ConicProblem: psd block dimension mismatch");
    total += cone.dim;
  }
  if (total != rows()) throw std::invalid_argument("ConicProblem: cone dimensions do not sum to rows");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_suspected: return "infeasible_suspected";
    case SolveStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

int svec_dim(int side) { return side * (side + 1) / 2; }

int svec_index(int side, int row, int col) {
  return col * side - col * (col - 1) / 2 + (row - col);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& s) {
  const int m = static_cast<int>(s.rows());
  Eigen::VectorXd v(svec_dim(m));
  int idx = 0;
  for (int c = 0; c < m; ++c) {
    v[idx++] = s(c, c);
    for (int r = c + 1; r < m; ++r) v[idx++] = kSqrt2 * s(r, c);
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  const int len = static_cast<int>(v.size());
  const int m = static_cast<int>(std::round((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  if (svec_dim(m) != len) throw std::invalid_argument("smat: not a triangular length");
  Eigen::MatrixXd s(m, m);
  int idx = 0;
  for (int c = 0; c < m; ++c) {
    s(c, c) = v[idx++];
    for (int r = c + 1; r < m; ++r) {
      const double value = v[idx++] / kSqrt2;
      s(r, c) = value;
      s(c, r) = value;
    }
  }
  return s;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& sym) {
  const Eigen::MatrixXd s = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() == Eigen::Success) {
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  }
  // The tridiagonal QL iteration can fail to converge on rare benign inputs.
  // Recover the clamp from an SVD: a symmetric matrix's positive eigenvalues
  // are the singular values whose left and right vectors agree in sign.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const Eigen::VectorXd u = svd.matrixU().col(i);
    if (u.dot(svd.matrixV().col(i)) > 0.0)
      out.noalias() += svd.singularValues()[i] * u * u.transpose();
  }
  return out;
}

std::pair<Eigen::VectorXd, double> project_soc(const Eigen::VectorXd& x, double t) {
  const double nx = x.norm();
  if (nx <= t) return {x, t};
  if (nx <= -t) return {Eigen::VectorXd::Zero(x.size()), 0.0};
  const double s = 0.5 * (nx + t);
  return {x * (s / nx), s};
}

AdmmSolver::AdmmSolver(ConicProblem problem, SolveSettings settings)
    : problem_(std::move(problem)), settings_(settings) {
  problem_.validate();
  problem_.a.makeCompressed();
  equilibrate();

  Eigen::MatrixXd normal = Eigen::MatrixXd(a_.transpose() * a_);
  const double reg = 1e-9 * (normal.trace() / std::max(1, problem_.num_vars) + 1.0);
  normal.diagonal().array() += reg;
  normal_ldlt_.compute(normal);
  if (normal_ldlt_.info() != Eigen::Success)
    throw std::runtime_error("AdmmSolver: normal-equation factorization failed");

  c_ = col_scale_.cwiseProduct(problem_.c);
  rho_ = settings_.rho;
  reset_state();
}

void AdmmSolver::equilibrate() {
  const int m = problem_.rows();
  const int n = problem_.num_vars;
  row_scale_ = Eigen::VectorXd::Ones(m);
  col_scale_ = Eigen::VectorXd::Ones(n);
  a_ = problem_.a;

  Eigen::VectorXd row_norm(m), col_norm(n);
  for (int pass = 0; pass < 10; ++pass) {
    row_norm.setZero();
    col_norm.setZero();
    for (int outer = 0; outer < a_.outerSize(); ++outer) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, outer); it; ++it) {
        const double v = std::abs(it.value());
        row_norm[it.row()] = std::max(row_norm[it.row()], v);
        col_norm[it.col()] = std::max(col_norm[it.col()], v);
      }
    }
    // Rows of one SOC/PSD block share a single scale to keep the cone invariant.
    int offset = 0;
    for (const auto& cone : problem_.cones) {
      if (cone.type == ConeType::soc || cone.type == ConeType::psd) {
        const double block = row_norm.segment(offset, cone.dim).maxCoeff();
        row_norm.segment(offset, cone.dim).setConstant(block);
      }
      offset += cone.dim;
    }
    Eigen::VectorXd dr(m), dc(n);
    for (int i = 0; i < m; ++i) dr[i] = row_norm[i] > 1e-12 ? 1.0 / std::sqrt(row_norm[i]) : 1.0;
    for (int j = 0; j < n; ++j) dc[j] = col_norm[j] > 1e-12 ? 1.0 / std::sqrt(col_norm[j]) : 1.0;
    for (int outer = 0; outer < a_.outerSize(); ++outer)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, outer); it; ++it)
        it.valueRef() *= dr[it.row()] * dc[it.col()];
    row_scale_ = row_scale_.cwiseProduct(dr);
    col_scale_ = col_scale_.cwiseProduct(dc);
  }
  b_ = row_scale_.cwiseProduct(problem_.b);
}

void AdmmSolver::project_cones(Eigen::VectorXd& s) const {
  int offset = 0;
  for (const auto& cone : problem_.cones) {
    switch (cone.type) {
      case ConeType::zero:
        s.segment(offset, cone.dim).setZero();
        break;
      case ConeType::nonneg:
        s.segment(offset, cone.dim) = s.segment(offset, cone.dim).cwiseMax(0.0);
        break;
      case ConeType::soc: {
        const double t = s[offset];
        const Eigen::VectorXd x = s.segment(offset + 1, cone.dim - 1);
        auto [px, pt] = project_soc(x, t);
        s[offset] = pt;
        s.segment(offset + 1, cone.dim - 1) = px;
        break;
      }
      case ConeType::psd: {
        const Eigen::MatrixXd mat = smat(s.segment(offset, cone.dim));
        s.segment(offset, cone.dim) = svec(project_psd(mat));
        break;
      }
    }
    offset += cone.dim;
  }
}

double AdmmSolver::unscaled_norm_rows(const Eigen::VectorXd& v) const {
  return v.cwiseQuotient(row_scale_).norm();
}

double AdmmSolver::unscaled_norm_cols(const Eigen::VectorXd& v) const {
  return v.cwiseQuotient(col_scale_).norm();
}

void AdmmSolver::reset_state() {
  x_ = Eigen::VectorXd::Zero(problem_.num_vars);
  s_ = Eigen::VectorXd::Zero(problem_.rows());
  u_ = Eigen::VectorXd::Zero(problem_.rows());
  warm_ = false;
}

void AdmmSolver::update_objective(const Eigen::VectorXd& c, double offset) {
  if (c.size() != problem_.num_vars)
    throw std::invalid_argument("update_objective: size mismatch");
  problem_.c = c;
  problem_.objective_offset = offset;
  c_ = col_scale_.cwiseProduct(c);
  warm_ = true;
}

SolveReport AdmmSolver::solve() {
  const int m = problem_.rows();
  const int n = problem_.num_vars;
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double alpha = settings_.over_relaxation;
  const Eigen::SparseMatrix<double> at = a_.transpose();
  const double b_norm = unscaled_norm_rows(b_);

  std::ofstream trace;
  if (!settings_.trace_path.empty()) {
    const bool fresh = !std::ifstream(settings_.trace_path).good();
    trace.open(settings_.trace_path, std::ios::app);
    if (fresh) trace << "iteration,primal_residual,dual_residual,rho,objective\n";
  }

  Eigen::VectorXd ax(m), h(m), s_prev(m), rhs(n), work_m(m), work_n(n);
  double stall_rp = -1.0, stall_u = -1.0;
  SolveReport report;
  report.status = SolveStatus::max_iterations;

  int iter = 0;
  while (iter < settings_.max_iters) {
    ++iter;
    rhs.noalias() = at * (b_ - s_ - u_);
    rhs -= c_ / rho_;
    x_ = normal_ldlt_.solve(rhs);
    ax.noalias() = a_ * x_;
    h = alpha * ax + (1.0 - alpha) * (b_ - s_);
    s_prev = s_;
    s_ = b_ - h - u_;
    project_cones(s_);
    u_ += h + s_ - b_;

    const bool check = iter % settings_.check_every == 0 || iter == settings_.max_iters;
    if (!check) continue;

    work_m = ax + s_ - b_;
    const double rp = unscaled_norm_rows(work_m);
    work_n.noalias() = at * (s_ - s_prev);
    const double rd = rho_ * unscaled_norm_cols(work_n);
    const double ax_norm = unscaled_norm_rows(ax);
    const double s_norm = unscaled_norm_rows(s_);
    work_n.noalias() = at * u_;
    const double aty_norm = rho_ * unscaled_norm_cols(work_n);

    // Residuals are normalized so that status depends on rel <= tol directly,
    // and the reported values are comparable against the configured tolerances.
    const double pri_scale = sqrt_m + std::max({ax_norm, s_norm, b_norm});
    const double dual_scale = sqrt_n + aty_norm;
    const double rp_rel = rp / pri_scale;
    const double rd_rel = rd / dual_scale;

    if (trace.is_open() && iter % settings_.trace_every == 0) {
      const double obj = problem_.c.dot(col_scale_.cwiseProduct(x_)) + problem_.objective_offset;
      trace << iter << ',' << rp_rel << ',' << rd_rel << ',' << rho_ << ',' << obj << '\n';
    }

    if (rp_rel <= settings_.tol_primal && rd_rel <= settings_.tol_dual) {
      report.status = SolveStatus::optimal;
      report.primal_residual = rp_rel;
      report.dual_residual = rd_rel;
      break;
    }

    if (iter % settings_.stall_window == 0) {
      const double u_norm = u_.norm();
      if (stall_rp >= 0.0 && rp_rel > 10.0 * settings_.tol_primal) {
        const double rel_change = std::abs(rp_rel - stall_rp) / std::max(stall_rp, 1e-12);
        if (rel_change < settings_.stall_tol && u_norm > 1.1 * stall_u) {
          report.status = SolveStatus::infeasible_suspected;
          report.primal_residual = rp_rel;
          report.dual_residual = rd_rel;
          break;
        }
      }
      stall_rp = rp_rel;
      stall_u = u_norm;
    }

    if (settings_.adaptive_rho && iter % 100 == 0 && iter < settings_.max_iters) {
      if (rp > 10.0 * rd && rho_ < 1e6) {
        rho_ *= 2.0;
        u_ *= 0.5;
      } else if (rd > 10.0 * rp && rho_ > 1e-6) {
        rho_ *= 0.5;
        u_ *= 2.0;
      }
    }

    report.primal_residual = rp_rel;
    report.dual_residual = rd_rel;
  }

  report.iterations = iter;
  report.x = col_scale_.cwiseProduct(x_);
  report.s = s_.cwiseQuotient(row_scale_);
  report.objective = problem_.c.dot(report.x) + problem_.objective_offset;
  warm_ = true;
  return report;
}

SolveReport solve(const ConicProblem& problem, const SolveSettings& settings) {
  AdmmSolver solver(problem, settings);
  return solver.solve();
}

}  // namespace dfrc

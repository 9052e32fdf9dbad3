#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dfrc {

enum class ConeType { zero, nonneg, soc, psd };

struct ConeBlock {
  ConeType type = ConeType::zero;
  int dim = 0;        // number of rows this block spans
  int psd_side = 0;   // matrix side for psd blocks; dim = side*(side+1)/2
};

// minimize c^T x  subject to  A x + s = b,  s in K (product of the cone blocks,
// in row order).
struct ConicProblem {
  int num_vars = 0;
  Eigen::VectorXd c;
  double objective_offset = 0.0;
  Eigen::SparseMatrix<double> a;
  Eigen::VectorXd b;
  std::vector<ConeBlock> cones;

  int rows() const { return static_cast<int>(b.size()); }
  void validate() const;  // throws std::invalid_argument on inconsistency
};

struct SolveSettings {
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  int max_iters = 50000;
  double rho = 1.0;
  bool adaptive_rho = true;
  double over_relaxation = 1.6;
  int check_every = 25;
  int stall_window = 5000;
  double stall_tol = 1e-3;
  std::string trace_path;  // per-iteration CSV dump when nonempty
  int trace_every = 50;
};

enum class SolveStatus { optimal, infeasible_suspected, max_iterations };

struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  double objective = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  // Normalized residuals; optimal status means both are at or below the
  // corresponding tolerances.
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

const char* to_string(SolveStatus status);

// Symmetric-matrix vectorization with sqrt(2) off-diagonal scaling, so
// dot(svec(A), svec(B)) = Tr[A B]. Column-major lower triangle.
int svec_dim(int side);
int svec_index(int side, int row, int col);  // requires row >= col
Eigen::VectorXd svec(const Eigen::MatrixXd& s);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& sym);
std::pair<Eigen::VectorXd, double> project_soc(const Eigen::VectorXd& x, double t);

// ADMM operator-splitting solver. The factorization of A^T A is cached, so
// repeated solves after update_objective (same constraints, new objective)
// warm-start from the previous iterates without refactorizing.
class AdmmSolver {
 public:
  AdmmSolver(ConicProblem problem, SolveSettings settings = {});

  SolveReport solve();
  void update_objective(const Eigen::VectorXd& c, double offset = 0.0);
  void reset_state();

  const ConicProblem& problem() const { return problem_; }

 private:
  void equilibrate();
  void project_cones(Eigen::VectorXd& s) const;
  double unscaled_norm_rows(const Eigen::VectorXd& v) const;
  double unscaled_norm_cols(const Eigen::VectorXd& v) const;

  ConicProblem problem_;
  SolveSettings settings_;
  Eigen::SparseMatrix<double> a_;      // equilibrated
  Eigen::VectorXd b_, c_;              // equilibrated
  Eigen::VectorXd row_scale_, col_scale_;
  Eigen::LDLT<Eigen::MatrixXd> normal_ldlt_;
  Eigen::VectorXd x_, s_, u_;
  double rho_ = 1.0;
  bool warm_ = false;
};

SolveReport solve(const ConicProblem& problem, const SolveSettings& settings = {});

}  // namespace dfrc

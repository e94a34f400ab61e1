#pragma once

// Dense semidefinite programs in linear-matrix-inequality form:
//
//   minimize    c^T y
//   subject to  F0_b + sum_i y_i F_ib  >= 0   for every block b
//               a_k^T y = b_k
//
// The reference solver is a primal-dual interior-point method (HKM search
// direction, Mehrotra predictor-corrector, infeasible start). Equalities are
// eliminated up front by restricting y to an orthonormal parametrization of
// the affine solution set.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dccm::sdp {

struct LmiTerm {
  int var = 0;
  Eigen::SparseMatrix<double> matrix;
};

struct LmiBlock {
  Eigen::MatrixXd constant;
  // Only variables with a nonzero coefficient matrix are listed.
  std::vector<LmiTerm> terms;

  explicit LmiBlock(Eigen::MatrixXd f0 = {}) : constant(std::move(f0)) {}
  int dim() const { return static_cast<int>(constant.rows()); }
  void add(int var, const Eigen::MatrixXd& coeff);
  void add(int var, Eigen::SparseMatrix<double> coeff);
  // F0 + sum_i y_i F_i.
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

struct LinearEquality {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

struct SdpProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<LmiBlock> blocks;
  std::vector<LinearEquality> equalities;

  explicit SdpProblem(int n = 0) : num_vars(n), objective(Eigen::VectorXd::Zero(n)) {}

  // Throws InvalidArgument / DimensionMismatch on malformed data.
  void validate() const;
  double equality_residual(const Eigen::VectorXd& y) const;
  // Smallest eigenvalue over all blocks at y (+inf without blocks).
  double min_block_eigenvalue(const Eigen::VectorXd& y) const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-7;
  double gap_tol = 1e-7;
  int max_iters = 200;
  // Consecutive iterations without LMI-residual progress before Infeasible.
  int stall_iters = 50;
  bool verbose = false;
};

struct SdpSolution {
  Eigen::VectorXd y;
  SolveStatus status = SolveStatus::NumericalFailure;
  double min_block_eigenvalue = 0.0;
  double objective_value = 0.0;
  int iterations = 0;
  double equality_residual = 0.0;
  double relative_gap = 0.0;
  std::string message;
};

class SdpSolver {
 public:
  virtual ~SdpSolver() = default;
  virtual SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts) const = 0;
};

class InteriorPointSolver final : public SdpSolver {
 public:
  SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts) const override;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SolverOptions& opts = {});

struct PsdCheck {
  bool is_psd = false;
  double lambda_min = 0.0;
};

// Symmetrizes S before the eigenvalue computation.
PsdCheck psd_check(const Eigen::MatrixXd& S, double tol);

}  // namespace dccm::sdp

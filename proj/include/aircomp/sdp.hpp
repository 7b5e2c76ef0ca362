#pragma once

#include <Eigen/Dense>

#include <vector>

namespace aircomp {

/// One inequality tr(A X) >= b with Hermitian A.
struct SdpConstraint {
  Eigen::MatrixXcd a;
  double b = 0.0;
};

/// min tr(C X)  s.t.  tr(A_k X) >= b_k,  X Hermitian PSD.
struct SdpProblem {
  Eigen::MatrixXcd objective;
  std::vector<SdpConstraint> constraints;

  int order() const { return static_cast<int>(objective.rows()); }

  /// Throws std::invalid_argument on dimension mismatch or non-Hermitian data
  /// (tolerance 1e-12 relative to the matrix norm).
  void validate() const;
};

/// Real symmetric counterpart, solved directly by the interior-point core.
struct RealSdpProblem {
  Eigen::MatrixXd objective;
  std::vector<Eigen::MatrixXd> constraint_matrices;
  Eigen::VectorXd bounds;

  int order() const { return static_cast<int>(objective.rows()); }
  void validate() const;
};

enum class SdpStatus { optimal, max_iterations, infeasible };

const char* to_string(SdpStatus status);

struct SdpOptions {
  // Target for relative gap and relative residuals; the solver keeps going
  // while progress is possible and reports `optimal` once all three are
  // below `accept_tolerance`.
  double tolerance = 1e-9;
  double accept_tolerance = 1e-7;
  int max_iterations = 100;
  double step_fraction = 0.98;
};

template <typename Matrix>
struct SdpResult {
  Matrix x;
  Matrix z;                // dual slack C - sum y_k A_k
  Eigen::VectorXd duals;   // y >= 0, one per constraint
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // primal - dual
  double primal_residual = 0.0;  // relative, ||max(b - A(X), 0)|| / (1 + ||b||)
  double dual_residual = 0.0;    // relative, ||C - A*(y) - Z|| / (1 + ||C||)
  int iterations = 0;
  SdpStatus status = SdpStatus::max_iterations;
};

using SdpSolution = SdpResult<Eigen::MatrixXcd>;
using RealSdpSolution = SdpResult<Eigen::MatrixXd>;

/// Primal-dual path-following interior point (HKM direction, Mehrotra
/// predictor-corrector) on the PSD cone plus the slack orthant of the
/// inequality constraints. Dense factorizations throughout.
RealSdpSolution solve_sdp(const RealSdpProblem& problem, const SdpOptions& options = {});

/// Hermitian problems go through the real embedding
/// X = [[Re X, -Im X], [Im X, Re X]] of order 2n.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Real embedding of a Hermitian matrix, order 2n.
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& hermitian);

/// Inverse of real_embedding, averaging the two copies of each block.
Eigen::MatrixXcd hermitian_from_embedding(const Eigen::MatrixXd& embedded);

}  // namespace aircomp

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace aircomp {

/// Dual of one convexified step
///
///   min_x  x^H M x  s.t.  2 Re{x^H v_k c_k} >= r_k,   c_k = v_k^H z,
///                          r_k = 1 + |c_k|^2,
///
/// which is  max_{lambda >= 0}  -lambda^T Q lambda + lambda^T r  with
/// Q_jk = Re{conj(c_j) v_j^H M^-1 v_k c_k}. The primal is recovered as
/// x = M^-1 sum_k lambda_k c_k v_k.
struct ScaSubproblem {
  Eigen::MatrixXd gram;                // Q
  Eigen::VectorXd linear;              // r
  Eigen::VectorXcd coefficients;       // c_k
  Eigen::MatrixXcd reconstruction;     // columns M^-1 v_k
};

/// `basis` holds v_k as columns. `hessian` defaults to the identity; a
/// supplied Hessian is inverted with Tikhonov weight 1e-10 * tr(M) / n.
ScaSubproblem build_sca_subproblem(const Eigen::VectorXcd& z,
                                   const Eigen::MatrixXcd& basis,
                                   const std::optional<Eigen::MatrixXcd>& hessian = std::nullopt);

struct NnqpOptions {
  double kkt_tolerance = 1e-11;
  int max_iterations = 20000;
  double psd_tolerance = 1e-10;
  bool polish = true;
  bool record_trace = false;
};

struct NnqpResult {
  Eigen::VectorXd lambda;
  double objective = 0.0;  // -lambda^T Q lambda + lambda^T r
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};

/// ||min(lambda, 2 Q lambda - r)||_inf.
double nnqp_kkt_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                         const Eigen::VectorXd& lambda);

/// Accelerated projected gradient with monotone restart, followed by an
/// active-set polish on the detected support. Throws std::invalid_argument
/// when Q is not PSD within tolerance.
NnqpResult solve_nnqp(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                      const NnqpOptions& options = {});

NnqpResult solve_nnqp(const ScaSubproblem& sub, const NnqpOptions& options = {});

Eigen::VectorXcd reconstruct_primal(const ScaSubproblem& sub,
                                    const Eigen::VectorXd& lambda);

}  // namespace aircomp

#include "aircomp/nnqp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aircomp {
namespace {

double dual_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                      const Eigen::VectorXd& lambda) {
  return -lambda.dot(q * lambda) + lambda.dot(r);
}

// Solves the equality-constrained maximization on the support suggested by
// `lambda`. Returns false when the support system is singular or the result
// leaves the orthant.
bool polish_on_support(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& lambda, Eigen::VectorXd& out) {
  const Eigen::Index k = lambda.size();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const Eigen::VectorXd grad = 2.0 * q * lambda - r;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (lambda[i] > 1e-12 * scale || grad[i] < 0.0) support.push_back(i);
  }
  out = Eigen::VectorXd::Zero(k);
  if (support.empty()) return true;

  const auto s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd q_ss(s, s);
  Eigen::VectorXd r_s(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    r_s[i] = r[support[i]];
    for (Eigen::Index j = 0; j < s; ++j) q_ss(i, j) = q(support[i], support[j]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(q_ss);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd solved = ldlt.solve(0.5 * r_s);
  if (!solved.allFinite() || (q_ss * solved - 0.5 * r_s).norm() >
                                 1e-9 * (1.0 + 0.5 * r_s.norm())) {
    return false;
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    if (solved[i] < 0.0) return false;
    out[support[i]] = solved[i];
  }
  return true;
}

}  // namespace

ScaSubproblem build_sca_subproblem(const Eigen::VectorXcd& z,
                                   const Eigen::MatrixXcd& basis,
                                   const std::optional<Eigen::MatrixXcd>& hessian) {
  if (z.size() != basis.rows()) {
    throw std::invalid_argument("build_sca_subproblem: z has length " +
                                std::to_string(z.size()) + ", basis vectors have " +
                                std::to_string(basis.rows()));
  }
  ScaSubproblem sub;
  sub.coefficients = basis.adjoint() * z;
  sub.linear = Eigen::VectorXd::Ones(basis.cols()) + sub.coefficients.cwiseAbs2();

  if (hessian) {
    const auto& hess = *hessian;
    if (hess.rows() != basis.rows() || hess.cols() != basis.rows()) {
      throw std::invalid_argument("build_sca_subproblem: Hessian dimension mismatch");
    }
    const Eigen::Index n = hess.rows();
    const double ridge = 1e-10 * std::abs(hess.trace().real()) / static_cast<double>(n);
    Eigen::MatrixXcd regularized = 0.5 * (hess + hess.adjoint());
    regularized.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(regularized);
    sub.reconstruction = ldlt.solve(basis);
  } else {
    sub.reconstruction = basis;
  }

  const Eigen::MatrixXcd inner = basis.adjoint() * sub.reconstruction;
  const Eigen::MatrixXcd weighted =
      sub.coefficients.conjugate().asDiagonal() * inner * sub.coefficients.asDiagonal();
  sub.gram = 0.5 * (weighted.real() + weighted.real().transpose());
  return sub;
}

double nnqp_kkt_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                         const Eigen::VectorXd& lambda) {
  const Eigen::VectorXd grad = 2.0 * q * lambda - r;
  return lambda.cwiseMin(grad).cwiseAbs().maxCoeff();
}

NnqpResult solve_nnqp(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                      const NnqpOptions& options) {
  const Eigen::Index k = r.size();
  if (q.rows() != k || q.cols() != k) {
    throw std::invalid_argument("solve_nnqp: Q must be K x K with K = len(r)");
  }
  if ((q - q.transpose()).norm() > 1e-12 * std::max(1.0, q.norm())) {
    throw std::invalid_argument("solve_nnqp: Q is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  const double bottom = eig.eigenvalues().minCoeff();
  if (bottom < -options.psd_tolerance * std::max(1.0, top)) {
    throw std::invalid_argument("solve_nnqp: Q is not positive semidefinite (min eigenvalue " +
                                std::to_string(bottom) + ")");
  }

  NnqpResult result;
  result.lambda = Eigen::VectorXd::Zero(k);
  if (top <= 0.0) {
    // Q = 0: bounded only if no r_k is positive, and then lambda = 0.
    if ((r.array() > 0.0).any()) {
      throw std::invalid_argument("solve_nnqp: unbounded dual (Q = 0 with positive r)");
    }
    result.converged = true;
    return result;
  }

  const double step = 1.0 / (2.0 * top);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  double objective = 0.0;
  Eigen::VectorXd momentum = lambda;
  double theta = 1.0;
  if (options.record_trace) result.objective_trace.push_back(objective);

  auto try_polish = [&]() {
    if (!options.polish) return false;
    Eigen::VectorXd polished;
    if (!polish_on_support(q, r, lambda, polished)) return false;
    const double polished_objective = dual_objective(q, r, polished);
    if (polished_objective < objective - 1e-13 * (1.0 + std::abs(objective))) return false;
    if (nnqp_kkt_residual(q, r, polished) > options.kkt_tolerance) return false;
    lambda = polished;
    objective = polished_objective;
    if (options.record_trace) result.objective_trace.push_back(objective);
    return true;
  };

  int iteration = 0;
  bool converged = false;
  for (; iteration < options.max_iterations; ++iteration) {
    Eigen::VectorXd next =
        (momentum - step * (2.0 * q * momentum - r)).cwiseMax(0.0);
    double next_objective = dual_objective(q, r, next);
    if (next_objective < objective) {
      // Monotone restart: plain projected gradient step from lambda.
      theta = 1.0;
      next = (lambda - step * (2.0 * q * lambda - r)).cwiseMax(0.0);
      next_objective = dual_objective(q, r, next);
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    momentum = next + ((theta - 1.0) / theta_next) * (next - lambda);
    theta = theta_next;
    lambda = next;
    objective = std::max(objective, next_objective);
    if (options.record_trace) result.objective_trace.push_back(next_objective);
    if (!lambda.allFinite() || lambda.norm() > 1e15) {
      throw std::invalid_argument("solve_nnqp: dual diverges (primal infeasible)");
    }

    if (nnqp_kkt_residual(q, r, lambda) <= options.kkt_tolerance) {
      converged = true;
      break;
    }
    if (iteration % 25 == 0 && try_polish()) {
      converged = true;
      break;
    }
  }
  if (!converged && try_polish()) converged = true;

  result.lambda = lambda;
  result.objective = dual_objective(q, r, lambda);
  result.kkt_residual = nnqp_kkt_residual(q, r, lambda);
  result.iterations = iteration + 1;
  result.converged = converged;
  return result;
}

NnqpResult solve_nnqp(const ScaSubproblem& sub, const NnqpOptions& options) {
  return solve_nnqp(sub.gram, sub.linear, options);
}

Eigen::VectorXcd reconstruct_primal(const ScaSubproblem& sub,
                                    const Eigen::VectorXd& lambda) {
  if (lambda.size() != sub.coefficients.size()) {
    throw std::invalid_argument("reconstruct_primal: lambda has wrong length");
  }
  const Eigen::VectorXcd weights =
      lambda.cast<std::complex<double>>().cwiseProduct(sub.coefficients);
  return sub.reconstruction * weights;
}

}  // namespace aircomp

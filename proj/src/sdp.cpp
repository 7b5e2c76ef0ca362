#include "aircomp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aircomp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Matrix>
void require_hermitian(const Matrix& a, const std::string& what) {
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > 1e-12 * scale) {
    throw std::invalid_argument("sdp: " + what + " is not Hermitian");
  }
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

// Largest alpha with X + alpha dX still PSD (infinity when dX never leaves).
double max_step_psd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto lower = llt.matrixL();
  Eigen::MatrixXd scaled = lower.solve(dx);
  scaled = lower.solve(scaled.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(scaled),
                                                     Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  return lowest >= 0.0 ? kInf : -1.0 / lowest;
}

double max_step_orthant(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double step = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) step = std::min(step, -v[i] / dv[i]);
  }
  return step;
}

struct Direction {
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dz;
  Eigen::VectorXd dy;
  Eigen::VectorXd ds;
  Eigen::VectorXd dt;
};

}  // namespace

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::max_iterations:
      return "max-iterations";
    case SdpStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (objective.rows() < 1 || objective.rows() != objective.cols()) {
    throw std::invalid_argument("sdp: objective must be square with order >= 1");
  }
  require_hermitian(objective, "objective");
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& a = constraints[k].a;
    if (a.rows() != objective.rows() || a.cols() != objective.cols()) {
      throw std::invalid_argument("sdp: constraint " + std::to_string(k) +
                                  " has mismatched dimensions");
    }
    require_hermitian(a, "constraint " + std::to_string(k));
    if (!std::isfinite(constraints[k].b)) {
      throw std::invalid_argument("sdp: constraint bound must be finite");
    }
  }
}

void RealSdpProblem::validate() const {
  if (objective.rows() < 1 || objective.rows() != objective.cols()) {
    throw std::invalid_argument("sdp: objective must be square with order >= 1");
  }
  require_hermitian(objective, "objective");
  if (static_cast<Eigen::Index>(constraint_matrices.size()) != bounds.size()) {
    throw std::invalid_argument("sdp: one bound per constraint matrix required");
  }
  for (std::size_t k = 0; k < constraint_matrices.size(); ++k) {
    const auto& a = constraint_matrices[k];
    if (a.rows() != objective.rows() || a.cols() != objective.cols()) {
      throw std::invalid_argument("sdp: constraint " + std::to_string(k) +
                                  " has mismatched dimensions");
    }
    require_hermitian(a, "constraint " + std::to_string(k));
  }
  if (!bounds.allFinite()) throw std::invalid_argument("sdp: bounds must be finite");
}

Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& hermitian) {
  const Eigen::Index n = hermitian.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = hermitian.real();
  out.bottomRightCorner(n, n) = hermitian.real();
  out.topRightCorner(n, n) = -hermitian.imag();
  out.bottomLeftCorner(n, n) = hermitian.imag();
  return out;
}

Eigen::MatrixXcd hermitian_from_embedding(const Eigen::MatrixXd& embedded) {
  const Eigen::Index n = embedded.rows() / 2;
  const Eigen::MatrixXd re =
      0.5 * (embedded.topLeftCorner(n, n) + embedded.bottomRightCorner(n, n));
  const Eigen::MatrixXd im =
      0.5 * (embedded.bottomLeftCorner(n, n) - embedded.topRightCorner(n, n));
  Eigen::MatrixXcd out(n, n);
  out.real() = re;
  out.imag() = im;
  return 0.5 * (out + out.adjoint().eval());
}

RealSdpSolution solve_sdp(const RealSdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  const int n = problem.order();
  const int m = static_cast<int>(problem.constraint_matrices.size());
  RealSdpSolution result;

  // An all-zero constraint row with positive bound can never be met.
  for (int i = 0; i < m; ++i) {
    if (problem.constraint_matrices[i].norm() == 0.0 && problem.bounds[i] > 0.0) {
      result.status = SdpStatus::infeasible;
      result.x = Eigen::MatrixXd::Zero(n, n);
      result.z = problem.objective;
      result.duals = Eigen::VectorXd::Zero(m);
      return result;
    }
  }

  // Row, objective and bound scaling; undone before returning.
  Eigen::VectorXd row_scale(m);
  std::vector<Eigen::MatrixXd> a(m);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double norm = problem.constraint_matrices[i].norm();
    row_scale[i] = norm > 0.0 ? norm : 1.0;
    a[i] = problem.constraint_matrices[i] / row_scale[i];
    b[i] = problem.bounds[i] / row_scale[i];
  }
  const double bound_scale = m > 0 && b.cwiseAbs().maxCoeff() > 0.0 ? b.cwiseAbs().maxCoeff() : 1.0;
  b /= bound_scale;
  const double objective_scale = problem.objective.norm() > 0.0 ? problem.objective.norm() : 1.0;
  const Eigen::MatrixXd c = problem.objective / objective_scale;

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  // Strictly interior start: X = xi I satisfies every constraint with PSD
  // (positive trace) data; Z = zeta I.
  double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
  for (int i = 0; i < m; ++i) {
    const double trace = a[i].trace();
    if (trace > 0.0) xi = std::max(xi, 2.0 * b[i] / trace);
  }
  const double zeta = std::max({10.0, std::sqrt(static_cast<double>(n)), c.norm()});
  Eigen::MatrixXd x = xi * identity;
  Eigen::MatrixXd z = zeta * identity;
  Eigen::VectorXd y = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd t = y;
  Eigen::VectorXd s(m);
  for (int i = 0; i < m; ++i) {
    const double slack = inner(a[i], x) - b[i];
    s[i] = slack > 0.0 ? slack : 1.0;
  }

  const double b_norm = b.norm();
  const double c_norm = c.norm();
  const double dimension = static_cast<double>(n + m);

  auto measure = [&](double& relgap, double& pinf, double& dinf) {
    const double pobj = inner(c, x);
    const double dobj = b.dot(y);
    Eigen::VectorXd rp = b + s;
    Eigen::MatrixXd rd = c - z;
    for (int i = 0; i < m; ++i) {
      rp[i] -= inner(a[i], x);
      rd -= y[i] * a[i];
    }
    relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    pinf = rp.norm() / (1.0 + b_norm);
    dinf = std::sqrt(rd.squaredNorm() + (y - t).squaredNorm()) / (1.0 + c_norm);
    return std::make_pair(rp, rd);
  };

  int iteration = 0;
  bool converged = false;
  for (; iteration < options.max_iterations; ++iteration) {
    double relgap = 0, pinf = 0, dinf = 0;
    const auto [rp, rd] = measure(relgap, pinf, dinf);
    if (relgap <= options.tolerance && pinf <= options.tolerance &&
        dinf <= options.tolerance) {
      converged = true;
      break;
    }
    if (b.dot(y) > 1e12) {
      result.status = SdpStatus::infeasible;
      break;
    }
    const Eigen::VectorXd rl = y - t;
    const double mu = (inner(x, z) + s.dot(t)) / dimension;

    Eigen::LLT<Eigen::MatrixXd> z_llt(z);
    if (z_llt.info() != Eigen::Success) break;
    const Eigen::MatrixXd z_inv = symmetrized(z_llt.solve(identity));

    std::vector<Eigen::MatrixXd> g(m);
    for (int j = 0; j < m; ++j) g[j] = x * a[j] * z_inv;
    Eigen::MatrixXd schur(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        schur(i, j) = inner(a[i], g[j]);
      }
    }
    schur = schur.selfadjointView<Eigen::Upper>();
    schur.diagonal() += s.cwiseQuotient(t);
    Eigen::LDLT<Eigen::MatrixXd> schur_ldlt(schur);
    if (schur_ldlt.info() != Eigen::Success) break;

    const Eigen::MatrixXd x_rd_zinv = x * rd * z_inv;

    auto direction = [&](double target_mu, const Eigen::MatrixXd* corr_x,
                         const Eigen::VectorXd* corr_s) {
      Direction d;
      Eigen::MatrixXd r = target_mu * z_inv - x - x_rd_zinv;
      if (corr_x != nullptr) r -= *corr_x;
      Eigen::VectorXd rhs(m);
      for (int i = 0; i < m; ++i) {
        rhs[i] = rp[i] - inner(a[i], r) + target_mu / t[i] - s[i] - s[i] / t[i] * rl[i];
        if (corr_s != nullptr) rhs[i] -= (*corr_s)[i];
      }
      d.dy = schur_ldlt.solve(rhs);
      d.dz = rd;
      d.dx = r;
      for (int j = 0; j < m; ++j) {
        d.dz -= d.dy[j] * a[j];
        d.dx += d.dy[j] * g[j];
      }
      d.dx = symmetrized(d.dx);
      d.dt = rl + d.dy;
      d.ds = (target_mu * t.cwiseInverse()) - s - s.cwiseQuotient(t).cwiseProduct(d.dt);
      if (corr_s != nullptr) d.ds -= *corr_s;
      return d;
    };

    auto step_lengths = [&](const Direction& d, double fraction) {
      const double primal = std::min(max_step_psd(x, d.dx), max_step_orthant(s, d.ds));
      const double dual = std::min(max_step_psd(z, d.dz), max_step_orthant(t, d.dt));
      return std::make_pair(std::min(1.0, fraction * primal),
                            std::min(1.0, fraction * dual));
    };

    // Predictor.
    const Direction affine = direction(0.0, nullptr, nullptr);
    const auto [ap_aff, ad_aff] = step_lengths(affine, 1.0);
    const double mu_aff =
        (inner(x + ap_aff * affine.dx, z + ad_aff * affine.dz) +
         (s + ap_aff * affine.ds).dot(t + ad_aff * affine.dt)) /
        dimension;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector with the second-order terms of the affine step.
    const Eigen::MatrixXd corr_x = affine.dx * affine.dz * z_inv;
    const Eigen::VectorXd corr_s = affine.ds.cwiseProduct(affine.dt).cwiseQuotient(t);
    const Direction step = direction(sigma * mu, &corr_x, &corr_s);
    const double fraction =
        std::min(options.step_fraction, 0.9 + 0.09 * std::min(ap_aff, ad_aff));
    const auto [alpha_p, alpha_d] = step_lengths(step, fraction);
    if (alpha_p < 1e-12 && alpha_d < 1e-12) break;

    x = symmetrized(x + alpha_p * step.dx);
    s += alpha_p * step.ds;
    z = symmetrized(z + alpha_d * step.dz);
    y += alpha_d * step.dy;
    t += alpha_d * step.dt;
  }

  double relgap = 0, pinf = 0, dinf = 0;
  measure(relgap, pinf, dinf);
  result.iterations = iteration;

  // Undo scaling.
  result.x = bound_scale * x;
  result.z = objective_scale * z;
  result.duals = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) {
    result.duals[i] = std::max(0.0, objective_scale * y[i] / row_scale[i]);
  }
  result.primal_objective = inner(problem.objective, result.x);
  result.dual_objective = problem.bounds.dot(result.duals);
  result.gap = result.primal_objective - result.dual_objective;

  Eigen::VectorXd violation(m);
  Eigen::MatrixXd dual_res = problem.objective - result.z;
  for (int i = 0; i < m; ++i) {
    violation[i] = std::max(
        0.0, problem.bounds[i] - inner(problem.constraint_matrices[i], result.x));
    dual_res -= result.duals[i] * problem.constraint_matrices[i];
  }
  result.primal_residual = violation.norm() / (1.0 + problem.bounds.norm());
  result.dual_residual = dual_res.norm() / (1.0 + problem.objective.norm());

  if (result.status != SdpStatus::infeasible) {
    const double accept = options.accept_tolerance;
    const bool accurate =
        std::abs(result.gap) <= accept * (1.0 + std::abs(result.primal_objective)) &&
        relgap <= accept && pinf <= accept && dinf <= accept;
    result.status = (converged || accurate) ? SdpStatus::optimal : SdpStatus::max_iterations;
  }
  return result;
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  RealSdpProblem real;
  real.objective = 0.5 * real_embedding(problem.objective);
  real.bounds.resize(static_cast<Eigen::Index>(problem.constraints.size()));
  for (std::size_t k = 0; k < problem.constraints.size(); ++k) {
    real.constraint_matrices.push_back(0.5 * real_embedding(problem.constraints[k].a));
    real.bounds[static_cast<Eigen::Index>(k)] = problem.constraints[k].b;
  }
  const RealSdpSolution embedded = solve_sdp(real, options);

  SdpSolution out;
  out.x = hermitian_from_embedding(embedded.x);
  out.z = 2.0 * hermitian_from_embedding(embedded.z);
  out.duals = embedded.duals;
  out.primal_objective = (problem.objective * out.x).trace().real();
  out.dual_objective = embedded.dual_objective;
  out.gap = out.primal_objective - out.dual_objective;
  out.primal_residual = embedded.primal_residual;
  out.dual_residual = embedded.dual_residual;
  out.iterations = embedded.iterations;
  out.status = embedded.status;
  return out;
}

}  // namespace aircomp

#include "aircomp/algorithms.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aircomp/nnqp.hpp"
#include "aircomp/randomization.hpp"

namespace aircomp {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Channels are rescaled to unit mean column power before any solver sees
// them. ||m||^2 in original units is scale^2 times the normalized value.
double normalization(const Eigen::MatrixXcd& h) {
  const double mean_power = h.colwise().squaredNorm().mean();
  return 1.0 / std::sqrt(mean_power);
}

double quadratic(const Eigen::VectorXcd& x, const Eigen::MatrixXcd* metric) {
  return metric == nullptr ? x.squaredNorm() : x.dot(*metric * x).real();
}

struct ScaRun {
  Eigen::VectorXcd x;
  std::vector<double> trace;
  std::vector<Eigen::VectorXcd> iterates;
  int iterations = 0;
  bool capped = false;
};

// SCA on min x^H M x s.t. |x^H v_k|^2 >= 1. M is the identity when `metric`
// is null. Every accepted iterate is rescaled onto the constraint surface.
ScaRun run_sca(const Eigen::MatrixXcd& basis, const Eigen::MatrixXcd* metric,
               const Eigen::VectorXcd& init, const SolverOptions& options) {
  ScaRun run;
  run.x = rescale_to_constraints(init, basis);
  double objective = quadratic(run.x, metric);
  run.trace.push_back(objective);

  std::optional<Eigen::MatrixXcd> hessian;
  if (metric != nullptr) hessian = *metric;

  bool converged = false;
  for (int iteration = 1; iteration <= options.sca_max_iterations; ++iteration) {
    run.iterations = iteration;
    const ScaSubproblem sub = build_sca_subproblem(run.x, basis, hessian);
    // The linearization at a feasible z keeps z feasible: the constraint at
    // z itself reads |z^H v_k|^2 >= 1.
    if (sub.coefficients.cwiseAbs2().minCoeff() < 1.0 - 1e-9) {
      throw std::logic_error("SCA: previous iterate infeasible for its own subproblem");
    }
    const NnqpResult dual = solve_nnqp(sub);
    Eigen::VectorXcd candidate;
    try {
      candidate = rescale_to_constraints(reconstruct_primal(sub, dual.lambda), basis);
    } catch (const DegenerateChannelError&) {
      converged = true;
      break;
    }
    const double candidate_objective = quadratic(candidate, metric);
    if (!(candidate_objective <= objective)) {
      // No further descent at machine precision.
      converged = true;
      break;
    }
    const double decrease = (objective - candidate_objective) / objective;
    run.x = std::move(candidate);
    objective = candidate_objective;
    run.trace.push_back(objective);
    if (options.record_iterates) run.iterates.push_back(run.x);
    if (decrease <= options.sca_tolerance) {
      converged = true;
      break;
    }
  }
  run.capped = !converged;
  return run;
}

double relative_gap(const SdpSolution& sdp) {
  return std::abs(sdp.gap) / (1.0 + std::abs(sdp.primal_objective));
}

void record_sdp(SolverDiagnostics& diag, const SdpSolution& sdp, double unit) {
  diag.sdp_objective = unit * sdp.primal_objective;
  diag.sdp_gap = relative_gap(sdp);
  diag.sdp_iterations = sdp.iterations;
  if (sdp.status != SdpStatus::optimal) {
    diag.status = SolveStatus::sdp_inaccurate;
    diag.warnings.push_back(std::string("SDP finished with status ") + to_string(sdp.status));
  }
}

SdpSolution solve_relaxation(const Eigen::MatrixXcd& objective,
                             const Eigen::MatrixXcd& constraint_vectors,
                             const SdpOptions& options) {
  SdpProblem problem;
  problem.objective = objective;
  for (Eigen::Index k = 0; k < constraint_vectors.cols(); ++k) {
    const Eigen::VectorXcd v = constraint_vectors.col(k);
    problem.constraints.push_back({v * v.adjoint(), 1.0});
  }
  SdpSolution solution = solve_sdp(problem, options);
  if (solution.status == SdpStatus::infeasible) {
    throw SolverError("relaxation reported infeasible");
  }
  return solution;
}

// Beamformer m = H a rescaled onto the original constraints, with a rescaled
// by the same factor so that m = H a holds for the returned pair.
BeamformingSolution solution_from_weights(const Eigen::VectorXcd& weights,
                                          const ChannelSet& channels,
                                          const LinkBudget& link) {
  const Eigen::VectorXcd raw = channels.h * weights;
  BeamformingSolution solution = make_solution(raw, channels, link);
  solution.a = weights * (solution.m.norm() / raw.norm());
  return solution;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(std::isfinite(sca_tolerance) && sca_tolerance > 0)) {
    throw std::invalid_argument("solver: sca_tolerance must be > 0");
  }
  if (sca_max_iterations < 1) {
    throw std::invalid_argument("solver: sca_max_iterations must be >= 1");
  }
  if (randomization_candidates < 1) {
    throw std::invalid_argument("solver: randomization_candidates must be >= 1");
  }
  if (sdp.max_iterations < 1 || !(sdp.tolerance > 0)) {
    throw std::invalid_argument("solver: invalid SDP options");
  }
}

ReducedProblem reduce(const Eigen::MatrixXcd& h) {
  ReducedProblem reduced;
  reduced.f = h.adjoint() * h;
  reduced.d = 0.5 * (reduced.f + reduced.f.adjoint());
  return reduced;
}

const char* algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::direct_sdr:
      return "direct-sdr";
    case Algorithm::direct_sca:
      return "direct-sca";
    case Algorithm::sdr_opt:
      return "sdr-opt";
    case Algorithm::sca_opt:
      return "sca-opt";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto algorithm : kAllAlgorithms) {
    if (name == algorithm_name(algorithm)) return algorithm;
  }
  return std::nullopt;
}

BeamformingSolution direct_sdr(const ChannelSet& channels, const LinkBudget& link,
                               const SolverOptions& options, Rng& rng) {
  options.validate();
  const auto start = Clock::now();
  const double scale = normalization(channels.h);
  const Eigen::MatrixXcd h = scale * channels.h;
  const Eigen::Index n = h.rows();

  const SdpSolution sdp =
      solve_relaxation(Eigen::MatrixXcd::Identity(n, n), h, options.sdp);
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
  const RandomizationResult extracted =
      gaussian_randomization(sdp, h, identity, options.randomization_candidates, rng);

  BeamformingSolution solution = make_solution(extracted.vector, channels, link);
  auto& diag = solution.diagnostics;
  diag.solver = algorithm_name(Algorithm::direct_sdr);
  diag.iterations = sdp.iterations;
  diag.rank_ratio = extracted.rank_ratio;
  record_sdp(diag, sdp, scale * scale);
  diag.objective_trace.push_back(solution.m.squaredNorm());
  diag.solve_seconds = seconds_since(start);
  return solution;
}

BeamformingSolution direct_sca(const ChannelSet& channels, const Eigen::VectorXcd& init,
                               const LinkBudget& link, const SolverOptions& options) {
  options.validate();
  if (init.size() != channels.h.rows()) {
    throw std::invalid_argument("direct_sca: init has wrong length");
  }
  if (!(min_gain_squared(init, channels.h) >= 1.0 - 1e-9)) {
    throw std::invalid_argument("direct_sca: init violates min_k |m^H h_k|^2 >= 1");
  }
  const auto start = Clock::now();
  const double scale = normalization(channels.h);
  const Eigen::MatrixXcd h = scale * channels.h;

  ScaRun run = run_sca(h, nullptr, init, options);

  BeamformingSolution solution = make_solution(run.x, channels, link);
  auto& diag = solution.diagnostics;
  diag.solver = algorithm_name(Algorithm::direct_sca);
  diag.iterations = run.iterations;
  if (run.capped) diag.status = SolveStatus::iteration_cap;
  for (const double value : run.trace) diag.objective_trace.push_back(scale * scale * value);
  for (const auto& x : run.iterates) diag.iterates.push_back(scale * x);
  diag.solve_seconds = seconds_since(start);
  return solution;
}

BeamformingSolution direct_sca_from_sdr(const ChannelSet& channels, const LinkBudget& link,
                                        const SolverOptions& options, Rng& rng) {
  const BeamformingSolution init = direct_sdr(channels, link, options, rng);
  BeamformingSolution solution = direct_sca(channels, init.m, link, options);
  auto& diag = solution.diagnostics;
  if (solution.mse > init.mse) {
    // Round-off only; SCA never moves uphill from its start.
    solution.m = init.m;
    solution.design = init.design;
    solution.mse = init.mse;
  }
  diag.init_seconds = init.diagnostics.solve_seconds;
  diag.solve_seconds += diag.init_seconds;
  diag.sdp_objective = init.diagnostics.sdp_objective;
  diag.sdp_gap = init.diagnostics.sdp_gap;
  diag.sdp_iterations = init.diagnostics.sdp_iterations;
  diag.rank_ratio = init.diagnostics.rank_ratio;
  if (init.diagnostics.status == SolveStatus::sdp_inaccurate &&
      diag.status == SolveStatus::ok) {
    diag.status = SolveStatus::sdp_inaccurate;
  }
  for (const auto& w : init.diagnostics.warnings) diag.warnings.push_back(w);
  return solution;
}

BeamformingSolution sdr_opt(const ChannelSet& channels, const LinkBudget& link,
                            const SolverOptions& options, Rng& rng) {
  options.validate();
  const auto start = Clock::now();
  const double scale = normalization(channels.h);
  const ReducedProblem reduced = reduce(scale * channels.h);
  const Eigen::Index k = reduced.d.rows();

  std::vector<std::string> warnings;
  Eigen::MatrixXcd objective = reduced.d;
  if (channels.antennas() < channels.devices()) {
    // D has rank N < K; a small ridge keeps the relaxation bounded.
    objective.diagonal().array() += 1e-10 * reduced.d.trace().real() / static_cast<double>(k);
    warnings.emplace_back("N < K: weight-domain Gram matrix is singular; regularized");
  }

  const SdpSolution sdp = solve_relaxation(objective, reduced.f, options.sdp);
  const RandomizationResult extracted = gaussian_randomization(
      sdp, reduced.f, reduced.d, options.randomization_candidates, rng);

  BeamformingSolution solution = solution_from_weights(extracted.vector, channels, link);
  auto& diag = solution.diagnostics;
  diag.solver = algorithm_name(Algorithm::sdr_opt);
  diag.iterations = sdp.iterations;
  diag.rank_ratio = extracted.rank_ratio;
  diag.warnings = std::move(warnings);
  record_sdp(diag, sdp, scale * scale);
  diag.objective_trace.push_back(solution.m.squaredNorm());
  diag.solve_seconds = seconds_since(start);
  return solution;
}

BeamformingSolution sca_opt(const ChannelSet& channels, const LinkBudget& link,
                            const SolverOptions& options, Rng& rng) {
  const BeamformingSolution init = sdr_opt(channels, link, options, rng);
  const auto start = Clock::now();
  const double scale = normalization(channels.h);
  const ReducedProblem reduced = reduce(scale * channels.h);

  ScaRun run = run_sca(reduced.f, &reduced.d, *init.a, options);

  BeamformingSolution solution = solution_from_weights(run.x, channels, link);
  if (solution.mse > init.mse) {
    solution.m = init.m;
    solution.a = init.a;
    solution.design = init.design;
    solution.mse = init.mse;
  }
  auto& diag = solution.diagnostics;
  diag.solver = algorithm_name(Algorithm::sca_opt);
  diag.iterations = run.iterations;
  if (run.capped) diag.status = SolveStatus::iteration_cap;
  if (init.diagnostics.status == SolveStatus::sdp_inaccurate && diag.status == SolveStatus::ok) {
    diag.status = SolveStatus::sdp_inaccurate;
  }
  for (const double value : run.trace) diag.objective_trace.push_back(scale * scale * value);
  if (options.record_iterates) {
    for (const auto& a : run.iterates) diag.iterates.push_back(scale * scale * (channels.h * a));
  }
  diag.warnings = init.diagnostics.warnings;
  diag.sdp_objective = init.diagnostics.sdp_objective;
  diag.sdp_gap = init.diagnostics.sdp_gap;
  diag.sdp_iterations = init.diagnostics.sdp_iterations;
  diag.rank_ratio = init.diagnostics.rank_ratio;
  diag.init_seconds = init.diagnostics.solve_seconds;
  diag.solve_seconds = diag.init_seconds + seconds_since(start);
  return solution;
}

BeamformingSolution run_algorithm(Algorithm algorithm, const ChannelSet& channels,
                                  const LinkBudget& link, const SolverOptions& options,
                                  Rng& rng) {
  switch (algorithm) {
    case Algorithm::direct_sdr:
      return direct_sdr(channels, link, options, rng);
    case Algorithm::direct_sca:
      return direct_sca_from_sdr(channels, link, options, rng);
    case Algorithm::sdr_opt:
      return sdr_opt(channels, link, options, rng);
    case Algorithm::sca_opt:
      return sca_opt(channels, link, options, rng);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace aircomp

#include "aircomp/randomization.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "aircomp/core.hpp"

namespace aircomp {

RandomizationResult gaussian_randomization(const Eigen::MatrixXcd& x,
                                           const Eigen::MatrixXcd& constraint_vectors,
                                           const Eigen::MatrixXcd& objective_metric,
                                           int num_candidates, Rng& rng) {
  const Eigen::Index n = x.rows();
  if (x.cols() != n || constraint_vectors.rows() != n || objective_metric.rows() != n ||
      objective_metric.cols() != n) {
    throw std::invalid_argument("gaussian_randomization: dimension mismatch");
  }
  if (num_candidates < 1) {
    throw std::invalid_argument("gaussian_randomization: num_candidates must be >= 1");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (x + x.adjoint()));
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);  // ascending
  const Eigen::MatrixXcd& vectors = eig.eigenvectors();
  const double top = values[n - 1];
  if (!(top > 0.0)) {
    throw ExtractionError("gaussian_randomization: relaxed solution is zero");
  }

  RandomizationResult best;
  best.objective = std::numeric_limits<double>::infinity();
  best.candidate_index = -1;
  best.rank_ratio = n > 1 ? values[n - 2] / top : 0.0;

  // Hermitian square root, so the colouring does not depend on the basis
  // chosen for repeated eigenvalues (X = I colours unit-modulus draws into
  // unit-modulus candidates).
  const Eigen::MatrixXcd factor =
      vectors * values.cwiseSqrt().asDiagonal() * vectors.adjoint();
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXcd draw(n);
  for (int index = 0; index <= num_candidates; ++index) {
    Eigen::VectorXcd candidate;
    if (index == 0) {
      candidate = vectors.col(n - 1);
    } else if (index % 2 == 1) {
      for (Eigen::Index i = 0; i < n; ++i) draw[i] = complex_normal(rng);
      candidate = factor * draw;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) draw[i] = std::polar(1.0, phase(rng));
      candidate = factor * draw;
    }
    Eigen::VectorXcd feasible;
    try {
      feasible = rescale_to_constraints(candidate, constraint_vectors);
    } catch (const DegenerateChannelError&) {
      ++best.degenerate_candidates;
      continue;
    }
    const double objective = feasible.dot(objective_metric * feasible).real();
    if (objective < best.objective) {
      best.objective = objective;
      best.vector = std::move(feasible);
      best.candidate_index = index;
    }
  }
  if (best.candidate_index < 0) {
    throw ExtractionError("gaussian_randomization: all " +
                          std::to_string(num_candidates + 1) +
                          " candidates have a zero gain on some constraint");
  }
  return best;
}

}  // namespace aircomp

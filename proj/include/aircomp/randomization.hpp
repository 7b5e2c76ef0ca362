#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "aircomp/random.hpp"
#include "aircomp/sdp.hpp"

namespace aircomp {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RandomizationResult {
  Eigen::VectorXcd vector;  // feasible: min_k |v^H f_k| = 1
  double objective = 0.0;   // v^H M v
  int candidate_index = 0;  // 0 is the dominant eigenvector
  int degenerate_candidates = 0;
  double rank_ratio = 0.0;  // lambda_2 / lambda_1 of X
};

/// Rank-one extraction from a relaxed solution X. Candidate 0 is the dominant
/// eigenvector; candidates 1..num_candidates are X^{1/2} e with e alternating
/// between CN(0, I) draws (odd indices) and uniform-phase unit-modulus draws
/// (even indices), so every random candidate has covariance X. Every
/// candidate is rescaled onto the constraints |v^H f_k| >= 1 (columns of
/// `constraint_vectors`) and scored by v^H M v; ties keep the lowest index.
RandomizationResult gaussian_randomization(const Eigen::MatrixXcd& x,
                                           const Eigen::MatrixXcd& constraint_vectors,
                                           const Eigen::MatrixXcd& objective_metric,
                                           int num_candidates, Rng& rng);

inline RandomizationResult gaussian_randomization(const SdpSolution& solution,
                                                  const Eigen::MatrixXcd& constraint_vectors,
                                                  const Eigen::MatrixXcd& objective_metric,
                                                  int num_candidates, Rng& rng) {
  return gaussian_randomization(solution.x, constraint_vectors, objective_metric,
                                num_candidates, rng);
}

}  // namespace aircomp

#include "aircomp/nnqp.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace aircomp {
namespace {

using testing::random_complex;

Eigen::MatrixXd random_psd(int k, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(k, rank);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < rank; ++j) g(i, j) = normal(rng);
  }
  return g * g.transpose();
}

Eigen::VectorXd random_vector(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd r(k);
  for (int i = 0; i < k; ++i) r[i] = normal(rng);
  return r;
}

// Objective of the convexified step, J(x) = x^H M x - sum_k 2 Re{lambda_k x^H v_k c_k}.
double step_objective(const Eigen::VectorXcd& x, const Eigen::MatrixXcd& metric,
                      const Eigen::MatrixXcd& basis, const Eigen::VectorXcd& c,
                      const Eigen::VectorXd& lambda) {
  double value = x.dot(metric * x).real();
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    value -= 2.0 * lambda[k] * (x.dot(basis.col(k)) * c[k]).real();
  }
  return value;
}

// Central differences over real and imaginary parts; exact for quadratics up
// to rounding.
Eigen::VectorXd finite_difference_gradient(const Eigen::VectorXcd& x,
                                           const Eigen::MatrixXcd& metric,
                                           const Eigen::MatrixXcd& basis,
                                           const Eigen::VectorXcd& c,
                                           const Eigen::VectorXd& lambda) {
  const double step = 1e-4 * std::max(1.0, x.norm());
  Eigen::VectorXd grad(2 * x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      const std::complex<double> delta = part == 0 ? std::complex<double>(step, 0.0)
                                                   : std::complex<double>(0.0, step);
      Eigen::VectorXcd plus = x;
      Eigen::VectorXcd minus = x;
      plus[i] += delta;
      minus[i] -= delta;
      grad[2 * i + part] = (step_objective(plus, metric, basis, c, lambda) -
                            step_objective(minus, metric, basis, c, lambda)) /
                           (2.0 * step);
    }
  }
  return grad;
}

TEST(BuildScaSubproblemTest, ScalarChannel) {
  const ScaSubproblem sub = build_sca_subproblem(Eigen::VectorXcd::Ones(1),
                                                 Eigen::MatrixXcd::Ones(1, 1));
  EXPECT_NEAR(sub.gram(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(sub.linear[0], 2.0, 1e-15);
}

TEST(BuildScaSubproblemTest, OrthogonalVectorsDecouple) {
  const Eigen::MatrixXcd basis = Eigen::MatrixXcd::Identity(5, 3) * std::complex<double>(0.5, 2.0);
  const Eigen::VectorXcd z = random_complex(5, 1, 4);
  const ScaSubproblem sub = build_sca_subproblem(z, basis);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_NEAR(sub.gram(i, j), 0.0, 1e-14);
    }
    EXPECT_GE(sub.linear[i], 1.0);
  }
}

TEST(BuildScaSubproblemTest, GramIsPsdAndLinearAtLeastOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXcd h = random_complex(6, 4, seed);
    const ScaSubproblem sub = build_sca_subproblem(random_complex(6, 1, seed + 9), h);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub.gram).eigenvalues().minCoeff(),
              -1e-10 * sub.gram.norm());
    EXPECT_TRUE((sub.linear.array() >= 1.0).all());
  }
}

TEST(BuildScaSubproblemTest, RejectsDimensionMismatch) {
  EXPECT_THROW(build_sca_subproblem(Eigen::VectorXcd::Ones(3), Eigen::MatrixXcd::Ones(4, 2)),
               std::invalid_argument);
  EXPECT_THROW(build_sca_subproblem(Eigen::VectorXcd::Ones(4), Eigen::MatrixXcd::Ones(4, 2),
                                    Eigen::MatrixXcd::Identity(3, 3)),
               std::invalid_argument);
}

TEST(SolveNnqpTest, InteriorScalarMaximum) {
  const NnqpResult result =
      solve_nnqp(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_NEAR(result.lambda[0], 1.0, 1e-12);
  EXPECT_NEAR(result.objective, 1.0, 1e-12);
  EXPECT_TRUE(result.converged);
}

TEST(SolveNnqpTest, NonPositiveLinearTermGivesZero) {
  const Eigen::MatrixXd q = Eigen::Vector3d(1.0, 2.0, 0.5).asDiagonal();
  const NnqpResult result = solve_nnqp(q, Eigen::Vector3d(-1.0, 0.0, -0.3));
  EXPECT_EQ(result.lambda, Eigen::VectorXd::Zero(3));
}

TEST(SolveNnqpTest, MatchesActiveSetEnumeration) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int k = 1 + static_cast<int>(seed % 5);
    const int rank = seed % 3 == 0 ? std::max(1, k - 1) : k;  // some singular instances
    const Eigen::MatrixXd q = random_psd(k, rank, seed);
    const Eigen::VectorXd r = random_vector(k, seed + 1000);
    if (rank < k) {
      // Keep the problem bounded: r must lie in range(Q) on every support.
      const Eigen::VectorXd r_in_range = q * random_vector(k, seed + 2000);
      const NnqpResult result = solve_nnqp(q, r_in_range);
      const Eigen::VectorXd oracle = testing::nnqp_enumeration(q, r_in_range);
      const double best = -oracle.dot(q * oracle) + oracle.dot(r_in_range);
      EXPECT_NEAR(result.objective, best, 1e-8 * (1.0 + std::abs(best))) << "seed " << seed;
      continue;
    }
    const NnqpResult result = solve_nnqp(q, r);
    const Eigen::VectorXd oracle = testing::nnqp_enumeration(q, r);
    EXPECT_LT((result.lambda - oracle).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + oracle.norm()))
        << "seed " << seed;
    EXPECT_LE(result.kkt_residual, 1e-9);
    EXPECT_TRUE((result.lambda.array() >= 0.0).all());
  }
}

TEST(SolveNnqpTest, ObjectiveTraceNonDecreasing) {
  NnqpOptions options;
  options.record_trace = true;
  options.polish = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd q = random_psd(8, 8, seed + 50) + 1e-3 * Eigen::MatrixXd::Identity(8, 8);
    const NnqpResult result = solve_nnqp(q, random_vector(8, seed + 60), options);
    ASSERT_FALSE(result.objective_trace.empty());
    for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
      EXPECT_GE(result.objective_trace[i],
                result.objective_trace[i - 1] - 1e-12 * (1.0 + std::abs(result.objective_trace[i])));
    }
  }
}

TEST(SolveNnqpTest, Deterministic) {
  const Eigen::MatrixXd q = random_psd(6, 6, 3);
  const Eigen::VectorXd r = random_vector(6, 4);
  const NnqpResult a = solve_nnqp(q, r);
  const NnqpResult b = solve_nnqp(q, r);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveNnqpTest, RejectsIndefiniteGram) {
  Eigen::Matrix2d q;
  q << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(solve_nnqp(q, Eigen::Vector2d(1.0, 1.0)), std::invalid_argument);
  EXPECT_THROW(solve_nnqp(Eigen::Matrix2d::Identity(), Eigen::Vector3d(1.0, 1.0, 1.0)),
               std::invalid_argument);
}

TEST(ReconstructPrimalTest, ActiveScalarConstraint) {
  const ScaSubproblem sub = build_sca_subproblem(Eigen::VectorXcd::Ones(1),
                                                 Eigen::MatrixXcd::Ones(1, 1));
  const Eigen::VectorXcd m = reconstruct_primal(sub, Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(std::abs(m[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(2.0 * (std::conj(m[0]) * 1.0 * 1.0).real(), sub.linear[0], 1e-15);
}

TEST(ReconstructPrimalTest, ZeroMultipliersGiveZero) {
  const ScaSubproblem sub = build_sca_subproblem(random_complex(5, 1, 1), random_complex(5, 3, 2));
  EXPECT_EQ(reconstruct_primal(sub, Eigen::VectorXd::Zero(3)), Eigen::VectorXcd::Zero(5));
}

TEST(ReconstructPrimalTest, StationaryUnderIdentityMetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXcd h = random_complex(6, 3, seed + 10);
    const Eigen::VectorXcd z = random_complex(6, 1, seed + 20);
    const ScaSubproblem sub = build_sca_subproblem(z, h);
    const Eigen::VectorXd lambda = solve_nnqp(sub).lambda;
    const Eigen::VectorXcd x = reconstruct_primal(sub, lambda);
    const Eigen::VectorXd grad = finite_difference_gradient(
        x, Eigen::MatrixXcd::Identity(6, 6), h, sub.coefficients, lambda);
    EXPECT_LE(grad.norm(), 1e-8 * (1.0 + x.norm()));
  }
}

TEST(ReconstructPrimalTest, StationaryUnderGramMetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXcd h = random_complex(8, 4, seed + 30);
    const Eigen::MatrixXcd d = h.adjoint() * h;
    const Eigen::MatrixXcd f = d;
    const Eigen::VectorXcd y = random_complex(4, 1, seed + 40);
    const ScaSubproblem sub = build_sca_subproblem(y, f, d);
    const Eigen::VectorXd lambda = solve_nnqp(sub).lambda;
    const Eigen::VectorXcd a = reconstruct_primal(sub, lambda);
    const Eigen::VectorXd grad = finite_difference_gradient(a, d, f, sub.coefficients, lambda);
    EXPECT_LE(grad.norm(), 1e-8 * (1.0 + d.norm() * a.norm()));
  }
}

TEST(ReconstructPrimalTest, StrongDualityAndFeasibility) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Eigen::MatrixXcd h = random_complex(7, 4, seed + 100);
    const Eigen::VectorXcd z = random_complex(7, 1, seed + 200);
    const ScaSubproblem sub = build_sca_subproblem(z, h);
    const NnqpResult dual = solve_nnqp(sub);
    const Eigen::VectorXcd x = reconstruct_primal(sub, dual.lambda);
    EXPECT_NEAR(x.squaredNorm(), dual.objective, 1e-8 * (1.0 + dual.objective));
    for (int k = 0; k < 4; ++k) {
      const double lhs = 2.0 * (x.dot(h.col(k)) * sub.coefficients[k]).real();
      EXPECT_GE(lhs, sub.linear[k] * (1.0 - 1e-9));
    }
  }
}

TEST(ReconstructPrimalTest, IdentityMetricStaysInSpan) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXcd h = random_complex(9, 3, seed + 300);
    const ScaSubproblem sub = build_sca_subproblem(random_complex(9, 1, seed + 400), h);
    const Eigen::VectorXcd x = reconstruct_primal(sub, solve_nnqp(sub).lambda);
    const Eigen::MatrixXcd projector = testing::column_space_projector(h);
    EXPECT_LE((x - projector * x).norm(), 1e-10 * x.norm());
  }
}

}  // namespace
}  // namespace aircomp

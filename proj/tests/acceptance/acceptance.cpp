// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aircomp/algorithms.hpp"
#include "aircomp/experiments.hpp"
#include "aircomp/nnqp.hpp"
#include "aircomp/sdp.hpp"
#include "oracles.hpp"

namespace {

using namespace aircomp;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, fmt, a, b, c, d);
  return buffer;
}

ExperimentConfig reference_config() {
  ExperimentConfig config;  // library defaults are the reference scenario
  config.jobs = 1;
  return config;
}

std::map<std::pair<std::string, int>, double> mean_mse_by(const std::vector<ExperimentRecord>& records,
                                                          bool by_antennas) {
  std::map<std::pair<std::string, int>, double> out;
  for (const AggregateRow& row : aggregate(records)) {
    out[{row.algorithm, by_antennas ? row.antennas : row.devices}] = row.mse_mean;
  }
  return out;
}

int count_not_ok(const std::vector<ExperimentRecord>& records) {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const auto& r) { return r.status != "ok"; }));
}

// 1. Tiny instances against the direction-grid oracle.
Outcome oracle_equivalence() {
  const auto start = Clock::now();
  const ExperimentConfig config = reference_config();
  SystemConfig system = config.system;
  system.num_antennas = 2;
  system.num_devices = 2;
  double worst = 0.0;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t seed = realization_seed(101, SweepAxis::antennas, 2, r);
    const ChannelSet channels = realization_channels(system, seed);
    // The grid works on unit-power channels; MSE scales with the square.
    const double s = 1.0 / std::sqrt(channels.h.colwise().squaredNorm().mean());
    const double oracle = testing::two_antenna_oracle_mse(s * channels.h, system.link.power_limit,
                                                          system.link.noise_power) * s * s;
    for (const Algorithm algorithm : kAllAlgorithms) {
      Rng rng = algorithm_rng(seed, algorithm);
      const double mse =
          run_algorithm(algorithm, channels, system.link, system.solver, rng).mse;
      worst = std::max(worst, mse / oracle - 1.0);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 0.01 && elapsed <= 60.0,
          format("worst excess over oracle %.3e (limit 1e-2), %.1f s (limit 60 s)", worst,
                 elapsed)};
}

// 2. Closed forms against the general MSE expression.
Outcome closed_form_consistency() {
  std::mt19937_64 dims(2);
  double worst_mse = 0.0;
  double worst_power = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(dims() % 16);
    const int k = 1 + static_cast<int>(dims() % 8);
    Rng rng(1000 + i);
    const ChannelSet channels = sample_channel(GeometryConfig{}, FadingConfig{}, n, k, rng);
    const Eigen::VectorXcd m = testing::random_complex(n, 1, 2000 + i);
    const LinkBudget link;
    const TransmitDesign design = design_transmit(m, channels, link.power_limit);
    const double general = general_mse(m, design.w, design.eta, channels, link.noise_power);
    const double analytic = *analytic_mse(m, channels, link);
    worst_mse = std::max(worst_mse, std::abs(general / analytic - 1.0));
    Eigen::Index weakest = 0;
    effective_gains(m, channels.h).minCoeff(&weakest);
    worst_power = std::max(worst_power,
                           std::abs(std::norm(design.w[weakest]) / link.power_limit - 1.0));
    worst_power = std::max(worst_power,
                           design.w.cwiseAbs2().maxCoeff() / link.power_limit - 1.0);
  }
  return {worst_mse <= 1e-9 && worst_power <= 1e-9,
          format("max relative MSE mismatch %.2e, max power deviation %.2e (limits 1e-9)",
                 worst_mse, worst_power)};
}

// 3. Every SCA iterate after the first lies in the column space of H.
Outcome span_property() {
  SolverOptions options;
  options.record_iterates = true;
  double worst = 0.0;
  int iterates = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const int n = 4 + static_cast<int>(i % 5) * 4;
    const int k = 2 + static_cast<int>(i % 4) * 2;
    Rng rng(3000 + i);
    const ChannelSet channels = sample_channel(GeometryConfig{}, FadingConfig{}, n, k, rng);
    // Random starts leave span(H) on purpose; half the runs start from SDR.
    Eigen::VectorXcd init;
    if (i % 2 == 0) {
      init = feasibility_rescale(testing::random_complex(n, 1, 4000 + i), channels);
    } else {
      init = direct_sdr(channels, LinkBudget{}, options, rng).m;
    }
    const BeamformingSolution s = direct_sca(channels, init, LinkBudget{}, options);
    const Eigen::MatrixXcd projector = testing::column_space_projector(channels.h);
    for (const Eigen::VectorXcd& m : s.diagnostics.iterates) {
      worst = std::max(worst, (m - projector * m).norm() / m.norm());
      ++iterates;
    }
  }
  return {worst <= 1e-8 && iterates > 0,
          format("max ||(I - P_H) m|| / ||m|| = %.2e over %.0f iterates (limit 1e-8)", worst,
                 iterates)};
}

// 4. SCA descent and improvement over the reduced relaxation.
Outcome sca_descent() {
  const ExperimentConfig config = reference_config();
  int violations = 0;
  int runs = 0;
  double worst_rise = 0.0;
  for (const int n : {8, 16, 32}) {
    SystemConfig system = system_at(config, n);
    for (int r = 0; r < 16; ++r) {
      const std::uint64_t seed = realization_seed(404, SweepAxis::antennas, n, r);
      const ChannelSet channels = realization_channels(system, seed);
      Rng sdr_rng = algorithm_rng(seed, Algorithm::sdr_opt);
      Rng sca_rng = algorithm_rng(seed, Algorithm::sca_opt);
      Rng direct_rng = algorithm_rng(seed, Algorithm::direct_sca);
      const BeamformingSolution relaxed = sdr_opt(channels, system.link, system.solver, sdr_rng);
      const BeamformingSolution reduced = sca_opt(channels, system.link, system.solver, sca_rng);
      const BeamformingSolution direct =
          direct_sca_from_sdr(channels, system.link, system.solver, direct_rng);
      for (const auto* s : {&reduced, &direct}) {
        const auto& trace = s->diagnostics.objective_trace;
        for (std::size_t t = 1; t < trace.size(); ++t) {
          if (trace[t] > trace[t - 1]) {
            ++violations;
            worst_rise = std::max(worst_rise, trace[t] / trace[t - 1] - 1.0);
          }
        }
      }
      if (reduced.mse > relaxed.mse) ++violations;
      ++runs;
    }
  }
  return {violations == 0,
          format("%.0f runs, %.0f violations (largest trace rise %.2e)", runs, violations,
                 worst_rise)};
}

// 5. MSE decreases with the number of antennas; reduced and direct SCA agree.
Outcome mse_versus_antennas() {
  const auto start = Clock::now();
  ExperimentConfig config = reference_config();
  config.system.num_devices = 10;
  config.system.realizations = 32;
  config.sweep_values = {8, 16, 32, 64};
  config.algorithms = {Algorithm::direct_sca, Algorithm::sca_opt};
  config.master_seed = 505;
  config.warmup = false;
  const auto records = run_sweep(config);

  const auto means = mean_mse_by(records, true);
  bool decreasing = true;
  std::ostringstream curve;
  for (std::size_t i = 0; i < config.sweep_values.size(); ++i) {
    const double value = means.at({"sca-opt", config.sweep_values[i]});
    curve << (i ? ", " : "") << "N=" << config.sweep_values[i] << ": " << value;
    if (i > 0 && !(value < means.at({"sca-opt", config.sweep_values[i - 1]}))) decreasing = false;
  }
  double total = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i + 1 < records.size(); i += 2) {
    const auto& direct = records[i];
    const auto& reduced = records[i + 1];
    total += std::abs(reduced.mse - direct.mse) / direct.mse;
    ++pairs;
  }
  const double mean_gap = total / pairs;
  const double elapsed = seconds_since(start);
  return {decreasing && mean_gap <= 0.02 && elapsed <= 900.0,
          "mean sca-opt MSE " + curve.str() +
              format("; mean |sca-opt - direct-sca| / direct-sca %.2e (limit 2e-2); %.0f "
                     "non-ok rows; %.1f s",
                     mean_gap, count_not_ok(records), elapsed)};
}

// 6. Reduced relaxation time is flat in N; direct relaxation time grows.
Outcome time_versus_antennas() {
  const auto start = Clock::now();
  ExperimentConfig config = reference_config();
  config.system.num_devices = 10;
  config.system.realizations = 8;
  config.sweep_values = {32, 64, 128};
  config.algorithms = {Algorithm::direct_sdr, Algorithm::sdr_opt};
  config.master_seed = 606;
  config.jobs = 1;
  config.warmup = true;
  const auto records = run_sweep(config);

  std::map<std::pair<std::string, int>, double> time;
  for (const AggregateRow& row : aggregate(records)) {
    time[{row.algorithm, row.antennas}] = row.solve_seconds_mean;
  }
  double lo = 1e300;
  double hi = 0.0;
  for (const int n : config.sweep_values) {
    lo = std::min(lo, time.at({"sdr-opt", n}));
    hi = std::max(hi, time.at({"sdr-opt", n}));
  }
  const double reduced_spread = hi / lo;
  const double direct_growth = time.at({"direct-sdr", 128}) / time.at({"direct-sdr", 32});
  const double elapsed = seconds_since(start);
  return {reduced_spread < 2.0 && direct_growth > 4.0 && elapsed <= 1800.0,
          format("sdr-opt max/min mean time %.2f (limit < 2), direct-sdr N=128/N=32 %.1f "
                 "(limit > 4), %.1f s",
                 reduced_spread, direct_growth, elapsed) +
              format(" [direct-sdr N=32 %.4f s, N=128 %.4f s; sdr-opt N=32 %.5f s, N=128 %.5f s]",
                     time.at({"direct-sdr", 32}), time.at({"direct-sdr", 128}),
                     time.at({"sdr-opt", 32}), time.at({"sdr-opt", 128}))};
}

// 7. MSE increases with the number of devices.
Outcome mse_versus_devices() {
  const auto start = Clock::now();
  ExperimentConfig config = reference_config();
  config.axis = SweepAxis::devices;
  config.system.num_antennas = 32;
  config.system.realizations = 32;
  config.sweep_values = {2, 4, 6, 8, 10, 12};
  config.algorithms = {Algorithm::sca_opt};
  config.master_seed = 707;
  config.warmup = false;
  const auto records = run_sweep(config);
  const auto means = mean_mse_by(records, false);
  bool increasing = true;
  std::ostringstream curve;
  for (std::size_t i = 0; i < config.sweep_values.size(); ++i) {
    const double value = means.at({"sca-opt", config.sweep_values[i]});
    curve << (i ? ", " : "") << "K=" << config.sweep_values[i] << ": " << value;
    if (i > 0 && !(value > means.at({"sca-opt", config.sweep_values[i - 1]}))) increasing = false;
  }
  const double elapsed = seconds_since(start);
  return {increasing && elapsed <= 900.0,
          "mean sca-opt MSE " + curve.str() + format("; %.1f s", elapsed)};
}

// 8. Analytic MSE against Monte Carlo transmission.
Outcome monte_carlo_validation() {
  ExperimentConfig config = reference_config();
  config.system.realizations = 8;
  config.master_seed = 808;
  ValidationOptions options;
  options.algorithm = Algorithm::sca_opt;
  options.samples = 100000;
  const ValidationReport report = validate_mode(config, options);
  double worst = 0.0;
  for (const auto& row : report.rows) worst = std::max(worst, row.relative_gap);
  return {report.passed && report.mean_relative_gap <= 0.02,
          format("mean relative gap %.2e (limit 2e-2), worst %.2e, %.0f samples x 8",
                 report.mean_relative_gap, worst, report.samples)};
}

// 9. Solver certificates on analytic SDPs and brute-force NNQP.
Outcome solver_certificates() {
  std::vector<std::pair<std::string, SdpProblem>> problems;
  {
    SdpProblem p;
    p.objective = Eigen::MatrixXcd::Identity(3, 3);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 3);
    a(0, 0) = 1.0;
    p.constraints.push_back({a, 1.0});
    problems.emplace_back("trace", p);
  }
  {
    const Eigen::VectorXcd h = testing::random_complex(5, 1, 9);
    SdpProblem p;
    p.objective = Eigen::MatrixXcd::Identity(5, 5);
    p.constraints.push_back({h * h.adjoint(), 1.0});
    problems.emplace_back("matched", p);
  }
  {
    const Eigen::MatrixXcd h = testing::random_complex(6, 3, 10);
    const ReducedProblem reduced = reduce(h);
    SdpProblem p;
    p.objective = reduced.d;
    for (int k = 0; k < 3; ++k) {
      p.constraints.push_back({reduced.f.col(k) * reduced.f.col(k).adjoint(), 1.0});
    }
    problems.emplace_back("reduced K=3", p);
  }
  double worst_gap = 0.0;
  bool all_optimal = true;
  for (const auto& [name, problem] : problems) {
    const SdpSolution s = solve_sdp(problem);
    all_optimal = all_optimal && s.status == SdpStatus::optimal;
    worst_gap = std::max(worst_gap, std::abs(s.gap) / (1.0 + std::abs(s.primal_objective)));
  }

  double worst_nnqp = 0.0;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 1 + trial % 5;
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd r(k);
    for (int i = 0; i < k; ++i) {
      r[i] = normal(rng);
      for (int j = 0; j < k; ++j) g(i, j) = normal(rng);
    }
    const Eigen::MatrixXd q = g * g.transpose();
    const Eigen::VectorXd oracle = testing::nnqp_enumeration(q, r);
    const NnqpResult result = solve_nnqp(q, r);
    worst_nnqp = std::max(worst_nnqp,
                          (result.lambda - oracle).cwiseAbs().maxCoeff() / (1.0 + oracle.norm()));
  }
  return {all_optimal && worst_gap <= 1e-7 && worst_nnqp <= 1e-8,
          format("worst SDP relative gap %.2e (limit 1e-7), worst NNQP deviation from "
                 "enumeration %.2e (limit 1e-8)",
                 worst_gap, worst_nnqp)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 oracle-equivalence", oracle_equivalence},
      {"2 closed-form-consistency", closed_form_consistency},
      {"3 span-property", span_property},
      {"4 sca-descent", sca_descent},
      {"5 mse-vs-antennas", mse_versus_antennas},
      {"6 time-vs-antennas", time_versus_antennas},
      {"7 mse-vs-devices", mse_versus_devices},
      {"8 monte-carlo-validation", monte_carlo_validation},
      {"9 solver-certificates", solver_certificates},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& error) {
      outcome = {false, std::string("exception: ") + error.what()};
    }
    failures += !outcome.passed;
    std::printf("[%s] %s: %s\n", outcome.passed ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

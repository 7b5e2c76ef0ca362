#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/config.hpp"

namespace aircomp {

/// One (realization, algorithm, N, K) result row.
struct ExperimentRecord {
  int realization = 0;
  std::uint64_t seed = 0;  // child seed of the realization
  std::string algorithm;
  int antennas = 0;
  int devices = 0;
  double mse = 0.0;
  double solve_seconds = 0.0;
  double init_seconds = 0.0;  // SDR initialization share for the SCA variants
  int iterations = 0;
  double sdp_gap = 0.0;  // relative duality gap of the relaxation
  std::string status;    // ok | iteration-cap | sdp-inaccurate | failed
  std::uint64_t channel_digest = 0;

  bool operator==(const ExperimentRecord&) const = default;
};

/// Called once per finished record, possibly from worker threads (calls are
/// serialized by run_sweep).
using ProgressSink = std::function<void(const ExperimentRecord&)>;

/// Child seed for one sweep point: BLAKE2b of (master, axis, value, index).
std::uint64_t realization_seed(std::uint64_t master, SweepAxis axis, int value,
                               int realization);

/// Scenario for one sweep point.
SystemConfig system_at(const ExperimentConfig& config, int sweep_value);

/// Channel drawn for a realization from its child seed.
ChannelSet realization_channels(const SystemConfig& system, std::uint64_t child_seed);

/// Solver stream for a realization. SDR and its SCA refinement share a
/// stream, so the SCA variant starts from the SDR solution of the same row.
Rng algorithm_rng(std::uint64_t child_seed, Algorithm algorithm);

/// Runs every algorithm on a shared channel per (sweep value, realization).
/// Records are returned in (sweep value, realization, algorithm) order no
/// matter how many jobs run. Algorithm failures become status rows.
std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config,
                                        const ProgressSink& sink = {});

struct AggregateRow {
  std::string algorithm;
  int antennas = 0;
  int devices = 0;
  int count_ok = 0;
  int count_failed = 0;  // rows with any status other than ok
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double solve_seconds_mean = 0.0;
  double solve_seconds_stderr = 0.0;
  double init_seconds_mean = 0.0;
  double init_seconds_stderr = 0.0;
  double iterations_mean = 0.0;
  bool all_failed = false;
};

/// Means and standard errors over ok rows per (algorithm, N, K). Output is
/// sorted by key and independent of input order.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

struct ValidationRow {
  int realization = 0;
  std::uint64_t seed = 0;
  double analytic_mse = 0.0;
  double empirical_mse = 0.0;
  double relative_gap = 0.0;  // |empirical - analytic| / analytic (absolute if analytic = 0)
};

struct ValidationOptions {
  std::optional<Algorithm> algorithm;      // defaults to the first configured one
  std::optional<double> noise_override;    // watts; 0 allowed for noiseless runs
  std::optional<int> samples;              // defaults to config.validate_samples
  double pass_threshold = 0.02;
};

struct ValidationReport {
  std::string algorithm;
  int samples = 0;
  std::vector<ValidationRow> rows;
  double mean_relative_gap = 0.0;
  bool passed = false;
};

/// Empirical (Monte Carlo) against analytic MSE at the config's N and K.
ValidationReport validate_mode(const ExperimentConfig& config,
                               const ValidationOptions& options = {});

}  // namespace aircomp

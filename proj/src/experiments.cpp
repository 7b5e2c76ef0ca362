#include "aircomp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

namespace aircomp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view stream_label(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::direct_sdr:
    case Algorithm::direct_sca:
      return "direct-relaxation";
    case Algorithm::sdr_opt:
    case Algorithm::sca_opt:
      return "reduced-relaxation";
  }
  return "unknown";
}

ExperimentRecord solve_one(Algorithm algorithm, const ChannelSet& channels,
                           const SystemConfig& system, std::uint64_t child_seed) {
  ExperimentRecord record;
  record.seed = child_seed;
  record.algorithm = algorithm_name(algorithm);
  record.antennas = channels.antennas();
  record.devices = channels.devices();
  record.channel_digest = channels.digest();
  Rng rng = algorithm_rng(child_seed, algorithm);
  try {
    const BeamformingSolution solution =
        run_algorithm(algorithm, channels, system.link, system.solver, rng);
    record.mse = solution.mse;
    record.solve_seconds = solution.diagnostics.solve_seconds;
    record.init_seconds = solution.diagnostics.init_seconds;
    record.iterations = solution.diagnostics.iterations;
    record.sdp_gap = solution.diagnostics.sdp_gap;
    record.status = to_string(solution.diagnostics.status);
  } catch (const std::exception&) {
    record.mse = kNaN;
    record.sdp_gap = kNaN;
    record.status = "failed";
  }
  return record;
}

struct Moments {
  double mean = kNaN;
  double stderr_ = kNaN;
};

// Summation over sorted values keeps the result independent of input order.
Moments moments(std::vector<double> values) {
  Moments out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    out.stderr_ = 0.0;
    return out;
  }
  double squares = 0.0;
  for (const double v : values) squares += (v - out.mean) * (v - out.mean);
  out.stderr_ = std::sqrt(squares / (n - 1.0)) / std::sqrt(n);
  return out;
}

}  // namespace

std::uint64_t realization_seed(std::uint64_t master, SweepAxis axis, int value,
                               int realization) {
  return derive_seed(master, {label_tag(to_string(axis)), static_cast<std::uint64_t>(value),
                              static_cast<std::uint64_t>(realization)});
}

ChannelSet realization_channels(const SystemConfig& system, std::uint64_t child_seed) {
  Rng rng(derive_seed(child_seed, {label_tag("channel")}));
  return sample_channel(system.geometry, system.fading, system.num_antennas,
                        system.num_devices, rng);
}

Rng algorithm_rng(std::uint64_t child_seed, Algorithm algorithm) {
  return Rng(derive_seed(child_seed, {label_tag(stream_label(algorithm))}));
}

SystemConfig system_at(const ExperimentConfig& config, int sweep_value) {
  SystemConfig system = config.system;
  if (config.axis == SweepAxis::antennas) {
    system.num_antennas = sweep_value;
  } else {
    system.num_devices = sweep_value;
  }
  return system;
}

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config,
                                        const ProgressSink& sink) {
  config.validate();
  const int realizations = config.system.realizations;
  const std::size_t tasks = config.sweep_values.size() * static_cast<std::size_t>(realizations);

  if (config.warmup) {
    // Discarded run so that first-call effects do not land in the timings.
    const SystemConfig system = system_at(config, config.sweep_values.front());
    const std::uint64_t seed = derive_seed(config.master_seed, {label_tag("warmup")});
    const ChannelSet channels = realization_channels(system, seed);
    for (const auto algorithm : config.algorithms) solve_one(algorithm, channels, system, seed);
  }

  std::vector<std::vector<ExperimentRecord>> results(tasks);
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;

  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const int value = config.sweep_values[task / realizations];
      const int realization = static_cast<int>(task % realizations);
      const SystemConfig system = system_at(config, value);
      const std::uint64_t seed =
          realization_seed(config.master_seed, config.axis, value, realization);
      const ChannelSet channels = realization_channels(system, seed);
      for (const auto algorithm : config.algorithms) {
        ExperimentRecord record = solve_one(algorithm, channels, system, seed);
        record.realization = realization;
        if (sink) {
          std::lock_guard lock(sink_mutex);
          sink(record);
        }
        results[task].push_back(std::move(record));
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<ExperimentRecord> records;
  records.reserve(tasks * config.algorithms.size());
  for (auto& batch : results) {
    for (auto& record : batch) records.push_back(std::move(record));
  }
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, std::vector<const ExperimentRecord*>> cells;
  for (const auto& record : records) {
    cells[{record.algorithm, record.antennas, record.devices}].push_back(&record);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : cells) {
    AggregateRow row;
    std::tie(row.algorithm, row.antennas, row.devices) = key;
    std::vector<double> mse, solve, init, iterations;
    for (const auto* record : members) {
      if (record->status != "ok") {
        ++row.count_failed;
        continue;
      }
      ++row.count_ok;
      mse.push_back(record->mse);
      solve.push_back(record->solve_seconds);
      init.push_back(record->init_seconds);
      iterations.push_back(record->iterations);
    }
    const Moments m = moments(mse);
    const Moments s = moments(solve);
    const Moments i = moments(init);
    row.mse_mean = m.mean;
    row.mse_stderr = m.stderr_;
    row.solve_seconds_mean = s.mean;
    row.solve_seconds_stderr = s.stderr_;
    row.init_seconds_mean = i.mean;
    row.init_seconds_stderr = i.stderr_;
    row.iterations_mean = moments(iterations).mean;
    row.all_failed = row.count_ok == 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

ValidationReport validate_mode(const ExperimentConfig& config,
                               const ValidationOptions& options) {
  config.validate();
  const Algorithm algorithm = options.algorithm.value_or(config.algorithms.front());
  const int samples = options.samples.value_or(config.validate_samples);
  if (samples < 1) throw std::invalid_argument("validate: samples must be >= 1");

  SystemConfig system = config.system;
  if (options.noise_override) {
    if (!(*options.noise_override >= 0.0)) {
      throw std::invalid_argument("validate: noise override must be >= 0");
    }
    system.link.noise_power = *options.noise_override;
  }

  ValidationReport report;
  report.algorithm = algorithm_name(algorithm);
  report.samples = samples;
  double gap_total = 0.0;
  for (int r = 0; r < system.realizations; ++r) {
    const std::uint64_t seed =
        realization_seed(config.master_seed, SweepAxis::antennas, system.num_antennas, r);
    const ChannelSet channels = realization_channels(system, seed);
    Rng solver_rng = algorithm_rng(seed, algorithm);
    const BeamformingSolution solution =
        run_algorithm(algorithm, channels, system.link, system.solver, solver_rng);
    Rng transmission_rng(derive_seed(seed, {label_tag("transmission")}));

    ValidationRow row;
    row.realization = r;
    row.seed = seed;
    row.analytic_mse = solution.mse;
    row.empirical_mse = simulate_transmission(solution, channels, system.link.noise_power,
                                              samples, transmission_rng);
    const double difference = std::abs(row.empirical_mse - row.analytic_mse);
    row.relative_gap = row.analytic_mse > 0.0 ? difference / row.analytic_mse : difference;
    gap_total += row.relative_gap;
    report.rows.push_back(row);
  }
  report.mean_relative_gap = gap_total / static_cast<double>(report.rows.size());
  report.passed = report.mean_relative_gap <= options.pass_threshold;
  return report;
}

}  // namespace aircomp

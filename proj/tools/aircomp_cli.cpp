// Command-line driver: single solves, antenna/device sweeps and Monte Carlo
// validation. Errors end the process with one `error: <kind>: <message>`
// line on stderr.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aircomp/config.hpp"
#include "aircomp/emit.hpp"
#include "aircomp/experiments.hpp"

namespace {

using namespace aircomp;

// Failure that maps to a specific error kind and exit code.
class CliError : public std::runtime_error {
 public:
  CliError(std::string kind, const std::string& message, int code = 1)
      : std::runtime_error(message), kind_(std::move(kind)), code_(code) {}
  const std::string& kind() const { return kind_; }
  int code() const { return code_; }

 private:
  std::string kind_;
  int code_;
};

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "csv";
  std::string algorithms;
  std::optional<int> jobs;
  std::optional<int> realizations;
  std::vector<int> values;
  bool aggregate = false;
  bool digest = false;
};

struct SolveOptions {
  std::optional<int> antennas;
  std::optional<int> devices;
  int realization = 0;
};

struct ValidateOptions {
  std::optional<int> samples;
  std::optional<double> noise_dbm;
  bool noiseless = false;
};

void add_common(CLI::App& app, CommonOptions& o, bool sweep) {
  app.add_option("--config", o.config_path, "Scenario file (key = value lines)");
  app.add_option("--seed", o.seed, "Master seed (unsigned 64-bit)");
  app.add_option("--output", o.output, "Output file (stdout when omitted)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--algorithms", o.algorithms,
                 "Comma list of direct-sdr, direct-sca, sdr-opt, sca-opt");
  app.add_option("--realizations", o.realizations, "Channel realizations per point")
      ->check(CLI::PositiveNumber);
  if (sweep) {
    app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--values", o.values, "Sweep values, overriding the config")->delimiter(',');
    app.add_flag("--aggregate", o.aggregate, "Emit per-point means instead of raw records");
    app.add_flag("--digest", o.digest, "Append the channel digest column to raw records");
  }
}

ExperimentConfig load_config(const CommonOptions& o) {
  ExperimentConfig config;
  try {
    if (!o.config_path.empty()) config = parse_config_file(o.config_path);
    if (o.seed) config.master_seed = *o.seed;
    if (!o.algorithms.empty()) config.algorithms = parse_algorithm_list(o.algorithms);
    if (o.jobs) config.jobs = *o.jobs;
    if (o.realizations) config.system.realizations = *o.realizations;
    if (!o.values.empty()) config.sweep_values = o.values;
    if (!o.output.empty()) config.output = o.output;
    config.validate();
  } catch (const ConfigError& error) {
    throw CliError("config", error.what());
  } catch (const std::invalid_argument& error) {
    throw CliError("config", error.what());
  }
  return config;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  try {
    write_text_file(path, text);
  } catch (const std::exception& error) {
    throw CliError("io", error.what());
  }
}

// Appends finished records to `<output>.partial` so an interrupted sweep
// keeps everything completed so far. Removed once the final file is written.
class PartialWriter {
 public:
  explicit PartialWriter(const std::string& output) {
    if (output.empty()) return;
    path_ = output + ".partial";
    stream_.open(path_, std::ios::trunc);
    if (!stream_) throw CliError("io", "cannot open '" + path_.string() + "' for writing");
    stream_ << kRecordCsvHeader << ",channel_digest\n" << std::flush;
  }

  void append(const ExperimentRecord& record) {
    if (!stream_.is_open()) return;
    stream_ << record_csv_row(record, true) << '\n' << std::flush;
  }

  void finish() {
    if (!stream_.is_open()) return;
    stream_.close();
    std::error_code ignored;
    std::filesystem::remove(path_, ignored);
  }

 private:
  std::filesystem::path path_;
  std::ofstream stream_;
};

int run_sweep_command(const CommonOptions& o, SweepAxis axis) {
  ExperimentConfig config = load_config(o);
  if (!o.config_path.empty() && config.axis != axis && o.values.empty()) {
    throw CliError("config", "config '" + o.config_path + "' sweeps " + to_string(config.axis) +
                                 "; pass --values to sweep " + to_string(axis));
  }
  config.axis = axis;
  const OutputFormat format = parse_output_format(o.format);

  PartialWriter partial(config.output);
  const auto records =
      run_sweep(config, [&](const ExperimentRecord& record) { partial.append(record); });

  std::string text;
  if (o.aggregate) {
    const auto rows = aggregate(records);
    text = format == OutputFormat::csv ? aggregates_to_csv(rows) : aggregates_to_json(rows);
  } else {
    text = format == OutputFormat::csv ? records_to_csv(records, o.digest)
                                       : records_to_json(records, o.digest);
  }
  write_output(config.output, text);
  partial.finish();

  int failed = 0;
  for (const auto& record : records) failed += record.status == "failed";
  if (failed > 0) {
    std::cerr << "warning: " << failed << " of " << records.size()
              << " records failed; see the status column\n";
  }
  return 0;
}

int run_solve_command(const CommonOptions& o, const SolveOptions& s) {
  ExperimentConfig config = load_config(o);
  SystemConfig system = config.system;
  if (s.antennas) system.num_antennas = *s.antennas;
  if (s.devices) system.num_devices = *s.devices;
  try {
    system.validate();
  } catch (const std::invalid_argument& error) {
    throw CliError("config", error.what());
  }
  if (s.realization < 0) throw CliError("usage", "--realization must be >= 0", 2);

  const std::uint64_t seed = realization_seed(config.master_seed, SweepAxis::antennas,
                                              system.num_antennas, s.realization);
  const ChannelSet channels = realization_channels(system, seed);

  nlohmann::json results = nlohmann::json::array();
  std::ostringstream table;
  table << "antennas " << system.num_antennas << ", devices " << system.num_devices
        << ", seed " << seed << ", channel digest " << channels.digest() << "\n";
  for (const Algorithm algorithm : config.algorithms) {
    Rng rng = algorithm_rng(seed, algorithm);
    BeamformingSolution solution;
    try {
      solution = run_algorithm(algorithm, channels, system.link, system.solver, rng);
    } catch (const std::exception& error) {
      throw CliError("solver", std::string(algorithm_name(algorithm)) + ": " + error.what());
    }
    const auto& d = solution.diagnostics;
    results.push_back({{"algorithm", algorithm_name(algorithm)},
                       {"mse", solution.mse},
                       {"beamformer_norm_squared", solution.m.squaredNorm()},
                       {"eta", solution.design.eta},
                       {"iterations", d.iterations},
                       {"solve_seconds", d.solve_seconds},
                       {"init_seconds", d.init_seconds},
                       {"sdp_objective", d.sdp_objective},
                       {"sdp_gap", d.sdp_gap},
                       {"rank_ratio", d.rank_ratio},
                       {"status", to_string(d.status)},
                       {"warnings", d.warnings}});
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-11s mse %.6e  iterations %3d  time %.4fs (init %.4fs)  sdp gap %.1e  %s\n",
                  algorithm_name(algorithm), solution.mse, d.iterations, d.solve_seconds,
                  d.init_seconds, d.sdp_gap, to_string(d.status));
    table << line;
  }

  std::string text;
  if (o.format == "json") {
    const nlohmann::json document = {{"antennas", system.num_antennas},
                                     {"devices", system.num_devices},
                                     {"seed", seed},
                                     {"channel_digest", channels.digest()},
                                     {"results", results}};
    text = document.dump(2) + "\n";
  } else {
    text = table.str();
  }
  write_output(config.output, text);
  return 0;
}

int run_validate_command(const CommonOptions& o, const ValidateOptions& v) {
  const ExperimentConfig config = load_config(o);
  ValidationOptions options;
  options.samples = v.samples;
  if (v.noiseless) {
    options.noise_override = 0.0;
  } else if (v.noise_dbm) {
    options.noise_override = dbm_to_watts(*v.noise_dbm);
  }
  ValidationReport report;
  try {
    report = validate_mode(config, options);
  } catch (const std::invalid_argument& error) {
    throw CliError("config", error.what());
  }

  std::string text;
  if (o.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
      rows.push_back({{"realization", row.realization},
                      {"seed", row.seed},
                      {"analytic_mse", row.analytic_mse},
                      {"empirical_mse", row.empirical_mse},
                      {"relative_gap", row.relative_gap}});
    }
    text = nlohmann::json{{"algorithm", report.algorithm},
                          {"samples", report.samples},
                          {"mean_relative_gap", report.mean_relative_gap},
                          {"passed", report.passed},
                          {"rows", rows}}
               .dump(2) +
           "\n";
  } else {
    std::ostringstream out;
    out << "realization,seed,analytic_mse,empirical_mse,relative_gap\n";
    for (const auto& row : report.rows) {
      out << row.realization << ',' << row.seed << ',' << format_double(row.analytic_mse) << ','
          << format_double(row.empirical_mse) << ',' << format_double(row.relative_gap) << '\n';
    }
    text = out.str();
  }
  write_output(config.output, text);
  std::cerr << report.algorithm << ": mean relative gap " << report.mean_relative_gap << " over "
            << report.rows.size() << " realizations, " << report.samples << " samples each\n";
  if (!report.passed) {
    throw CliError("validation", "mean relative gap " + format_double(report.mean_relative_gap) +
                                     " exceeds 0.02");
  }
  return 0;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receive beamforming for over-the-air computation"};
  app.require_subcommand(1);

  CommonOptions common;
  SolveOptions solve;
  ValidateOptions validate;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one channel realization");
  add_common(*solve_cmd, common, false);
  solve_cmd->add_option("--antennas,-N", solve.antennas, "Override num_antennas")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--devices,-K", solve.devices, "Override num_devices")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--realization", solve.realization, "Realization index");

  auto* sweep_n = app.add_subcommand("sweep-antennas", "Sweep the number of AP antennas");
  add_common(*sweep_n, common, true);
  auto* sweep_k = app.add_subcommand("sweep-devices", "Sweep the number of devices");
  add_common(*sweep_k, common, true);

  auto* validate_cmd =
      app.add_subcommand("validate", "Compare analytic and Monte Carlo MSE per realization");
  add_common(*validate_cmd, common, false);
  validate_cmd->add_option("--samples", validate.samples, "Transmission samples per realization")
      ->check(CLI::PositiveNumber);
  validate_cmd->add_option("--noise-dbm", validate.noise_dbm, "Override the noise power");
  validate_cmd->add_flag("--noiseless", validate.noiseless, "Run without receiver noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*solve_cmd) return run_solve_command(common, solve);
    if (*sweep_n) return run_sweep_command(common, SweepAxis::antennas);
    if (*sweep_k) return run_sweep_command(common, SweepAxis::devices);
    if (*validate_cmd) return run_validate_command(common, validate);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

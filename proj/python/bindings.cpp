#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <stdexcept>
#include <string>

#include "aircomp/algorithms.hpp"
#include "aircomp/config.hpp"
#include "aircomp/core.hpp"
#include "aircomp/experiments.hpp"

namespace py = pybind11;
using namespace aircomp;

namespace {

Algorithm algorithm_from(const std::string& name) {
  const auto algorithm = parse_algorithm(name);
  if (!algorithm) throw std::invalid_argument("unknown algorithm '" + name + "'");
  return *algorithm;
}

ChannelSet channels_from(const Eigen::MatrixXcd& h) { return ChannelSet::from_matrix(h); }

}  // namespace

PYBIND11_MODULE(_core, module) {
  module.doc() = "Receive beamforming for over-the-air computation.";

  py::register_exception<SolverError>(module, "SolverError", PyExc_RuntimeError);
  py::register_exception<DegenerateChannelError>(module, "DegenerateChannelError",
                                                 PyExc_ArithmeticError);
  py::register_exception<ConfigError>(module, "ConfigError", PyExc_ValueError);

  py::class_<LinkBudget>(module, "LinkBudget")
      .def(py::init<>())
      .def(py::init([](double power_limit, double noise_power) {
             LinkBudget link{power_limit, noise_power};
             link.validate();
             return link;
           }),
           py::arg("power_limit"), py::arg("noise_power"))
      .def_readwrite("power_limit", &LinkBudget::power_limit)
      .def_readwrite("noise_power", &LinkBudget::noise_power);

  py::class_<GeometryConfig>(module, "GeometryConfig")
      .def(py::init<>())
      .def_readwrite("ap_position", &GeometryConfig::ap_position)
      .def_readwrite("region_center", &GeometryConfig::region_center)
      .def_readwrite("region_radius", &GeometryConfig::region_radius)
      .def_readwrite("antenna_spacing", &GeometryConfig::antenna_spacing);

  py::class_<FadingConfig>(module, "FadingConfig")
      .def(py::init<>())
      .def_readwrite("t0", &FadingConfig::t0)
      .def_readwrite("d0", &FadingConfig::d0)
      .def_readwrite("alpha", &FadingConfig::alpha)
      .def_readwrite("rician_beta", &FadingConfig::rician_beta);

  py::class_<SolverOptions>(module, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("sca_tolerance", &SolverOptions::sca_tolerance)
      .def_readwrite("sca_max_iterations", &SolverOptions::sca_max_iterations)
      .def_readwrite("randomization_candidates", &SolverOptions::randomization_candidates);

  py::class_<SystemConfig>(module, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("num_antennas", &SystemConfig::num_antennas)
      .def_readwrite("num_devices", &SystemConfig::num_devices)
      .def_readwrite("link", &SystemConfig::link)
      .def_readwrite("realizations", &SystemConfig::realizations)
      .def_readwrite("geometry", &SystemConfig::geometry)
      .def_readwrite("fading", &SystemConfig::fading)
      .def_readwrite("solver", &SystemConfig::solver);

  py::class_<ExperimentConfig>(module, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("system", &ExperimentConfig::system)
      .def_property(
          "axis", [](const ExperimentConfig& c) { return std::string(to_string(c.axis)); },
          [](ExperimentConfig& c, const std::string& axis) {
            if (axis == "antennas") {
              c.axis = SweepAxis::antennas;
            } else if (axis == "devices") {
              c.axis = SweepAxis::devices;
            } else {
              throw std::invalid_argument("axis must be 'antennas' or 'devices'");
            }
          })
      .def_readwrite("sweep_values", &ExperimentConfig::sweep_values)
      .def_property(
          "algorithms",
          [](const ExperimentConfig& c) {
            std::vector<std::string> names;
            for (const auto a : c.algorithms) names.emplace_back(algorithm_name(a));
            return names;
          },
          [](ExperimentConfig& c, const std::vector<std::string>& names) {
            std::vector<Algorithm> algorithms;
            for (const auto& name : names) algorithms.push_back(algorithm_from(name));
            c.algorithms = std::move(algorithms);
          })
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("jobs", &ExperimentConfig::jobs)
      .def_readwrite("validate_samples", &ExperimentConfig::validate_samples)
      .def_readwrite("warmup", &ExperimentConfig::warmup)
      .def("validate", &ExperimentConfig::validate);

  module.def("parse_config_text", &parse_config_text, py::arg("text"),
             py::arg("source") = "<inline>");
  module.def("parse_config_file", &parse_config_file, py::arg("path"));

  py::class_<SolverDiagnostics>(module, "SolverDiagnostics")
      .def_readonly("solver", &SolverDiagnostics::solver)
      .def_property_readonly("status",
                             [](const SolverDiagnostics& d) { return to_string(d.status); })
      .def_readonly("iterations", &SolverDiagnostics::iterations)
      .def_readonly("objective_trace", &SolverDiagnostics::objective_trace)
      .def_readonly("solve_seconds", &SolverDiagnostics::solve_seconds)
      .def_readonly("init_seconds", &SolverDiagnostics::init_seconds)
      .def_readonly("sdp_objective", &SolverDiagnostics::sdp_objective)
      .def_readonly("sdp_gap", &SolverDiagnostics::sdp_gap)
      .def_readonly("rank_ratio", &SolverDiagnostics::rank_ratio)
      .def_readonly("warnings", &SolverDiagnostics::warnings);

  py::class_<BeamformingSolution>(module, "BeamformingSolution")
      .def_readonly("m", &BeamformingSolution::m)
      .def_readonly("a", &BeamformingSolution::a)
      .def_property_readonly("w", [](const BeamformingSolution& s) { return s.design.w; })
      .def_property_readonly("eta", [](const BeamformingSolution& s) { return s.design.eta; })
      .def_readonly("mse", &BeamformingSolution::mse)
      .def_readonly("diagnostics", &BeamformingSolution::diagnostics);

  module.def(
      "sample_channel",
      [](const SystemConfig& system, std::uint64_t seed) {
        return realization_channels(system, seed).h;
      },
      py::arg("system"), py::arg("seed"),
      "N x K channel matrix drawn from the seed's channel stream.");

  module.def(
      "solve",
      [](const std::string& algorithm, const Eigen::MatrixXcd& h, const LinkBudget& link,
         std::uint64_t seed, const SolverOptions& options) {
        Rng rng(seed);
        return run_algorithm(algorithm_from(algorithm), channels_from(h), link, options, rng);
      },
      py::arg("algorithm"), py::arg("h"), py::arg("link"), py::arg("seed") = 0,
      py::arg("options") = SolverOptions{}, py::call_guard<py::gil_scoped_release>());

  module.def(
      "direct_sca",
      [](const Eigen::MatrixXcd& h, const Eigen::VectorXcd& init, const LinkBudget& link,
         const SolverOptions& options) {
        return aircomp::direct_sca(channels_from(h), init, link, options);
      },
      py::arg("h"), py::arg("init"), py::arg("link"), py::arg("options") = SolverOptions{});

  module.def(
      "transmit_scalars",
      [](const Eigen::VectorXcd& m, const Eigen::MatrixXcd& h, double eta) {
        return aircomp::transmit_scalars(m, channels_from(h), eta);
      },
      py::arg("m"), py::arg("h"), py::arg("eta"));
  module.def(
      "denoising_factor",
      [](const Eigen::VectorXcd& m, const Eigen::MatrixXcd& h, double power_limit) {
        return aircomp::denoising_factor(m, channels_from(h), power_limit);
      },
      py::arg("m"), py::arg("h"), py::arg("power_limit"));
  module.def(
      "analytic_mse",
      [](const Eigen::VectorXcd& m, const Eigen::MatrixXcd& h, const LinkBudget& link) {
        return aircomp::analytic_mse(m, channels_from(h), link);
      },
      py::arg("m"), py::arg("h"), py::arg("link"));

  py::class_<ExperimentRecord>(module, "ExperimentRecord")
      .def_readonly("realization", &ExperimentRecord::realization)
      .def_readonly("seed", &ExperimentRecord::seed)
      .def_readonly("algorithm", &ExperimentRecord::algorithm)
      .def_readonly("antennas", &ExperimentRecord::antennas)
      .def_readonly("devices", &ExperimentRecord::devices)
      .def_readonly("mse", &ExperimentRecord::mse)
      .def_readonly("solve_seconds", &ExperimentRecord::solve_seconds)
      .def_readonly("init_seconds", &ExperimentRecord::init_seconds)
      .def_readonly("iterations", &ExperimentRecord::iterations)
      .def_readonly("sdp_gap", &ExperimentRecord::sdp_gap)
      .def_readonly("status", &ExperimentRecord::status)
      .def_readonly("channel_digest", &ExperimentRecord::channel_digest);

  py::class_<AggregateRow>(module, "AggregateRow")
      .def_readonly("algorithm", &AggregateRow::algorithm)
      .def_readonly("antennas", &AggregateRow::antennas)
      .def_readonly("devices", &AggregateRow::devices)
      .def_readonly("count_ok", &AggregateRow::count_ok)
      .def_readonly("count_failed", &AggregateRow::count_failed)
      .def_readonly("mse_mean", &AggregateRow::mse_mean)
      .def_readonly("mse_stderr", &AggregateRow::mse_stderr)
      .def_readonly("solve_seconds_mean", &AggregateRow::solve_seconds_mean)
      .def_readonly("solve_seconds_stderr", &AggregateRow::solve_seconds_stderr)
      .def_readonly("init_seconds_mean", &AggregateRow::init_seconds_mean)
      .def_readonly("init_seconds_stderr", &AggregateRow::init_seconds_stderr)
      .def_readonly("iterations_mean", &AggregateRow::iterations_mean)
      .def_readonly("all_failed", &AggregateRow::all_failed);

  module.def(
      "run_sweep", [](const ExperimentConfig& config) { return run_sweep(config); },
      py::arg("config"), py::call_guard<py::gil_scoped_release>());
  module.def("aggregate", &aggregate, py::arg("records"));

  py::class_<ValidationRow>(module, "ValidationRow")
      .def_readonly("realization", &ValidationRow::realization)
      .def_readonly("seed", &ValidationRow::seed)
      .def_readonly("analytic_mse", &ValidationRow::analytic_mse)
      .def_readonly("empirical_mse", &ValidationRow::empirical_mse)
      .def_readonly("relative_gap", &ValidationRow::relative_gap);

  py::class_<ValidationReport>(module, "ValidationReport")
      .def_readonly("algorithm", &ValidationReport::algorithm)
      .def_readonly("samples", &ValidationReport::samples)
      .def_readonly("rows", &ValidationReport::rows)
      .def_readonly("mean_relative_gap", &ValidationReport::mean_relative_gap)
      .def_readonly("passed", &ValidationReport::passed);

  module.def(
      "validate",
      [](const ExperimentConfig& config, std::optional<std::string> algorithm,
         std::optional<int> samples, std::optional<double> noise_power) {
        ValidationOptions options;
        if (algorithm) options.algorithm = algorithm_from(*algorithm);
        options.samples = samples;
        options.noise_override = noise_power;
        return validate_mode(config, options);
      },
      py::arg("config"), py::arg("algorithm") = std::nullopt, py::arg("samples") = std::nullopt,
      py::arg("noise_power") = std::nullopt, py::call_guard<py::gil_scoped_release>());
}

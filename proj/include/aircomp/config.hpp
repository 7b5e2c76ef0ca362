#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aircomp/algorithms.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/core.hpp"

namespace aircomp {

/// Physical and solver parameters for one scenario. Everything is linear
/// (watts, linear gains); the config file carries dB values and explicit
/// units in the key names.
struct SystemConfig {
  int num_antennas = 32;
  int num_devices = 10;
  LinkBudget link;
  int realizations = 128;
  GeometryConfig geometry;
  FadingConfig fading;
  SolverOptions solver;

  void validate() const;
};

enum class SweepAxis { antennas, devices };

const char* to_string(SweepAxis axis);

struct ExperimentConfig {
  SystemConfig system;
  SweepAxis axis = SweepAxis::antennas;
  std::vector<int> sweep_values{8, 16, 32, 64};
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  std::uint64_t master_seed = 1;
  std::string output;
  int jobs = 1;
  int validate_samples = 100000;
  bool warmup = true;

  void validate() const;
};

/// Carries "<source>:<line>: key '<key>': <message>" context.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, std::string key, const std::string& message);

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::string source_;
  int line_;
  std::string key_;
};

double dbm_to_watts(double dbm);
double db_to_linear(double db);

/// Parses `key = value` lines ('#' starts a comment). Unknown keys, repeated
/// keys and invariant violations raise ConfigError. Omitted keys keep the
/// defaults above.
ExperimentConfig parse_config_text(std::string_view text,
                                   std::string_view source = "<inline>");
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Every recognised key, in file order of the reference config.
const std::vector<std::string>& config_keys();

/// Closest recognised key for a typo or a common alias, or empty.
std::string suggest_config_key(std::string_view unknown);

std::vector<Algorithm> parse_algorithm_list(std::string_view text);

}  // namespace aircomp

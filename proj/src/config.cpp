#include "aircomp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace aircomp {
namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    items.push_back(trim(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] != b[j - 1])});
      diagonal = above;
    }
  }
  return row[b.size()];
}

// Reads one value; `fail` reports a problem with the current line and key.
class ValueReader {
 public:
  ValueReader(std::string_view value, std::function<void(const std::string&)> fail)
      : value_(value), fail_(std::move(fail)) {}

  double real() const { return parse_real(value_); }

  long long integer() const {
    long long out = 0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, out);
    if (ec != std::errc() || ptr != end) fail_("expected an integer, got '" + std::string(value_) + "'");
    return out;
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t out = 0;
    const auto* end = value_.data() + value_.size();
    const auto [ptr, ec] = std::from_chars(value_.data(), end, out);
    if (ec != std::errc() || ptr != end) {
      fail_("expected an unsigned 64-bit integer, got '" + std::string(value_) + "'");
    }
    return out;
  }

  bool boolean() const {
    if (value_ == "true" || value_ == "yes" || value_ == "1") return true;
    if (value_ == "false" || value_ == "no" || value_ == "0") return false;
    fail_("expected true or false, got '" + std::string(value_) + "'");
    return false;
  }

  Vec3 vec3() const {
    const auto items = split_list(value_);
    if (items.size() != 3) fail_("expected three comma-separated numbers");
    return {parse_real(items[0]), parse_real(items[1]), parse_real(items[2])};
  }

  std::vector<int> int_list() const {
    std::vector<int> out;
    if (trim(value_).empty()) return out;
    for (const auto item : split_list(value_)) {
      int v = 0;
      const auto* end = item.data() + item.size();
      const auto [ptr, ec] = std::from_chars(item.data(), end, v);
      if (ec != std::errc() || ptr != end) fail_("expected integers, got '" + std::string(item) + "'");
      out.push_back(v);
    }
    return out;
  }

  std::string_view text() const { return value_; }

 private:
  double parse_real(std::string_view item) const {
    if (item == "inf" || item == "infinity") return std::numeric_limits<double>::infinity();
    double out = 0;
    const auto* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
      fail_("expected a number, got '" + std::string(item) + "'");
    }
    return out;
  }

  std::string_view value_;
  std::function<void(const std::string&)> fail_;
};

using Setter = std::function<void(ExperimentConfig&, const ValueReader&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"num_antennas", [](auto& c, const auto& v) { c.system.num_antennas = static_cast<int>(v.integer()); }},
      {"num_devices", [](auto& c, const auto& v) { c.system.num_devices = static_cast<int>(v.integer()); }},
      {"power_dbm", [](auto& c, const auto& v) { c.system.link.power_limit = dbm_to_watts(v.real()); }},
      {"noise_power_dbm", [](auto& c, const auto& v) { c.system.link.noise_power = dbm_to_watts(v.real()); }},
      {"reference_gain_db", [](auto& c, const auto& v) { c.system.fading.t0 = db_to_linear(v.real()); }},
      {"reference_distance_m", [](auto& c, const auto& v) { c.system.fading.d0 = v.real(); }},
      {"pathloss_exponent", [](auto& c, const auto& v) { c.system.fading.alpha = v.real(); }},
      {"rician_factor_linear", [](auto& c, const auto& v) { c.system.fading.rician_beta = v.real(); }},
      {"ap_position_m", [](auto& c, const auto& v) { c.system.geometry.ap_position = v.vec3(); }},
      {"region_center_m", [](auto& c, const auto& v) { c.system.geometry.region_center = v.vec3(); }},
      {"region_radius_m", [](auto& c, const auto& v) { c.system.geometry.region_radius = v.real(); }},
      {"antenna_spacing_wavelengths", [](auto& c, const auto& v) { c.system.geometry.antenna_spacing = v.real(); }},
      {"realizations", [](auto& c, const auto& v) { c.system.realizations = static_cast<int>(v.integer()); }},
      {"sca_tolerance", [](auto& c, const auto& v) { c.system.solver.sca_tolerance = v.real(); }},
      {"sca_max_iterations", [](auto& c, const auto& v) { c.system.solver.sca_max_iterations = static_cast<int>(v.integer()); }},
      {"sdp_tolerance", [](auto& c, const auto& v) { c.system.solver.sdp.tolerance = v.real(); }},
      {"sdp_max_iterations", [](auto& c, const auto& v) { c.system.solver.sdp.max_iterations = static_cast<int>(v.integer()); }},
      {"randomization_candidates", [](auto& c, const auto& v) { c.system.solver.randomization_candidates = static_cast<int>(v.integer()); }},
      {"sweep_axis", [](auto& c, const auto& v) {
         if (v.text() == "antennas") c.axis = SweepAxis::antennas;
         else if (v.text() == "devices") c.axis = SweepAxis::devices;
         else throw std::invalid_argument("expected 'antennas' or 'devices'");
       }},
      {"sweep_values", [](auto& c, const auto& v) { c.sweep_values = v.int_list(); }},
      {"algorithms", [](auto& c, const auto& v) { c.algorithms = parse_algorithm_list(v.text()); }},
      {"seed", [](auto& c, const auto& v) { c.master_seed = v.unsigned_integer(); }},
      {"jobs", [](auto& c, const auto& v) { c.jobs = static_cast<int>(v.integer()); }},
      {"output", [](auto& c, const auto& v) { c.output = std::string(v.text()); }},
      {"validate_samples", [](auto& c, const auto& v) { c.validate_samples = static_cast<int>(v.integer()); }},
      {"warmup", [](auto& c, const auto& v) { c.warmup = v.boolean(); }},
  };
  return table;
}

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"sigma", "noise_power_dbm"},       {"sigma2", "noise_power_dbm"},
      {"noise", "noise_power_dbm"},       {"noise_power", "noise_power_dbm"},
      {"p", "power_dbm"},                 {"power", "power_dbm"},
      {"power_limit", "power_dbm"},       {"n", "num_antennas"},
      {"antennas", "num_antennas"},       {"k", "num_devices"},
      {"devices", "num_devices"},         {"alpha", "pathloss_exponent"},
      {"beta", "rician_factor_linear"},   {"rician_factor", "rician_factor_linear"},
      {"t0", "reference_gain_db"},        {"d0", "reference_distance_m"},
      {"epsilon", "sca_tolerance"},       {"eps", "sca_tolerance"},
      {"radius", "region_radius_m"},      {"master_seed", "seed"},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, std::string key,
                         const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) +
                         (key.empty() ? std::string() : ": key '" + key + "'") + ": " + message),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key)) {}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

const char* to_string(SweepAxis axis) {
  return axis == SweepAxis::antennas ? "antennas" : "devices";
}

void SystemConfig::validate() const {
  if (num_antennas < 1) throw std::invalid_argument("num_antennas must be >= 1");
  if (num_devices < 1) throw std::invalid_argument("num_devices must be >= 1");
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  link.validate();
  geometry.validate();
  fading.validate();
  solver.validate();
}

void ExperimentConfig::validate() const {
  system.validate();
  if (sweep_values.empty()) throw std::invalid_argument("sweep_values must not be empty");
  for (std::size_t i = 0; i < sweep_values.size(); ++i) {
    if (sweep_values[i] < 1) throw std::invalid_argument("sweep_values must be positive");
    if (i > 0 && sweep_values[i] <= sweep_values[i - 1]) {
      throw std::invalid_argument("sweep_values must be strictly increasing");
    }
  }
  if (algorithms.empty()) throw std::invalid_argument("algorithms must not be empty");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (validate_samples < 1) throw std::invalid_argument("validate_samples must be >= 1");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, setter] : setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

std::string suggest_config_key(std::string_view unknown) {
  std::string lowered(unknown);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (const auto it = aliases().find(lowered); it != aliases().end()) return it->second;
  std::string best;
  std::size_t best_distance = 4;
  for (const auto& key : config_keys()) {
    const std::size_t distance = edit_distance(lowered, key);
    if (distance < best_distance) {
      best_distance = distance;
      best = key;
    }
  }
  return best;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view text) {
  std::vector<Algorithm> out;
  for (const auto item : split_list(text)) {
    if (item.empty()) continue;
    const auto algorithm = parse_algorithm(item);
    if (!algorithm) {
      throw std::invalid_argument("unknown algorithm '" + std::string(item) +
                                  "' (expected direct-sdr, direct-sca, sdr-opt, sca-opt)");
    }
    if (std::find(out.begin(), out.end(), *algorithm) != out.end()) {
      throw std::invalid_argument("algorithm '" + std::string(item) + "' listed twice");
    }
    out.push_back(*algorithm);
  }
  return out;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source) {
  ExperimentConfig config;
  const std::string source_name(source);
  std::set<std::string> seen;
  int line_number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto newline = text.find('\n', start);
    const auto end = newline == std::string_view::npos ? text.size() : newline;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto equals = line.find('=');
    if (equals == std::string_view::npos) {
      throw ConfigError(source_name, line_number, "", "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, equals)));
    const std::string_view value = trim(line.substr(equals + 1));
    if (key.empty()) throw ConfigError(source_name, line_number, "", "missing key");

    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const auto& entry) { return entry.first == key; });
    if (it == table.end()) {
      const std::string suggestion = suggest_config_key(key);
      throw ConfigError(source_name, line_number, key,
                        "unknown key" + (suggestion.empty()
                                             ? std::string()
                                             : "; did you mean '" + suggestion + "'?"));
    }
    if (!seen.insert(key).second) {
      throw ConfigError(source_name, line_number, key, "key given twice");
    }
    const ValueReader reader(value, [&](const std::string& message) {
      throw ConfigError(source_name, line_number, key, message);
    });
    try {
      it->second(config, reader);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& error) {
      throw ConfigError(source_name, line_number, key, error.what());
    }
  }

  try {
    config.validate();
  } catch (const std::invalid_argument& error) {
    throw ConfigError(source_name, 0, "", std::string("invalid configuration: ") + error.what());
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

}  // namespace aircomp

#include "aircomp/emit.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aircomp {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view line, char separator) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(separator, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                    : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view field) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("csv: bad value '" + std::string(text) + "' in field " +
                             std::string(field));
  }
  return value;
}

json number_or_null(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

double number_from(const json& value) {
  return value.is_null() ? std::numeric_limits<double>::quiet_NaN() : value.get<double>();
}

json record_to_json(const ExperimentRecord& r, bool include_digest) {
  json j = {{"realization", r.realization},
            {"seed", r.seed},
            {"algorithm", r.algorithm},
            {"antennas", r.antennas},
            {"devices", r.devices},
            {"mse", number_or_null(r.mse)},
            {"solve_seconds", number_or_null(r.solve_seconds)},
            {"init_seconds", number_or_null(r.init_seconds)},
            {"iterations", r.iterations},
            {"sdp_gap", number_or_null(r.sdp_gap)},
            {"status", r.status}};
  if (include_digest) j["channel_digest"] = r.channel_digest;
  return j;
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + std::string(name) +
                              "' (expected csv or json)");
}

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer.data(), ptr);
}

std::string record_csv_row(const ExperimentRecord& r, bool include_digest) {
  std::string row = std::to_string(r.realization) + ',' + std::to_string(r.seed) + ',' +
                    r.algorithm + ',' + std::to_string(r.antennas) + ',' +
                    std::to_string(r.devices) + ',' + format_double(r.mse) + ',' +
                    format_double(r.solve_seconds) + ',' + format_double(r.init_seconds) +
                    ',' + std::to_string(r.iterations) + ',' + format_double(r.sdp_gap) +
                    ',' + r.status;
  if (include_digest) row += ',' + std::to_string(r.channel_digest);
  return row;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records, bool include_digest) {
  std::string out(kRecordCsvHeader);
  if (include_digest) out += ",channel_digest";
  out += '\n';
  for (const auto& r : records) {
    out += record_csv_row(r, include_digest);
    out += '\n';
  }
  return out;
}

std::string records_to_json(const std::vector<ExperimentRecord>& records, bool include_digest) {
  json array = json::array();
  for (const auto& r : records) array.push_back(record_to_json(r, include_digest));
  return array.dump(2) + "\n";
}

std::vector<ExperimentRecord> records_from_csv(std::string_view text) {
  std::vector<ExperimentRecord> records;
  bool header = true;
  bool with_digest = false;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line.substr(0, kRecordCsvHeader.size()) != kRecordCsvHeader) {
        throw std::runtime_error("csv: unexpected header");
      }
      with_digest = line.size() > kRecordCsvHeader.size();
      header = false;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != (with_digest ? 12u : 11u)) {
      throw std::runtime_error("csv: wrong number of fields in '" + std::string(line) + "'");
    }
    ExperimentRecord r;
    r.realization = parse_number<int>(fields[0], "realization");
    r.seed = parse_number<std::uint64_t>(fields[1], "seed");
    r.algorithm = std::string(fields[2]);
    r.antennas = parse_number<int>(fields[3], "antennas");
    r.devices = parse_number<int>(fields[4], "devices");
    r.mse = parse_number<double>(fields[5], "mse");
    r.solve_seconds = parse_number<double>(fields[6], "solve_seconds");
    r.init_seconds = parse_number<double>(fields[7], "init_seconds");
    r.iterations = parse_number<int>(fields[8], "iterations");
    r.sdp_gap = parse_number<double>(fields[9], "sdp_gap");
    r.status = std::string(fields[10]);
    if (with_digest) r.channel_digest = parse_number<std::uint64_t>(fields[11], "channel_digest");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ExperimentRecord> records_from_json(std::string_view text) {
  const json array = json::parse(text);
  std::vector<ExperimentRecord> records;
  for (const auto& j : array) {
    ExperimentRecord r;
    r.realization = j.at("realization").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.antennas = j.at("antennas").get<int>();
    r.devices = j.at("devices").get<int>();
    r.mse = number_from(j.at("mse"));
    r.solve_seconds = number_from(j.at("solve_seconds"));
    r.init_seconds = number_from(j.at("init_seconds"));
    r.iterations = j.at("iterations").get<int>();
    r.sdp_gap = number_from(j.at("sdp_gap"));
    r.status = j.at("status").get<std::string>();
    if (j.contains("channel_digest")) r.channel_digest = j["channel_digest"].get<std::uint64_t>();
    records.push_back(std::move(r));
  }
  return records;
}

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out(kAggregateCsvHeader);
  out += '\n';
  for (const auto& a : rows) {
    out += a.algorithm + ',' + std::to_string(a.antennas) + ',' + std::to_string(a.devices) +
           ',' + std::to_string(a.count_ok) + ',' + std::to_string(a.count_failed) + ',' +
           format_double(a.mse_mean) + ',' + format_double(a.mse_stderr) + ',' +
           format_double(a.solve_seconds_mean) + ',' + format_double(a.solve_seconds_stderr) +
           ',' + format_double(a.init_seconds_mean) + ',' +
           format_double(a.init_seconds_stderr) + ',' + format_double(a.iterations_mean) + ',' +
           (a.all_failed ? "true" : "false") + '\n';
  }
  return out;
}

std::string aggregates_to_json(const std::vector<AggregateRow>& rows) {
  json array = json::array();
  for (const auto& a : rows) {
    array.push_back({{"algorithm", a.algorithm},
                     {"antennas", a.antennas},
                     {"devices", a.devices},
                     {"count_ok", a.count_ok},
                     {"count_failed", a.count_failed},
                     {"mse_mean", number_or_null(a.mse_mean)},
                     {"mse_stderr", number_or_null(a.mse_stderr)},
                     {"solve_seconds_mean", number_or_null(a.solve_seconds_mean)},
                     {"solve_seconds_stderr", number_or_null(a.solve_seconds_stderr)},
                     {"init_seconds_mean", number_or_null(a.init_seconds_mean)},
                     {"init_seconds_stderr", number_or_null(a.init_seconds_stderr)},
                     {"iterations_mean", number_or_null(a.iterations_mean)},
                     {"all_failed", a.all_failed}});
  }
  return array.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void emit(const std::vector<ExperimentRecord>& records, OutputFormat format,
          const std::filesystem::path& path, bool include_digest) {
  write_text_file(path, format == OutputFormat::csv ? records_to_csv(records, include_digest)
                                                    : records_to_json(records, include_digest));
}

void emit(const std::vector<AggregateRow>& rows, OutputFormat format,
          const std::filesystem::path& path) {
  write_text_file(path, format == OutputFormat::csv ? aggregates_to_csv(rows)
                                                    : aggregates_to_json(rows));
}

}  // namespace aircomp

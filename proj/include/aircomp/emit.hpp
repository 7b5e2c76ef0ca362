#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aircomp/experiments.hpp"

namespace aircomp {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(std::string_view name);

inline constexpr std::string_view kRecordCsvHeader =
    "realization,seed,algorithm,antennas,devices,mse,solve_seconds,init_seconds,"
    "iterations,sdp_gap,status";

inline constexpr std::string_view kAggregateCsvHeader =
    "algorithm,antennas,devices,count_ok,count_failed,mse_mean,mse_stderr,"
    "solve_seconds_mean,solve_seconds_stderr,init_seconds_mean,init_seconds_stderr,"
    "iterations_mean,all_failed";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// With `include_digest`, a trailing channel_digest column is added.
std::string record_csv_row(const ExperimentRecord& record, bool include_digest = false);
std::string records_to_csv(const std::vector<ExperimentRecord>& records,
                           bool include_digest = false);
std::string records_to_json(const std::vector<ExperimentRecord>& records,
                            bool include_digest = false);
std::vector<ExperimentRecord> records_from_csv(std::string_view text);
std::vector<ExperimentRecord> records_from_json(std::string_view text);

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows);
std::string aggregates_to_json(const std::vector<AggregateRow>& rows);

/// Writes the text to `path`; throws std::runtime_error naming the path.
void write_text_file(const std::filesystem::path& path, std::string_view text);

void emit(const std::vector<ExperimentRecord>& records, OutputFormat format,
          const std::filesystem::path& path, bool include_digest = false);
void emit(const std::vector<AggregateRow>& rows, OutputFormat format,
          const std::filesystem::path& path);

}  // namespace aircomp

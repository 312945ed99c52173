#pragma once

// CSV input of samples and CSV/JSON output of results.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tbm/matrix.hpp"
#include "tbm/sample.hpp"
#include "tbm/test_result.hpp"

namespace tbm {

// Numeric table; a first row with any non-numeric field is taken as header.
struct CsvTable {
  std::vector<std::string> header;
  Matrix data;
};

// Throws std::runtime_error with "row R, column C" diagnostics (1-based,
// counting the header line) for ragged rows or unparsable fields.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
TimeSeriesSample read_sample_csv(const std::filesystem::path& path);

// Shortest form that round-trips a double exactly.
std::string format_double(double value);
// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);
// Splits one line on commas, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& data,
                      const std::vector<std::string>& header = {});

// {"S", "seed", "split_index"?, "exact_statistic"?, "outcomes": [{name, statistic,
// p_value, location?}], "config": <config_json>}. `config_json` must be a JSON value.
std::string test_result_json(const TestResult& result, std::uint64_t seed,
                             const std::string& config_json);

// Rows are replicates, columns the outcomes.
void write_replicates_csv(const std::filesystem::path& path, const TestResult& result);

}  // namespace tbm

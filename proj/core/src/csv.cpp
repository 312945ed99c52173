#include "tbm/csv.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace tbm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        current += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::size_t> line_numbers;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    ++number;
    if (!trim(line).empty()) {
      lines.push_back(split_csv_line(line));
      line_numbers.push_back(number);
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (lines.empty()) throw std::runtime_error("CSV input is empty");

  CsvTable table;
  std::size_t first = 0;
  double scratch = 0.0;
  for (const auto& field : lines.front()) {
    if (!parse_number(field, scratch)) {
      for (const auto& f : lines.front()) table.header.emplace_back(trim(f));
      first = 1;
      break;
    }
  }
  const std::size_t cols = lines.front().size();
  const std::size_t rows = lines.size() - first;
  if (rows == 0) throw std::runtime_error("CSV input has a header but no data rows");
  std::vector<double> values;
  values.reserve(rows * cols);
  for (std::size_t r = first; r < lines.size(); ++r) {
    if (lines[r].size() != cols) {
      throw std::runtime_error("row " + std::to_string(line_numbers[r]) + ": " +
                               std::to_string(lines[r].size()) + " columns, expected " +
                               std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!parse_number(lines[r][c], v)) {
        throw std::runtime_error("row " + std::to_string(line_numbers[r]) + ", column " +
                                 std::to_string(c + 1) + ": cannot parse '" +
                                 std::string(trim(lines[r][c])) + "' as a number");
      }
      values.push_back(v);
    }
  }
  table.data = Matrix(rows, cols, std::move(values));
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

TimeSeriesSample read_sample_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  return TimeSeriesSample(std::move(table.data));
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& data,
                      const std::vector<std::string>& header) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += ',';
      out += csv_field(header[c]);
    }
    out += '\n';
  }
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (c) out += ',';
      out += format_double(data(r, c));
    }
    out += '\n';
  }
  write_file(path, out);
}

std::string test_result_json(const TestResult& result, std::uint64_t seed,
                             const std::string& config_json) {
  nlohmann::ordered_json j;
  j["S"] = result.replicate_count;
  j["seed"] = seed;
  if (result.split_index) j["split_index"] = *result.split_index;
  if (result.exact_statistic) j["exact_statistic"] = *result.exact_statistic;
  auto& outcomes = j["outcomes"] = nlohmann::ordered_json::array();
  for (const auto& o : result.outcomes) {
    nlohmann::ordered_json e;
    e["name"] = o.name;
    e["statistic"] = o.statistic;
    e["p_value"] = o.p_value;
    if (o.location) e["location"] = *o.location;
    outcomes.push_back(std::move(e));
  }
  j["config"] = nlohmann::ordered_json::parse(config_json);
  return j.dump(2);
}

void write_replicates_csv(const std::filesystem::path& path, const TestResult& result) {
  std::vector<std::string> header;
  for (const auto& o : result.outcomes) header.push_back(o.name);
  Matrix data(result.replicate_count, result.outcomes.size(), 0.0);
  for (std::size_t c = 0; c < result.outcomes.size(); ++c) {
    const auto& reps = result.outcomes[c].replicates;
    for (std::size_t r = 0; r < reps.size() && r < data.rows(); ++r) data(r, c) = reps[r];
  }
  write_matrix_csv(path, data, header);
}

}  // namespace tbm

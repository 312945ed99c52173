#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <limits>

#include "tbm/csv.hpp"

namespace tbm {
namespace {

std::string error_of(std::string_view text) {
  try {
    parse_csv(text);
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return {};
}

TEST(Csv, HeaderAutoDetection) {
  const auto a = parse_csv("x,y\n1,2\n3,4\n");
  EXPECT_EQ(a.header, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(a.data.rows(), 2U);
  const auto b = parse_csv("1,2\r\n3,4e-1\r\n\n-5, +6\n");
  EXPECT_TRUE(b.header.empty());
  ASSERT_EQ(b.data.rows(), 3U);
  EXPECT_DOUBLE_EQ(b.data(1, 1), 0.4);
  EXPECT_DOUBLE_EQ(b.data(2, 1), 6.0);
}

TEST(Csv, Diagnostics) {
  EXPECT_NE(error_of("a,b\n1,2\n3\n").find("row 3"), std::string::npos);
  const auto e = error_of("1,2\n3,abc\n");
  EXPECT_NE(e.find("row 2, column 2"), std::string::npos) << e;
  EXPECT_NE(e.find("abc"), std::string::npos);
  EXPECT_FALSE(error_of("").empty());
  EXPECT_FALSE(error_of("x,y\n").empty());
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, Quoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(split_csv_line("\"a,b\",c,\"x\"\"y\""),
            (std::vector<std::string>{"a,b", "c", "x\"y"}));
}

TEST(Csv, MatrixFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "tbm_csv_roundtrip.csv";
  Matrix m(3, 2, {0.1, 0.2, 1e-17, -3.0, 1.0 / 7.0, 42.0});
  write_matrix_csv(path, m, {"a", "b"});
  const auto t = read_csv(path);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.data, m);
  const auto s = read_sample_csv(path);
  EXPECT_EQ(s.n(), 3U);
  std::filesystem::remove(path);
  EXPECT_THROW(read_csv(path), std::runtime_error);
}

TEST(Csv, ResultJson) {
  TestResult r;
  r.replicate_count = 2;
  r.split_index = 5;
  r.exact_statistic = 0.25;
  r.outcomes.push_back({"cvm", 0.3, {0.1, 0.5}, 0.5, std::nullopt});
  const auto j = nlohmann::json::parse(test_result_json(r, 11, R"({"lambda":0.5})"));
  EXPECT_EQ(j.at("S"), 2);
  EXPECT_EQ(j.at("seed"), 11);
  EXPECT_EQ(j.at("split_index"), 5);
  EXPECT_EQ(j.at("outcomes")[0].at("p_value"), 0.5);
  EXPECT_FALSE(j.at("outcomes")[0].contains("location"));
  EXPECT_EQ(j.at("config").at("lambda"), 0.5);
}

}  // namespace
}  // namespace tbm

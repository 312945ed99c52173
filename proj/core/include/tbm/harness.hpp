#pragma once

// Monte Carlo studies: covariance benchmark of the resampling methods and
// size/power studies of the two change-point tests.
//
// Seeds: the data of scenario c, run r come from derive_seed(seed, {c, r, 0});
// method m uses derive_seed(seed, {c, r, m + 1}) for its resampling, so every
// method sees the same data and results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tbm/multipliers.hpp"
#include "tbm/sample.hpp"
#include "tbm/simulate.hpp"
#include "tbm/specified_test.hpp"

namespace tbm {

enum class StudyKind { Covariance, Specified, Unspecified };
enum class MethodKind { Multiplier, BlockBootstrap };

std::string_view to_string(StudyKind kind);
StudyKind parse_study_kind(std::string_view text);

struct MethodSpec {
  std::string label;
  MethodKind kind = MethodKind::Multiplier;
  MultiplierConfig multipliers;  // kernel.block_length 0 selects l_M(n)
  std::size_t bootstrap_block = 0;  // 0 selects l_B(n)
};

struct Scenario {
  std::string label;    // e.g. "iid clayton tau=0.2"
  std::string setting;  // e.g. "tau2=0.6"; empty for covariance studies
  PathSpec path;
  std::size_t n = 0;    // 0 inherits StudyConfig::n
};

struct ReferenceSpec {
  std::size_t big_n = 100000;
  std::size_t inner_n = 500;
  std::size_t reps = 10000;
  double budget = 2e9;  // limit on reps * big_n
};

struct StudyConfig {
  StudyKind kind = StudyKind::Covariance;
  std::vector<Scenario> scenarios;
  std::vector<MethodSpec> methods;
  std::size_t n = 100;
  std::size_t replicates = 2000;  // S
  std::size_t runs = 200;         // R
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double level = 0.05;
  double lambda = 0.5;  // split candidate of the specified test
  QuadratureSpec quadrature;
  std::vector<EvaluationPoint> points;  // covariance points; default the four (1/3, 2/3) points
  std::optional<ReferenceSpec> reference;
  std::string source_json;  // echoed into the manifest

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// One persisted per-run value. Targets of the covariance study are stored
// with run = -1 and method "True" or "Approx.".
struct RunRecord {
  std::string scenario;
  std::string setting;
  std::string method;
  long run = 0;
  std::string quantity;
  double value = 0.0;
};

struct AggregateRow {
  std::string scenario;
  std::string method;
  std::string setting;
  std::string metric;
  double value = 0.0;
};

struct StudyResult {
  StudyConfig config;
  std::vector<RunRecord> records;
  std::vector<AggregateRow> rows;
  double seconds = 0.0;

  // First row matching all keys; throws std::out_of_range if none.
  double value(const std::string& scenario, const std::string& method,
               const std::string& setting, const std::string& metric) const;
};

StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::filesystem::path& path);

// The four evaluation points (1/3,1/3), (1/3,2/3), (2/3,1/3), (2/3,2/3).
std::vector<EvaluationPoint> default_covariance_points();
std::string point_label(const EvaluationPoint& u);

// Closed-form covariance of the limit G_C for i.i.d. data:
//   sum over a in {u, u^(i)}, b in {v, v^(j)} of signed weights times
//   C(a ^ b) - C(a) C(b), with weights 1 and -D_iC.
double iid_limit_covariance(const CopulaSpec& copula, const EvaluationPoint& u,
                            const EvaluationPoint& v);
double iid_limit_variance(const CopulaSpec& copula, const EvaluationPoint& u);

// Empirical covariance (diagonal) of sqrt(n)(C_n - C_N) over independent
// inner samples, C_N from one long path.
std::vector<double> reference_covariance(const PathSpec& path, const ReferenceSpec& spec,
                                         const std::vector<EvaluationPoint>& points,
                                         std::uint64_t seed, std::size_t threads = 1);

StudyResult covariance_benchmark(const StudyConfig& config);
StudyResult size_power_specified(const StudyConfig& config);
StudyResult size_power_unspecified(const StudyConfig& config);
StudyResult run_study(const StudyConfig& config);

// Recomputes aggregate rows from raw records.
//   covariance: "mean" and "mse_x1e4" of each "estimate" group against the
//     "True" target when present, else "Approx.".
//   tests: "<f>rejection_rate" from "<f>p_value" records (p < level);
//     "<f>lambda_mean", "<f>lambda_sd" from "<f>location" records and
//     "<f>lambda_mse_x1e2" when the scenario carries a "break_lambda" record.
std::vector<AggregateRow> aggregate(StudyKind kind, const std::vector<RunRecord>& records,
                                    double level);

// table.csv (scenario,method,setting,metric,value), records.csv and manifest.json
// in `directory` (created if missing).
void write_study_outputs(const StudyResult& result, const std::filesystem::path& directory);
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path);

}  // namespace tbm

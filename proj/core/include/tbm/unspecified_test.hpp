#pragma once

// Test for a constant copula against a single change point at an unknown
// location. The sequential process
//   S_n(k/n, u) = n^{-1/2} (N_k(u) - (k/n) N_n(u)),  N_k(u) = #{j <= k : U_j <= u},
// is evaluated for k = 1..n-1 and u over the full-sample pseudo-observations,
// then maximized over k with a Cramer-von Mises, Kuiper or
// Kolmogorov-Smirnov functional in u.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tbm/matrix.hpp"
#include "tbm/multipliers.hpp"
#include "tbm/sample.hpp"
#include "tbm/test_result.hpp"

namespace tbm {

enum class Functional { CvM = 0, Kuiper = 1, KS = 2 };
inline constexpr std::array<Functional, 3> kAllFunctionals = {Functional::CvM, Functional::Kuiper,
                                                             Functional::KS};

std::string_view to_string(Functional f);
Functional parse_functional(std::string_view text);

// Functional values indexed by Functional, with the maximizing split k
// (smallest k on ties).
struct UnspecifiedStatistics {
  std::array<double, 3> values{};
  std::array<std::size_t, 3> argmax{};

  double operator[](Functional f) const noexcept { return values[static_cast<int>(f)]; }
};

// (n-1) x n matrix; entry (k-1, u) = S_n(k/n, U_u).
Matrix process_S_unspecified(const PseudoObservations& pseudo);

UnspecifiedStatistics statistics_unspecified(const PseudoObservations& pseudo);

// argmax_k / n for the chosen functional.
double change_point_location(const PseudoObservations& pseudo, Functional f);

// Caches the indicator matrix 1{U_j <= U_u} and the observed statistics.
// `replicate` is const and may be called concurrently.
class UnspecifiedTestReplicator {
 public:
  explicit UnspecifiedTestReplicator(const PseudoObservations& pseudo);

  std::size_t n() const noexcept { return n_; }
  const UnspecifiedStatistics& statistics() const noexcept { return statistics_; }

  // Functionals of S^M(k/n, u) = B^M(k/n, u) - (k/n) B^M(1, u), where
  // B^M(k/n, u) uses the prefix mean of the first k multipliers.
  std::array<double, 3> replicate(const MultiplierStream& stream) const;

 private:
  std::size_t n_;
  std::vector<double> indicator_;  // j * n + u
  std::vector<double> totals_;     // N_n(u)
  UnspecifiedStatistics statistics_;
};

std::array<double, 3> replicate_unspecified(const PseudoObservations& pseudo,
                                            const MultiplierStream& stream);

struct UnspecifiedTestConfig {
  MultiplierConfig multipliers;
  std::size_t replicates = 1000;
};

// Replicate s draws its multipliers from substream derive_seed(seed, {s}).
// Outcomes "cvm", "kuiper", "ks", each with a location estimate.
TestResult test_unspecified(const TimeSeriesSample& sample, const UnspecifiedTestConfig& config,
                            std::uint64_t seed);

}  // namespace tbm

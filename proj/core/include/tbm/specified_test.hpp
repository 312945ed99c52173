#pragma once

// Test for a constant copula against a break at a specified candidate
// floor(lambda n). The statistic is the scaled Cramer-von Mises distance
// between the empirical copulas of the two subsamples; p-values come from
// tapered block multiplier replicates of the limiting process
//   H = sqrt(1 - lambda) G_1 - sqrt(lambda) G_2.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tbm/grid.hpp"
#include "tbm/multipliers.hpp"
#include "tbm/sample.hpp"
#include "tbm/test_result.hpp"

namespace tbm {

struct QuadratureSpec {
  std::size_t nodes_per_dim = 32;
};

// floor(lambda n); throws unless lambda in (0,1) and both parts hold >= 2 rows.
std::size_t split_index(std::size_t n, double lambda);

// Pseudo-observations ranked separately within rows [0, k) and [k, n).
std::pair<PseudoObservations, PseudoObservations> subsample_pseudo_observations(
    const TimeSeriesSample& sample, double lambda);

// Exact T_n(lambda) = (k(n-k)/n) * integral of (C_1 - C_2)^2 over [0,1]^d,
// using  integral 1{a <= u} 1{b <= u} du = prod_i (1 - max(a_i, b_i)).
double statistic_specified(const TimeSeriesSample& sample, double lambda);

// Data-dependent state of the specified test on a midpoint grid: cached cell
// indices and partial derivative estimates of both subsamples. `replicate`
// is const and may be called concurrently.
class SpecifiedTestReplicator {
 public:
  SpecifiedTestReplicator(const TimeSeriesSample& sample, double lambda,
                          QuadratureSpec quadrature = {},
                          std::optional<double> bandwidth = std::nullopt);

  std::size_t n() const noexcept { return n_; }
  std::size_t split() const noexcept { return k_; }
  const MidpointGrid& grid() const noexcept { return grid_; }

  // T_n(lambda) by midpoint quadrature on the replicate grid.
  double statistic_grid() const;
  // integral of H^2 for one multiplier stream of length n, split at k.
  double replicate(const MultiplierStream& stream) const;

 private:
  struct Part {
    GridAccumulator accumulator;
    std::vector<double> derivatives;  // node * d + i
    std::size_t begin;
    std::size_t size;
  };
  void process_values(const Part& part, std::span<const double> xi, CenteringMode mode,
                      std::span<double> out, std::span<double> values,
                      std::span<double> marginals) const;

  std::size_t n_;
  std::size_t k_;
  MidpointGrid grid_;
  std::vector<std::uint32_t> node_index_;  // node * d + i
  std::vector<Part> parts_;
};

// Single replicate of the integrated squared multiplier process.
double replicate_specified(const TimeSeriesSample& sample, double lambda,
                           const MultiplierStream& stream,
                           std::optional<double> bandwidth = std::nullopt,
                           QuadratureSpec quadrature = {});

struct SpecifiedTestInput {
  TimeSeriesSample sample;
  double lambda = 0.5;
  MultiplierConfig multipliers;
  std::size_t replicates = 2000;
  QuadratureSpec quadrature;
  std::optional<double> bandwidth;
  // Compare replicates with the exact statistic instead of its grid version.
  bool use_exact_statistic = false;
};

// Replicate s draws its multipliers from substream derive_seed(seed, {s}).
// Outcome name: "cvm".
TestResult test_specified(const SpecifiedTestInput& input, std::uint64_t seed);

}  // namespace tbm

#include "tbm/empirical_copula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbm {

PseudoObservations pseudo_observations(const TimeSeriesSample& sample) {
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();
  std::vector<std::uint32_t> ranks(n * d);
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n; ++j) sorted[j] = sample(j, i);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < n; ++j) {
      const auto it = std::upper_bound(sorted.begin(), sorted.end(), sample(j, i));
      ranks[j * d + i] = static_cast<std::uint32_t>(it - sorted.begin());
    }
  }
  return PseudoObservations(n, d, std::move(ranks));
}

double empirical_copula_unchecked(const PseudoObservations& pseudo, std::span<const double> u) {
  if (u.size() != pseudo.d()) {
    throw std::invalid_argument("empirical copula: point has dimension " +
                                std::to_string(u.size()) + ", data has " +
                                std::to_string(pseudo.d()));
  }
  const std::size_t d = pseudo.d();
  std::size_t count = 0;
  for (std::size_t j = 0; j < pseudo.n(); ++j) {
    const auto row = pseudo.row(j);
    bool below = true;
    for (std::size_t i = 0; i < d && below; ++i) below = row[i] <= u[i];
    count += below ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(pseudo.n());
}

double empirical_copula_at(const PseudoObservations& pseudo, const EvaluationPoint& u) {
  return empirical_copula_unchecked(pseudo, u.coords());
}

// n^{-1/2}, capped at 0.4 so that very small samples (n <= 6) still get an
// admissible bandwidth.
double default_bandwidth(std::size_t n) {
  return std::min(0.4, 1.0 / std::sqrt(static_cast<double>(n)));
}

double partial_derivative_estimate(const PseudoObservations& pseudo, const EvaluationPoint& u,
                                   std::size_t coordinate, double bandwidth) {
  if (!(bandwidth > 0.0 && bandwidth < 0.5)) {
    throw std::invalid_argument("partial_derivative_estimate: bandwidth must lie in (0, 1/2)");
  }
  if (coordinate >= u.size()) {
    throw std::out_of_range("partial_derivative_estimate: coordinate index out of range");
  }
  const double h = bandwidth;
  const double ui = u[coordinate];
  std::vector<double> hi(u.coords().begin(), u.coords().end());
  std::vector<double> lo = hi;
  double upper = 0.0;
  double lower = 0.0;
  if (ui < h) {
    hi[coordinate] = ui + 2.0 * h;
    upper = empirical_copula_unchecked(pseudo, hi);
  } else if (ui > 1.0 - h) {
    lo[coordinate] = ui - 2.0 * h;
    upper = empirical_copula_unchecked(pseudo, hi);
    lower = empirical_copula_unchecked(pseudo, lo);
  } else {
    hi[coordinate] = ui + h;
    lo[coordinate] = ui - h;
    upper = empirical_copula_unchecked(pseudo, hi);
    lower = empirical_copula_unchecked(pseudo, lo);
  }
  return std::clamp((upper - lower) / (2.0 * h), 0.0, 1.0);
}

double partial_derivative_estimate(const PseudoObservations& pseudo, const EvaluationPoint& u,
                                   std::size_t coordinate) {
  return partial_derivative_estimate(pseudo, u, coordinate, default_bandwidth(pseudo.n()));
}

}  // namespace tbm

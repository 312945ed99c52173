#include "tbm/unspecified_test.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tbm/empirical_copula.hpp"

namespace tbm {
namespace {

// Running maxima of the three functionals over k.
struct Tracker {
  UnspecifiedStatistics best;
  bool first = true;

  void update(std::size_t k, double cvm, double kuiper, double ks) {
    const double v[3] = {cvm, kuiper, ks};
    for (int f = 0; f < 3; ++f) {
      if (first || v[f] > best.values[f]) {
        best.values[f] = v[f];
        best.argmax[f] = k;
      }
    }
    first = false;
  }
};

std::vector<double> indicator_matrix(const PseudoObservations& pseudo) {
  const std::size_t n = pseudo.n();
  const std::size_t d = pseudo.d();
  std::vector<double> out(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto rj = pseudo.rank_row(j);
    for (std::size_t u = 0; u < n; ++u) {
      const auto ru = pseudo.rank_row(u);
      bool below = true;
      for (std::size_t i = 0; i < d && below; ++i) below = rj[i] <= ru[i];
      out[j * n + u] = below ? 1.0 : 0.0;
    }
  }
  return out;
}

std::vector<double> column_totals(const std::vector<double>& indicator, std::size_t n) {
  std::vector<double> totals(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double* row = indicator.data() + j * n;
    for (std::size_t u = 0; u < n; ++u) totals[u] += row[u];
  }
  return totals;
}

UnspecifiedStatistics observed_statistics(const std::vector<double>& indicator,
                                          const std::vector<double>& totals, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(nd);
  std::vector<double> counts(n, 0.0);
  Tracker tracker;
  for (std::size_t k = 1; k < n; ++k) {
    const double* row = indicator.data() + (k - 1) * n;
    const double ratio = static_cast<double>(k) / nd;
    double sq = 0.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n; ++u) {
      counts[u] += row[u];
      const double s = scale * (counts[u] - ratio * totals[u]);
      sq += s * s;
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
    tracker.update(k, sq / nd, hi - lo, std::max(hi, -lo));
  }
  return tracker.best;
}

}  // namespace

std::string_view to_string(Functional f) {
  switch (f) {
    case Functional::CvM: return "cvm";
    case Functional::Kuiper: return "kuiper";
    case Functional::KS: return "ks";
  }
  return "?";
}

Functional parse_functional(std::string_view text) {
  for (Functional f : kAllFunctionals) {
    if (text == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown functional '" + std::string(text) +
                              "' (expected cvm|kuiper|ks)");
}

Matrix process_S_unspecified(const PseudoObservations& pseudo) {
  const std::size_t n = pseudo.n();
  const std::vector<double> indicator = indicator_matrix(pseudo);
  const std::vector<double> totals = column_totals(indicator, n);
  const double nd = static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(nd);
  Matrix out(n - 1, n, 0.0);
  std::vector<double> counts(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double* row = indicator.data() + (k - 1) * n;
    const double ratio = static_cast<double>(k) / nd;
    for (std::size_t u = 0; u < n; ++u) {
      counts[u] += row[u];
      out(k - 1, u) = scale * (counts[u] - ratio * totals[u]);
    }
  }
  return out;
}

UnspecifiedStatistics statistics_unspecified(const PseudoObservations& pseudo) {
  const std::vector<double> indicator = indicator_matrix(pseudo);
  return observed_statistics(indicator, column_totals(indicator, pseudo.n()), pseudo.n());
}

double change_point_location(const PseudoObservations& pseudo, Functional f) {
  const auto stats = statistics_unspecified(pseudo);
  return static_cast<double>(stats.argmax[static_cast<int>(f)]) /
         static_cast<double>(pseudo.n());
}

UnspecifiedTestReplicator::UnspecifiedTestReplicator(const PseudoObservations& pseudo)
    : n_(pseudo.n()), indicator_(indicator_matrix(pseudo)), totals_(column_totals(indicator_, n_)),
      statistics_(observed_statistics(indicator_, totals_, n_)) {}

std::array<double, 3> UnspecifiedTestReplicator::replicate(const MultiplierStream& stream) const {
  const std::size_t n = n_;
  if (stream.values.size() != n) {
    throw std::invalid_argument("multiplier stream length " +
                                std::to_string(stream.values.size()) +
                                " does not match sample size " + std::to_string(n));
  }
  const std::vector<double>& xi = stream.values;
  const bool raw = stream.config.mode == CenteringMode::Raw;
  const double nd = static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(nd);

  // Full-sample weighted sums A_n(u) = sum_j xi_j 1{U_j <= U_u}.
  std::vector<double> full(n, 0.0);
  double xi_total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double* row = indicator_.data() + j * n;
    const double x = xi[j];
    xi_total += x;
    for (std::size_t u = 0; u < n; ++u) full[u] += x * row[u];
  }
  const double mean_n = xi_total / nd;
  if (raw && !(mean_n != 0.0)) throw std::domain_error("multiplier mean is zero in raw mode");
  // B(1, u) in the same form as the prefix values.
  std::vector<double> b_full(n);
  for (std::size_t u = 0; u < n; ++u) {
    b_full[u] = raw ? scale * (full[u] / mean_n - totals_[u])
                    : scale * (full[u] - mean_n * totals_[u]);
  }

  std::vector<double> weighted(n, 0.0), counts(n, 0.0);
  double prefix = 0.0;
  Tracker tracker;
  for (std::size_t k = 1; k < n; ++k) {
    const double* row = indicator_.data() + (k - 1) * n;
    const double x = xi[k - 1];
    prefix += x;
    const double mean_k = prefix / static_cast<double>(k);
    if (raw && !(mean_k != 0.0)) throw std::domain_error("multiplier prefix mean is zero");
    const double inv_mean = raw ? 1.0 / mean_k : 0.0;
    const double ratio = static_cast<double>(k) / nd;
    double sq = 0.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n; ++u) {
      weighted[u] += x * row[u];
      counts[u] += row[u];
      const double b = raw ? weighted[u] * inv_mean - counts[u] : weighted[u] - mean_k * counts[u];
      const double s = scale * b - ratio * b_full[u];
      sq += s * s;
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
    tracker.update(k, sq / nd, hi - lo, std::max(hi, -lo));
  }
  return tracker.best.values;
}

std::array<double, 3> replicate_unspecified(const PseudoObservations& pseudo,
                                            const MultiplierStream& stream) {
  return UnspecifiedTestReplicator(pseudo).replicate(stream);
}

TestResult test_unspecified(const TimeSeriesSample& sample, const UnspecifiedTestConfig& config,
                            std::uint64_t seed) {
  config.multipliers.validate();
  if (config.replicates == 0) throw std::invalid_argument("test_unspecified: S must be >= 1");
  const UnspecifiedTestReplicator replicator(pseudo_observations(sample));
  const std::size_t n = sample.n();

  TestResult result;
  result.replicate_count = config.replicates;
  for (Functional f : kAllFunctionals) {
    FunctionalOutcome o;
    o.name = std::string(to_string(f));
    o.statistic = replicator.statistics()[f];
    o.location = static_cast<double>(replicator.statistics().argmax[static_cast<int>(f)]) /
                 static_cast<double>(n);
    o.replicates.resize(config.replicates);
    result.outcomes.push_back(std::move(o));
  }
  for (std::size_t s = 0; s < config.replicates; ++s) {
    Engine rng = make_engine(seed, {s});
    const auto values = replicator.replicate(generate_multipliers(config.multipliers, n, rng));
    for (int f = 0; f < 3; ++f) result.outcomes[f].replicates[s] = values[f];
  }
  for (auto& o : result.outcomes) o.p_value = counting_p_value(o.statistic, o.replicates);
  return result;
}

}  // namespace tbm

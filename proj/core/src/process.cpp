#include "tbm/process.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "tbm/empirical_copula.hpp"

namespace tbm {
namespace {

std::vector<std::uint32_t> rows_below(const PseudoObservations& pseudo,
                                      std::span<const double> u) {
  std::vector<std::uint32_t> rows;
  for (std::size_t j = 0; j < pseudo.n(); ++j) {
    const auto r = pseudo.row(j);
    bool below = true;
    for (std::size_t i = 0; i < r.size() && below; ++i) below = r[i] <= u[i];
    if (below) rows.push_back(static_cast<std::uint32_t>(j));
  }
  return rows;
}

void check_dimension(const PseudoObservations& pseudo, const PointSet& points) {
  if (points.dimension() != pseudo.d()) {
    throw std::invalid_argument("point set dimension " + std::to_string(points.dimension()) +
                                " does not match data dimension " +
                                std::to_string(pseudo.d()));
  }
}

}  // namespace

PointSet::PointSet(std::vector<EvaluationPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("PointSet: empty");
  for (const auto& p : points_) {
    if (p.size() != points_.front().size()) {
      throw std::invalid_argument("PointSet: points of mixed dimension");
    }
  }
}

std::vector<double> multiplier_weights(std::span<const double> xi, CenteringMode mode) {
  const double mean =
      std::accumulate(xi.begin(), xi.end(), 0.0) / static_cast<double>(xi.size());
  std::vector<double> w(xi.size());
  if (mode == CenteringMode::Raw) {
    if (!(mean != 0.0)) throw std::domain_error("multiplier mean is zero in raw mode");
    for (std::size_t j = 0; j < xi.size(); ++j) w[j] = xi[j] / mean - 1.0;
  } else {
    for (std::size_t j = 0; j < xi.size(); ++j) w[j] = xi[j] - mean;
  }
  return w;
}

MultiplierProcessEvaluator::MultiplierProcessEvaluator(const PseudoObservations& pseudo,
                                                       const PointSet& points,
                                                       std::optional<double> bandwidth)
    : n_(pseudo.n()), d_(pseudo.d()) {
  check_dimension(pseudo, points);
  const double h = bandwidth.value_or(default_bandwidth(pseudo.n()));
  point_rows_.reserve(points.size());
  marginal_rows_.reserve(points.size() * d_);
  derivatives_.reserve(points.size() * d_);
  for (const auto& u : points.points()) {
    point_rows_.push_back(rows_below(pseudo, u.coords()));
    for (std::size_t i = 0; i < d_; ++i) {
      marginal_rows_.push_back(rows_below(pseudo, u.only_coordinate(i).coords()));
      derivatives_.push_back(partial_derivative_estimate(pseudo, u, i, h));
    }
  }
}

double MultiplierProcessEvaluator::sum_over(std::span<const std::uint32_t> rows,
                                            std::span<const double> w) {
  double s = 0.0;
  for (std::uint32_t j : rows) s += w[j];
  return s;
}

std::vector<double> MultiplierProcessEvaluator::checked_weights(
    const MultiplierStream& stream) const {
  if (stream.values.size() != n_) {
    throw std::invalid_argument("multiplier stream length " +
                                std::to_string(stream.values.size()) +
                                " does not match sample size " + std::to_string(n_));
  }
  return multiplier_weights(stream.values, stream.config.mode);
}

ProcessReplicate MultiplierProcessEvaluator::evaluate_B(const MultiplierStream& stream) const {
  const std::vector<double> w = checked_weights(stream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  ProcessReplicate out{ProcessKind::MultiplierB, std::vector<double>(point_rows_.size())};
  for (std::size_t p = 0; p < point_rows_.size(); ++p) {
    out.values[p] = scale * sum_over(point_rows_[p], w);
  }
  return out;
}

ProcessReplicate MultiplierProcessEvaluator::evaluate_G(const MultiplierStream& stream) const {
  const std::vector<double> w = checked_weights(stream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  ProcessReplicate out{ProcessKind::MultiplierG, std::vector<double>(point_rows_.size())};
  for (std::size_t p = 0; p < point_rows_.size(); ++p) {
    double g = sum_over(point_rows_[p], w);
    for (std::size_t i = 0; i < d_; ++i) {
      g -= derivatives_[p * d_ + i] * sum_over(marginal_rows_[p * d_ + i], w);
    }
    out.values[p] = scale * g;
  }
  return out;
}

ProcessReplicate multiplier_B_process(const PseudoObservations& pseudo,
                                      const MultiplierStream& stream, const PointSet& points) {
  check_dimension(pseudo, points);
  if (stream.values.size() != pseudo.n()) {
    throw std::invalid_argument("multiplier stream length does not match sample size");
  }
  const std::vector<double> w = multiplier_weights(stream.values, stream.config.mode);
  const double scale = 1.0 / std::sqrt(static_cast<double>(pseudo.n()));
  ProcessReplicate out{ProcessKind::MultiplierB, std::vector<double>(points.size())};
  for (std::size_t p = 0; p < points.size(); ++p) {
    double s = 0.0;
    for (std::uint32_t j : rows_below(pseudo, points[p].coords())) s += w[j];
    out.values[p] = scale * s;
  }
  return out;
}

ProcessReplicate multiplier_G_process(const PseudoObservations& pseudo,
                                      const MultiplierStream& stream, const PointSet& points,
                                      std::optional<double> bandwidth) {
  return MultiplierProcessEvaluator(pseudo, points, bandwidth).evaluate_G(stream);
}

BlockBootstrapEvaluator::BlockBootstrapEvaluator(const TimeSeriesSample& sample,
                                                 const PointSet& points)
    : sample_(sample), points_(points) {
  if (points.dimension() != sample.d()) {
    throw std::invalid_argument("point set dimension does not match data dimension");
  }
  const PseudoObservations pseudo = pseudo_observations(sample);
  base_values_.reserve(points.size());
  for (const auto& u : points.points()) base_values_.push_back(empirical_copula_at(pseudo, u));
}

ProcessReplicate BlockBootstrapEvaluator::evaluate(std::span<const std::size_t> indices) const {
  const PseudoObservations boot = pseudo_observations(sample_.select(indices));
  const double root_n = std::sqrt(static_cast<double>(sample_.n()));
  ProcessReplicate out{ProcessKind::BlockBootstrap, std::vector<double>(points_.size())};
  for (std::size_t p = 0; p < points_.size(); ++p) {
    out.values[p] = root_n * (empirical_copula_at(boot, points_[p]) - base_values_[p]);
  }
  return out;
}

ProcessReplicate BlockBootstrapEvaluator::draw(std::size_t block_length, Engine& rng) const {
  const auto idx = block_bootstrap_indices(sample_.n(), block_length, rng);
  return evaluate(idx);
}

ProcessReplicate block_bootstrap_process(const TimeSeriesSample& sample,
                                         std::size_t block_length, Engine& rng,
                                         const PointSet& points) {
  return BlockBootstrapEvaluator(sample, points).draw(block_length, rng);
}

Matrix covariance_estimate(std::span<const ProcessReplicate> replicates) {
  if (replicates.size() < 2) {
    throw std::invalid_argument("covariance_estimate: need at least 2 replicates");
  }
  const std::size_t p = replicates.front().values.size();
  for (const auto& r : replicates) {
    if (r.values.size() != p) {
      throw std::invalid_argument("covariance_estimate: replicates of unequal length");
    }
  }
  const double s = static_cast<double>(replicates.size());
  std::vector<double> mean(p, 0.0);
  for (const auto& r : replicates) {
    for (std::size_t a = 0; a < p; ++a) mean[a] += r.values[a];
  }
  for (double& m : mean) m /= s;
  Matrix cov(p, p);
  for (const auto& r : replicates) {
    for (std::size_t a = 0; a < p; ++a) {
      const double da = r.values[a] - mean[a];
      for (std::size_t b = a; b < p; ++b) cov(a, b) += da * (r.values[b] - mean[b]);
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      cov(a, b) /= (s - 1.0);
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

}  // namespace tbm

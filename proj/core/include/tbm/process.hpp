#pragma once

// Resampled realizations of the empirical copula process.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tbm/matrix.hpp"
#include "tbm/multipliers.hpp"
#include "tbm/rng.hpp"
#include "tbm/sample.hpp"

namespace tbm {

class PointSet {
 public:
  explicit PointSet(std::vector<EvaluationPoint> points);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dimension() const noexcept { return points_.front().size(); }
  const EvaluationPoint& operator[](std::size_t k) const noexcept { return points_[k]; }
  const std::vector<EvaluationPoint>& points() const noexcept { return points_; }

 private:
  std::vector<EvaluationPoint> points_;
};

enum class ProcessKind { MultiplierB, MultiplierG, BlockBootstrap };

struct ProcessReplicate {
  ProcessKind kind = ProcessKind::MultiplierB;
  std::vector<double> values;
};

// Per-observation weights of the multiplier process:
// xi_j / mean(xi) - 1 in raw mode, xi_j - mean(xi) in centered mode.
std::vector<double> multiplier_weights(std::span<const double> xi, CenteringMode mode);

// B(u) = n^{-1/2} sum_j weight_j 1{U_j <= u}.
ProcessReplicate multiplier_B_process(const PseudoObservations& pseudo,
                                      const MultiplierStream& stream, const PointSet& points);

// G(u) = B(u) - sum_i D_i C(u) B(u^(i)). `bandwidth` defaults to n^{-1/2}.
ProcessReplicate multiplier_G_process(const PseudoObservations& pseudo,
                                      const MultiplierStream& stream, const PointSet& points,
                                      std::optional<double> bandwidth = std::nullopt);

// Data-dependent state for repeated B/G evaluation: indicator sets at every
// point and at every u^(i), and the partial derivative estimates. Built once,
// then evaluated for any number of multiplier streams.
class MultiplierProcessEvaluator {
 public:
  MultiplierProcessEvaluator(const PseudoObservations& pseudo, const PointSet& points,
                             std::optional<double> bandwidth = std::nullopt);

  std::size_t n() const noexcept { return n_; }
  std::size_t points() const noexcept { return point_rows_.size(); }
  double derivative(std::size_t point, std::size_t coordinate) const noexcept {
    return derivatives_[point * d_ + coordinate];
  }

  ProcessReplicate evaluate_B(const MultiplierStream& stream) const;
  ProcessReplicate evaluate_G(const MultiplierStream& stream) const;

 private:
  static double sum_over(std::span<const std::uint32_t> rows, std::span<const double> w);
  std::vector<double> checked_weights(const MultiplierStream& stream) const;

  std::size_t n_;
  std::size_t d_;
  std::vector<std::vector<std::uint32_t>> point_rows_;
  std::vector<std::vector<std::uint32_t>> marginal_rows_;  // point * d + i
  std::vector<double> derivatives_;
};

// sqrt(n) (C^B_n(u) - C_n(u)) where C^B_n re-ranks a moving-block bootstrap
// sample of the raw observations.
ProcessReplicate block_bootstrap_process(const TimeSeriesSample& sample,
                                         std::size_t block_length, Engine& rng,
                                         const PointSet& points);

// Holds C_n at the points so that replicate generation only re-ranks.
class BlockBootstrapEvaluator {
 public:
  BlockBootstrapEvaluator(const TimeSeriesSample& sample, const PointSet& points);

  ProcessReplicate evaluate(std::span<const std::size_t> indices) const;
  ProcessReplicate draw(std::size_t block_length, Engine& rng) const;

 private:
  TimeSeriesSample sample_;
  PointSet points_;
  std::vector<double> base_values_;
};

// Unbiased sample covariance across replicates (points x points).
Matrix covariance_estimate(std::span<const ProcessReplicate> replicates);

}  // namespace tbm

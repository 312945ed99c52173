#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbm/matrix.hpp"

namespace tbm {

// n x d matrix of finite real observations; row j is the observation at time j.
// Requires n >= 2 and d >= 2.
class TimeSeriesSample {
 public:
  explicit TimeSeriesSample(Matrix data);
  static TimeSeriesSample from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const noexcept { return data_.rows(); }
  std::size_t d() const noexcept { return data_.cols(); }
  double operator()(std::size_t j, std::size_t i) const noexcept { return data_(j, i); }
  std::span<const double> row(std::size_t j) const noexcept { return data_.row(j); }
  const Matrix& data() const noexcept { return data_; }

  // Rows [begin, end).
  TimeSeriesSample slice(std::size_t begin, std::size_t end) const;
  // Rows in the given order (repetitions allowed).
  TimeSeriesSample select(std::span<const std::size_t> rows) const;

 private:
  Matrix data_;
};

// Normalized ranks. Entry (j, i) equals rank(j, i) / n where rank is the
// number of k with X(k, i) <= X(j, i); ties share the maximal rank.
class PseudoObservations {
 public:
  PseudoObservations(std::size_t n, std::size_t d, std::vector<std::uint32_t> ranks);

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  double operator()(std::size_t j, std::size_t i) const noexcept { return values_[j * d_ + i]; }
  std::uint32_t rank(std::size_t j, std::size_t i) const noexcept { return ranks_[j * d_ + i]; }
  std::span<const double> row(std::size_t j) const noexcept {
    return {values_.data() + j * d_, d_};
  }
  std::span<const std::uint32_t> rank_row(std::size_t j) const noexcept {
    return {ranks_.data() + j * d_, d_};
  }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const PseudoObservations& other) const noexcept {
    return n_ == other.n_ && d_ == other.d_ && ranks_ == other.ranks_;
  }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<std::uint32_t> ranks_;
  std::vector<double> values_;
};

// A point of the closed unit cube [0,1]^d.
class EvaluationPoint {
 public:
  explicit EvaluationPoint(std::vector<double> coords);

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  // u^(i): all coordinates except the i-th replaced by 1.
  EvaluationPoint only_coordinate(std::size_t i) const;

  bool operator==(const EvaluationPoint&) const = default;

 private:
  std::vector<double> coords_;
};

}  // namespace tbm

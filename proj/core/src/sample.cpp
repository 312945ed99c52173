#include "tbm/sample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace tbm {

TimeSeriesSample::TimeSeriesSample(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 2) {
    throw std::invalid_argument("TimeSeriesSample: need at least 2 observations, got " +
                                std::to_string(data_.rows()));
  }
  if (data_.cols() < 2) {
    throw std::invalid_argument("TimeSeriesSample: need dimension d >= 2, got " +
                                std::to_string(data_.cols()));
  }
  for (std::size_t j = 0; j < data_.rows(); ++j) {
    for (std::size_t i = 0; i < data_.cols(); ++i) {
      if (!std::isfinite(data_(j, i))) {
        throw std::invalid_argument("TimeSeriesSample: non-finite value at row " +
                                    std::to_string(j + 1) + ", column " + std::to_string(i + 1));
      }
    }
  }
}

TimeSeriesSample TimeSeriesSample::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("TimeSeriesSample: no rows");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != d) {
      throw std::invalid_argument("TimeSeriesSample: row " + std::to_string(j + 1) + " has " +
                                  std::to_string(rows[j].size()) + " entries, expected " +
                                  std::to_string(d));
    }
    flat.insert(flat.end(), rows[j].begin(), rows[j].end());
  }
  return TimeSeriesSample(Matrix(rows.size(), d, std::move(flat)));
}

TimeSeriesSample TimeSeriesSample::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > n()) throw std::out_of_range("TimeSeriesSample::slice");
  Matrix out(end - begin, d());
  for (std::size_t j = begin; j < end; ++j) {
    for (std::size_t i = 0; i < d(); ++i) out(j - begin, i) = data_(j, i);
  }
  return TimeSeriesSample(std::move(out));
}

TimeSeriesSample TimeSeriesSample::select(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), d());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n()) throw std::out_of_range("TimeSeriesSample::select");
    for (std::size_t i = 0; i < d(); ++i) out(r, i) = data_(rows[r], i);
  }
  return TimeSeriesSample(std::move(out));
}

PseudoObservations::PseudoObservations(std::size_t n, std::size_t d,
                                       std::vector<std::uint32_t> ranks)
    : n_(n), d_(d), ranks_(std::move(ranks)) {
  if (n_ == 0 || d_ == 0 || ranks_.size() != n_ * d_) {
    throw std::invalid_argument("PseudoObservations: rank table has wrong shape");
  }
  values_.resize(ranks_.size());
  const double dn = static_cast<double>(n_);
  for (std::size_t k = 0; k < ranks_.size(); ++k) {
    if (ranks_[k] < 1 || ranks_[k] > n_) {
      throw std::invalid_argument("PseudoObservations: rank outside {1,...,n}");
    }
    values_[k] = static_cast<double>(ranks_[k]) / dn;
  }
}

EvaluationPoint::EvaluationPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("EvaluationPoint: empty");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!(coords_[i] >= 0.0 && coords_[i] <= 1.0)) {
      throw std::invalid_argument("EvaluationPoint: coordinate " + std::to_string(i) +
                                  " outside [0,1]");
    }
  }
}

EvaluationPoint EvaluationPoint::only_coordinate(std::size_t i) const {
  std::vector<double> c(coords_.size(), 1.0);
  c.at(i) = coords_[i];
  return EvaluationPoint(std::move(c));
}

}  // namespace tbm

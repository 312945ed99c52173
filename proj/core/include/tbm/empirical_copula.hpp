#pragma once

#include <cstddef>
#include <span>

#include "tbm/sample.hpp"

namespace tbm {

// Normalized ranks of each column (ties receive the maximal rank).
PseudoObservations pseudo_observations(const TimeSeriesSample& sample);

// (1/n) #{j : U_j <= u componentwise}.
double empirical_copula_at(const PseudoObservations& pseudo, const EvaluationPoint& u);

// Same count without the [0,1] check on u; coordinates above 1 act as 1.
double empirical_copula_unchecked(const PseudoObservations& pseudo, std::span<const double> u);

// Bandwidth n^{-1/2} (capped at 0.4).
double default_bandwidth(std::size_t n);

// Finite-difference estimate of the i-th first-order partial derivative of
// the copula at u, clamped to [0,1]:
//   (C(u + h e_i) - C(u - h e_i)) / 2h   if h <= u_i <= 1 - h
//   C(u + 2h e_i) / 2h                   if u_i < h
//   (C(u) - C(u - 2h e_i)) / 2h          if u_i > 1 - h
// Throws std::invalid_argument unless 0 < h < 1/2.
double partial_derivative_estimate(const PseudoObservations& pseudo, const EvaluationPoint& u,
                                   std::size_t coordinate, double bandwidth);
double partial_derivative_estimate(const PseudoObservations& pseudo, const EvaluationPoint& u,
                                   std::size_t coordinate);

}  // namespace tbm

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbm/sample.hpp"

namespace tbm {

// Uniform midpoint grid on [0,1]^d with G nodes (a + 1/2)/G per dimension.
// Flat node index: sum_i a_i G^i (coordinate 0 varies fastest).
class MidpointGrid {
 public:
  MidpointGrid(std::size_t dimension, std::size_t nodes_per_dim);

  std::size_t dimension() const noexcept { return d_; }
  std::size_t nodes_per_dim() const noexcept { return g_; }
  std::size_t size() const noexcept { return size_; }
  double node(std::size_t a) const noexcept {
    return (static_cast<double>(a) + 0.5) / static_cast<double>(g_);
  }
  // Coordinates of flat node k.
  std::vector<double> point(std::size_t k) const;
  // Per-dimension node indices of flat node k.
  std::vector<std::size_t> index(std::size_t k) const;

  // Smallest a with value <= node(a); nodes_per_dim() if there is none.
  std::size_t first_node_at_or_above(double value) const noexcept;

 private:
  std::size_t d_;
  std::size_t g_;
  std::size_t size_;
};

// Evaluates weighted empirical distribution functions
//   F(u) = sum_j w_j 1{U_j <= u}
// at every grid node in O(n + d G^d), plus the marginal versions
//   F_i(t) = sum_j w_j 1{U_{j,i} <= t}
// used for the u^(i) terms. Cell indices are cached from the observations.
class GridAccumulator {
 public:
  GridAccumulator(const PseudoObservations& pseudo, const MidpointGrid& grid);

  std::size_t n() const noexcept { return n_; }
  const MidpointGrid& grid() const noexcept { return grid_; }

  // values.size() == grid.size(); marginals.size() == d * G (dimension-major).
  void accumulate(std::span<const double> weights, std::span<double> values,
                  std::span<double> marginals) const;

 private:
  MidpointGrid grid_;
  std::size_t n_;
  std::vector<std::int64_t> cell_;               // flat cell per observation, -1 if none
  std::vector<std::uint32_t> marginal_cell_;     // j * d + i, G if none
};

}  // namespace tbm

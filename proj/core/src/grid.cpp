#include "tbm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tbm {

MidpointGrid::MidpointGrid(std::size_t dimension, std::size_t nodes_per_dim)
    : d_(dimension), g_(nodes_per_dim), size_(1) {
  if (d_ == 0 || g_ == 0) throw std::invalid_argument("MidpointGrid: empty grid");
  for (std::size_t i = 0; i < d_; ++i) {
    if (size_ > (std::size_t{1} << 26) / g_) {
      throw std::invalid_argument("MidpointGrid: grid too large (G^d > 2^26)");
    }
    size_ *= g_;
  }
}

std::vector<std::size_t> MidpointGrid::index(std::size_t k) const {
  std::vector<std::size_t> a(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    a[i] = k % g_;
    k /= g_;
  }
  return a;
}

std::vector<double> MidpointGrid::point(std::size_t k) const {
  std::vector<double> u(d_);
  const auto a = index(k);
  for (std::size_t i = 0; i < d_; ++i) u[i] = node(a[i]);
  return u;
}

std::size_t MidpointGrid::first_node_at_or_above(double value) const noexcept {
  double guess = std::ceil(value * static_cast<double>(g_) - 0.5);
  std::size_t a = guess <= 0.0 ? 0 : static_cast<std::size_t>(std::min(guess, double(g_)));
  while (a > 0 && value <= node(a - 1)) --a;
  while (a < g_ && value > node(a)) ++a;
  return a;
}

GridAccumulator::GridAccumulator(const PseudoObservations& pseudo, const MidpointGrid& grid)
    : grid_(grid), n_(pseudo.n()) {
  if (pseudo.d() != grid.dimension()) {
    throw std::invalid_argument("GridAccumulator: grid dimension does not match data");
  }
  const std::size_t d = grid.dimension();
  const std::size_t g = grid.nodes_per_dim();
  cell_.resize(n_);
  marginal_cell_.resize(n_ * d);
  for (std::size_t j = 0; j < n_; ++j) {
    std::int64_t flat = 0;
    std::int64_t stride = 1;
    bool inside = true;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t a = grid.first_node_at_or_above(pseudo(j, i));
      marginal_cell_[j * d + i] = static_cast<std::uint32_t>(a);
      if (a >= g) inside = false;
      flat += static_cast<std::int64_t>(a) * stride;
      stride *= static_cast<std::int64_t>(g);
    }
    cell_[j] = inside ? flat : -1;
  }
}

void GridAccumulator::accumulate(std::span<const double> weights, std::span<double> values,
                                 std::span<double> marginals) const {
  const std::size_t d = grid_.dimension();
  const std::size_t g = grid_.nodes_per_dim();
  if (weights.size() != n_ || values.size() != grid_.size() || marginals.size() != d * g) {
    throw std::invalid_argument("GridAccumulator::accumulate: buffer size mismatch");
  }
  std::fill(values.begin(), values.end(), 0.0);
  std::fill(marginals.begin(), marginals.end(), 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (cell_[j] >= 0) values[static_cast<std::size_t>(cell_[j])] += weights[j];
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint32_t a = marginal_cell_[j * d + i];
      if (a < g) marginals[i * g + a] += weights[j];
    }
  }
  // Cumulative sums along each dimension turn cell masses into F(node).
  std::size_t stride = 1;
  const std::size_t total = grid_.size();
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t span = stride * g;
    for (std::size_t base = 0; base < total; base += span) {
      for (std::size_t off = 0; off < stride; ++off) {
        double* p = values.data() + base + off;
        for (std::size_t a = 1; a < g; ++a) p[a * stride] += p[(a - 1) * stride];
      }
    }
    stride = span;
    double* m = marginals.data() + i * g;
    for (std::size_t a = 1; a < g; ++a) m[a] += m[a - 1];
  }
}

}  // namespace tbm

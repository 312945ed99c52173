#pragma once

// Tapered block multiplier streams and moving-block bootstrap indices.
//
// A multiplier stream is the moving average xi_j = sum_h k(h) w_{j+h} of i.i.d.
// base variables w with variance 1/q, where k is a discrete kernel supported
// on |h| < l and q = sum_h k(h)^2. Streams are therefore stationary,
// (2l-1)-dependent and have unit variance.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tbm/rng.hpp"

namespace tbm {

enum class KernelKind { Uniform, Triangular };
enum class BaseDistribution { Gamma, Normal, Rademacher };
// Raw streams have mean 1 (Gamma base); centered streams have mean 0.
enum class CenteringMode { Raw, Centered };

inline constexpr int kMaxBlockLength = 1000;

struct KernelSpec {
  KernelKind kind = KernelKind::Triangular;
  int block_length = 1;

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

struct MultiplierConfig {
  KernelSpec kernel;
  BaseDistribution base = BaseDistribution::Normal;
  CenteringMode mode = CenteringMode::Centered;

  // Mode implied by the base distribution (Gamma -> Raw, otherwise Centered).
  static MultiplierConfig with_base(KernelSpec kernel, BaseDistribution base);
  // Throws std::invalid_argument for Gamma/Centered or Normal,Rademacher/Raw.
  void validate() const;
  bool operator==(const MultiplierConfig&) const = default;
};

struct MultiplierStream {
  std::vector<double> values;
  MultiplierConfig config;
};

// Weights k(h) for h = -(l-1), ..., l-1 (index h + l - 1).
std::vector<double> kernel_weights(const KernelSpec& spec);

// Variance normalizer q = sum_h k(h)^2:
//   uniform: 1/(2l-1);  triangular: 2/(3l) + 1/(3l^3).
double kernel_q(const KernelSpec& spec);

// Exact autocovariance of a generated stream at the given lag,
// (1/q) sum_g k(g) k(g+lag). Zero for |lag| >= 2l - 1.
double theoretical_autocovariance(const KernelSpec& spec, long lag);

MultiplierStream generate_multipliers(const MultiplierConfig& config, std::size_t n,
                                      Engine& rng);

// Moving-block bootstrap: ceil(n / l) uniform block starts in {0, ..., n-l},
// blocks of l consecutive indices concatenated and truncated to length n.
std::vector<std::size_t> block_bootstrap_indices(std::size_t n, std::size_t block_length,
                                                 Engine& rng);

// floor(1.1 n^{1/4}) and floor(1.25 n^{1/3}), at least 1.
int default_multiplier_block_length(std::size_t n);
int default_bootstrap_block_length(std::size_t n);

std::string_view to_string(KernelKind kind);
std::string_view to_string(BaseDistribution base);
std::string_view to_string(CenteringMode mode);
KernelKind parse_kernel_kind(std::string_view text);
BaseDistribution parse_base_distribution(std::string_view text);
CenteringMode parse_centering_mode(std::string_view text);

}  // namespace tbm

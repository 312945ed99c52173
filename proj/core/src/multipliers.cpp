#include "tbm/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace tbm {
namespace {

// Kernel weight k(h) = numerator(h) / denominator.
struct RationalKernel {
  std::int64_t denominator;
  std::int64_t q_numerator;
  std::int64_t q_denominator;

  std::int64_t numerator(KernelKind kind, std::int64_t l, std::int64_t h) const {
    const std::int64_t a = std::llabs(h);
    if (a >= l) return 0;
    return kind == KernelKind::Uniform ? 1 : l - a;
  }
};

RationalKernel rational_kernel(const KernelSpec& spec) {
  const std::int64_t l = spec.block_length;
  if (spec.kind == KernelKind::Uniform) return {2 * l - 1, 1, 2 * l - 1};
  return {l * l, 2 * l * l + 1, 3 * l * l * l};
}

}  // namespace

void KernelSpec::validate() const {
  if (block_length < 1 || block_length > kMaxBlockLength) {
    throw std::invalid_argument("kernel block length must lie in [1, " +
                                std::to_string(kMaxBlockLength) + "], got " +
                                std::to_string(block_length));
  }
}

MultiplierConfig MultiplierConfig::with_base(KernelSpec kernel, BaseDistribution base) {
  return {kernel, base,
          base == BaseDistribution::Gamma ? CenteringMode::Raw : CenteringMode::Centered};
}

void MultiplierConfig::validate() const {
  kernel.validate();
  const bool gamma = base == BaseDistribution::Gamma;
  if (gamma && mode != CenteringMode::Raw) {
    throw std::invalid_argument("gamma multipliers require the raw (mean one) mode");
  }
  if (!gamma && mode != CenteringMode::Centered) {
    throw std::invalid_argument(std::string(to_string(base)) +
                                " multipliers require the centered (mean zero) mode");
  }
}

std::vector<double> kernel_weights(const KernelSpec& spec) {
  spec.validate();
  const std::int64_t l = spec.block_length;
  const RationalKernel rk = rational_kernel(spec);
  std::vector<double> w(static_cast<std::size_t>(2 * l - 1));
  for (std::int64_t h = -(l - 1); h <= l - 1; ++h) {
    w[static_cast<std::size_t>(h + l - 1)] =
        static_cast<double>(rk.numerator(spec.kind, l, h)) / static_cast<double>(rk.denominator);
  }
  return w;
}

double kernel_q(const KernelSpec& spec) {
  spec.validate();
  const RationalKernel rk = rational_kernel(spec);
  return static_cast<double>(rk.q_numerator) / static_cast<double>(rk.q_denominator);
}

double theoretical_autocovariance(const KernelSpec& spec, long lag) {
  spec.validate();
  const std::int64_t l = spec.block_length;
  const std::int64_t h = std::labs(lag);
  if (h >= 2 * l - 1) return 0.0;
  const RationalKernel rk = rational_kernel(spec);
  std::int64_t conv = 0;
  for (std::int64_t g = -(l - 1); g <= l - 1; ++g) {
    conv += rk.numerator(spec.kind, l, g) * rk.numerator(spec.kind, l, g + h);
  }
  // conv / den^2 / (q_num / q_den), reduced before the single rounding step.
  std::int64_t num = conv;
  std::int64_t den = rk.denominator;
  std::int64_t den2 = rk.denominator;
  std::int64_t qn = rk.q_numerator;
  std::int64_t qd = rk.q_denominator;
  auto reduce = [](std::int64_t& a, std::int64_t& b) {
    const std::int64_t g = std::gcd(a, b);
    if (g > 1) {
      a /= g;
      b /= g;
    }
  };
  reduce(num, den);
  reduce(num, den2);
  reduce(num, qn);
  reduce(qd, den);
  reduce(qd, den2);
  return static_cast<double>(num * qd) / static_cast<double>(den * den2 * qn);
}

MultiplierStream generate_multipliers(const MultiplierConfig& config, std::size_t n,
                                      Engine& rng) {
  config.validate();
  if (n == 0) throw std::invalid_argument("generate_multipliers: length must be positive");
  const std::vector<double> kernel = kernel_weights(config.kernel);
  const double q = kernel_q(config.kernel);
  const std::size_t width = kernel.size();
  std::vector<double> base(n + width - 1);
  switch (config.base) {
    case BaseDistribution::Gamma: {
      std::gamma_distribution<double> dist(q, 1.0 / q);
      for (double& w : base) w = dist(rng);
      break;
    }
    case BaseDistribution::Normal: {
      std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(q));
      for (double& w : base) w = dist(rng);
      break;
    }
    case BaseDistribution::Rademacher: {
      const double a = 1.0 / std::sqrt(q);
      std::uint64_t bits = 0;
      int left = 0;
      for (double& w : base) {
        if (left == 0) {
          bits = rng();
          left = 64;
        }
        w = (bits & 1U) ? a : -a;
        bits >>= 1;
        --left;
      }
      break;
    }
  }
  MultiplierStream stream{std::vector<double>(n), config};
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < width; ++t) s += kernel[t] * base[j + t];
    stream.values[j] = s;
  }
  return stream;
}

std::vector<std::size_t> block_bootstrap_indices(std::size_t n, std::size_t block_length,
                                                 Engine& rng) {
  if (block_length < 1 || block_length > n) {
    throw std::invalid_argument("block bootstrap: block length must lie in [1, n]");
  }
  std::uniform_int_distribution<std::size_t> start(0, n - block_length);
  std::vector<std::size_t> idx;
  idx.reserve(n);
  while (idx.size() < n) {
    const std::size_t h = start(rng);
    for (std::size_t t = 0; t < block_length && idx.size() < n; ++t) idx.push_back(h + t);
  }
  return idx;
}

int default_multiplier_block_length(std::size_t n) {
  return std::max(1, static_cast<int>(std::floor(1.1 * std::pow(static_cast<double>(n), 0.25))));
}

int default_bootstrap_block_length(std::size_t n) {
  return std::max(1,
                  static_cast<int>(std::floor(1.25 * std::cbrt(static_cast<double>(n)))));
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::Uniform ? "uniform" : "triangular";
}

std::string_view to_string(BaseDistribution base) {
  switch (base) {
    case BaseDistribution::Gamma: return "gamma";
    case BaseDistribution::Normal: return "normal";
    case BaseDistribution::Rademacher: return "rademacher";
  }
  return "?";
}

std::string_view to_string(CenteringMode mode) {
  return mode == CenteringMode::Raw ? "raw" : "centered";
}

KernelKind parse_kernel_kind(std::string_view text) {
  if (text == "uniform") return KernelKind::Uniform;
  if (text == "triangular") return KernelKind::Triangular;
  throw std::invalid_argument("unknown kernel '" + std::string(text) +
                              "' (expected uniform|triangular)");
}

BaseDistribution parse_base_distribution(std::string_view text) {
  if (text == "gamma") return BaseDistribution::Gamma;
  if (text == "normal") return BaseDistribution::Normal;
  if (text == "rademacher") return BaseDistribution::Rademacher;
  throw std::invalid_argument("unknown base distribution '" + std::string(text) +
                              "' (expected gamma|normal|rademacher)");
}

CenteringMode parse_centering_mode(std::string_view text) {
  if (text == "raw") return CenteringMode::Raw;
  if (text == "centered") return CenteringMode::Centered;
  throw std::invalid_argument("unknown mode '" + std::string(text) +
                              "' (expected raw|centered)");
}

}  // namespace tbm

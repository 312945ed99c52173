#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tbm/multipliers.hpp"
#include "tbm/rng.hpp"

namespace tbm {
namespace {

double sample_autocovariance(const std::vector<double>& x, std::size_t lag, double mean) {
  double s = 0.0;
  for (std::size_t j = 0; j + lag < x.size(); ++j) s += (x[j] - mean) * (x[j + lag] - mean);
  return s / static_cast<double>(x.size() - lag);
}

TEST(Kernel, UniformWeights) {
  const auto w = kernel_weights({KernelKind::Uniform, 3});
  ASSERT_EQ(w.size(), 5U);
  for (double v : w) EXPECT_DOUBLE_EQ(v, 1.0 / 5.0);
  const auto one = kernel_weights({KernelKind::Uniform, 1});
  ASSERT_EQ(one.size(), 1U);
  EXPECT_EQ(one[0], 1.0);
}

TEST(Kernel, TriangularWeights) {
  const auto w = kernel_weights({KernelKind::Triangular, 3});
  const std::vector<double> expected{1.0 / 9, 2.0 / 9, 1.0 / 3, 2.0 / 9, 1.0 / 9};
  ASSERT_EQ(w.size(), expected.size());
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_DOUBLE_EQ(w[k], expected[k]);
}

TEST(Kernel, SumSymmetryAndQ) {
  for (auto kind : {KernelKind::Uniform, KernelKind::Triangular}) {
    for (int l = 1; l <= 40; ++l) {
      const KernelSpec spec{kind, l};
      const auto w = kernel_weights(spec);
      ASSERT_EQ(w.size(), static_cast<std::size_t>(2 * l - 1));
      EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
      for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(w[k], w[w.size() - 1 - k]);
      double sq = 0.0;
      for (double v : w) sq += v * v;
      EXPECT_NEAR(kernel_q(spec), sq, 1e-14);
    }
  }
  EXPECT_DOUBLE_EQ(kernel_q({KernelKind::Triangular, 3}), 19.0 / 81.0);
  EXPECT_DOUBLE_EQ(kernel_q({KernelKind::Uniform, 4}), 1.0 / 7.0);
}

TEST(Kernel, BlockLengthRange) {
  EXPECT_THROW(kernel_weights({KernelKind::Uniform, 0}), std::invalid_argument);
  EXPECT_THROW(kernel_weights({KernelKind::Uniform, kMaxBlockLength + 1}),
               std::invalid_argument);
}

TEST(Autocovariance, UniformClosedForm) {
  for (int l = 1; l <= 10; ++l) {
    const KernelSpec spec{KernelKind::Uniform, l};
    for (long h = -(2 * l); h <= 2 * l; ++h) {
      const long a = std::labs(h);
      const double expected = a < 2 * l - 1 ? double(2 * l - 1 - a) / double(2 * l - 1) : 0.0;
      EXPECT_EQ(theoretical_autocovariance(spec, h), expected) << "l=" << l << " h=" << h;
    }
  }
  EXPECT_EQ(theoretical_autocovariance({KernelKind::Uniform, 3}, 2), 3.0 / 5.0);
}

TEST(Autocovariance, TriangularConvolution) {
  // Independent evaluation of (1/q) sum_g k(g) k(g + 1) with q = 19/81 for l = 3:
  // weights (1,2,3,2,1)/9, lag-1 products 2+6+6+2 = 16, so 16/81 / (19/81) = 16/19.
  EXPECT_DOUBLE_EQ(theoretical_autocovariance({KernelKind::Triangular, 3}, 1), 16.0 / 19.0);
  for (int l = 1; l <= 10; ++l) {
    EXPECT_EQ(theoretical_autocovariance({KernelKind::Triangular, l}, 0), 1.0);
    EXPECT_EQ(theoretical_autocovariance({KernelKind::Triangular, l}, 2 * l - 1), 0.0);
  }
}

TEST(Multipliers, ModeCombinations) {
  MultiplierConfig bad{{KernelKind::Uniform, 3}, BaseDistribution::Gamma, CenteringMode::Centered};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {{KernelKind::Uniform, 3}, BaseDistribution::Normal, CenteringMode::Raw};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {{KernelKind::Uniform, 3}, BaseDistribution::Rademacher, CenteringMode::Raw};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_EQ(MultiplierConfig::with_base({}, BaseDistribution::Gamma).mode, CenteringMode::Raw);
  EXPECT_EQ(MultiplierConfig::with_base({}, BaseDistribution::Rademacher).mode,
            CenteringMode::Centered);
}

TEST(Multipliers, Reproducible) {
  const auto config = MultiplierConfig::with_base({KernelKind::Triangular, 4},
                                                  BaseDistribution::Normal);
  Engine a = make_engine(42, {1, 2});
  Engine b = make_engine(42, {1, 2});
  EXPECT_EQ(generate_multipliers(config, 500, a).values,
            generate_multipliers(config, 500, b).values);
  Engine c = make_engine(42, {1, 3});
  EXPECT_NE(generate_multipliers(config, 500, a).values,
            generate_multipliers(config, 500, c).values);
}

TEST(Multipliers, GammaStrictlyPositive) {
  const auto config = MultiplierConfig::with_base({KernelKind::Uniform, 3},
                                                  BaseDistribution::Gamma);
  Engine rng = make_engine(3);
  const auto s = generate_multipliers(config, 100000, rng);
  EXPECT_GT(*std::min_element(s.values.begin(), s.values.end()), 0.0);
}

TEST(Multipliers, UniformGammaMoments) {
  const auto config = MultiplierConfig::with_base({KernelKind::Uniform, 3},
                                                  BaseDistribution::Gamma);
  Engine rng = make_engine(11);
  const auto x = generate_multipliers(config, 100000, rng).values;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  EXPECT_NEAR(mean, 1.0, 0.02);
  EXPECT_NEAR(sample_autocovariance(x, 0, mean), 1.0, 0.05);
  const double expected[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.0, 0.0};
  for (std::size_t h = 0; h < 7; ++h) {
    EXPECT_NEAR(sample_autocovariance(x, h, mean), expected[h], 0.05) << h;
  }
}

TEST(Multipliers, RademacherValues) {
  const auto config = MultiplierConfig::with_base({KernelKind::Uniform, 1},
                                                  BaseDistribution::Rademacher);
  Engine rng = make_engine(5);
  const auto x = generate_multipliers(config, 1000, rng).values;
  std::set<double> distinct(x.begin(), x.end());
  EXPECT_EQ(distinct, (std::set<double>{-1.0, 1.0}));
}

TEST(BlockBootstrap, Shapes) {
  Engine rng = make_engine(1);
  const auto full = block_bootstrap_indices(10, 10, rng);
  std::vector<std::size_t> identity(10);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_EQ(full, identity);

  const auto idx = block_bootstrap_indices(10, 3, rng);
  ASSERT_EQ(idx.size(), 10U);
  for (std::size_t b = 0; b < 3; ++b) {
    EXPECT_EQ(idx[3 * b + 1], idx[3 * b] + 1);
    EXPECT_EQ(idx[3 * b + 2], idx[3 * b] + 2);
    EXPECT_LE(idx[3 * b], 7U);
  }
  EXPECT_LE(idx[9], 7U);

  const auto iid = block_bootstrap_indices(50, 1, rng);
  for (auto v : iid) EXPECT_LT(v, 50U);
  EXPECT_THROW(block_bootstrap_indices(10, 0, rng), std::invalid_argument);
  EXPECT_THROW(block_bootstrap_indices(10, 11, rng), std::invalid_argument);
}

TEST(BlockLength, Defaults) {
  EXPECT_EQ(default_multiplier_block_length(100), 3);
  EXPECT_EQ(default_multiplier_block_length(200), 4);
  EXPECT_EQ(default_bootstrap_block_length(100), 5);
  EXPECT_EQ(default_bootstrap_block_length(200), 7);
  EXPECT_EQ(default_multiplier_block_length(1), 1);
}

TEST(Names, RoundTrip) {
  for (auto k : {KernelKind::Uniform, KernelKind::Triangular}) {
    EXPECT_EQ(parse_kernel_kind(to_string(k)), k);
  }
  for (auto b : {BaseDistribution::Gamma, BaseDistribution::Normal, BaseDistribution::Rademacher}) {
    EXPECT_EQ(parse_base_distribution(to_string(b)), b);
  }
  EXPECT_EQ(parse_centering_mode("raw"), CenteringMode::Raw);
  EXPECT_THROW(parse_kernel_kind("bartlett"), std::invalid_argument);
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 30; ++a) {
    for (std::uint64_t b = 0; b < 30; ++b) seen.insert(derive_seed(7, {a, b}));
  }
  EXPECT_EQ(seen.size(), 900U);
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
  static_assert(derive_seed(1, {2}) == derive_seed(1, {2}));
}

}  // namespace
}  // namespace tbm

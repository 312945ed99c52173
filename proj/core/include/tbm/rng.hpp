#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tbm {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Substream seed for the path (master, ids...). Distinct id paths give
// unrelated seeds, so replicates can be generated in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> ids) noexcept {
  std::uint64_t h = splitmix64(master ^ 0x5DEECE66DULL);
  for (std::uint64_t id : ids) {
    h = splitmix64(h ^ splitmix64(id + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed)),
                    static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
  return Engine(seq);
}

inline Engine make_engine(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
  return make_engine(derive_seed(master, ids));
}

}  // namespace tbm

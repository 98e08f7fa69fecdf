#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace batforge {

// mt19937_64 output is fixed by the standard. The helpers below avoid the
// library-defined distributions so draws are identical across toolchains.
using Rng = std::mt19937_64;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Independent stream seed for a named consumer of the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

inline Rng make_rng(std::uint64_t seed, std::string_view stream) {
  return Rng(derive_seed(seed, stream));
}

// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform real in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Standard normal via Box-Muller.
double standard_normal(Rng& rng);

template <typename It>
void shuffle_range(It first, It last, Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace batforge

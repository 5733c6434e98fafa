#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace idalc {

// Engine output is fixed by the standard; the helpers below avoid the
// implementation-defined std:: distributions so seeded runs reproduce
// across standard libraries.
using Rng = std::mt19937_64;

// SplitMix64 finalizer; mixes a base seed with a stream tag.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform double in [0, 1).
double uniform_unit(Rng& rng);

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

// `count` distinct indices from [0, n), in sampling order.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t count,
                                                    Rng& rng);

}  // namespace idalc

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mtdea {

// All randomness flows from one master seed through named substreams, so every
// component (batching, negative sampling, adaptation masks, ...) is
// independently reproducible. Hashing is fixed (FNV-1a + splitmix64), never
// std::hash, to keep streams stable across builds.

std::uint64_t splitmix64(std::uint64_t x);

// Seed for substream `name[index]` of `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

std::mt19937_64 substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

// Uniform integer in [0, n). Lemire multiply-shift; deterministic across platforms.
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n);

// Uniform double in [0, 1).
double rand_unit(std::mt19937_64& rng);

// Uniform double in [lo, hi).
double rand_range(std::mt19937_64& rng, double lo, double hi);

}  // namespace mtdea

#pragma once

#include <cstdint>
#include <random>

namespace fusion {

using Rng = std::mt19937_64;

// Deterministic seed derivation so that every (run, step, block) triple gets
// its own generator independently of how work is scheduled on threads.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

inline Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(derive_seed(seed, a, b));
}

inline double unif01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace fusion

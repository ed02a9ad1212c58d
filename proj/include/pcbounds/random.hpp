#ifndef PCBOUNDS_RANDOM_HPP
#define PCBOUNDS_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace pcbounds {

// std::mt19937_64 output is fixed by the standard, but the standard
// distributions are not; these helpers keep generated data identical across
// standard library implementations.
using Engine = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Exp(1) variate; normalised vectors of these are Dirichlet(1, ..., 1).
inline double standard_exponential(Engine& engine) {
  return -std::log1p(-uniform01(engine));
}

}  // namespace pcbounds

#endif  // PCBOUNDS_RANDOM_HPP

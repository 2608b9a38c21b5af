#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lgra {

using Rng = std::mt19937_64;

// Independent stream tags. Every random draw in the library is keyed by a
// master seed and a path of these tags, so results do not depend on the order
// in which trials or clusters are processed.
enum class Stream : std::uint64_t {
  kPlacement = 1,
  kShadowing,
  kAssignment,
  kGrouping,
  kD2d,
  kTrial,
  kActivity,
  kSmallScale,
  kPhase1Noise,
  kPhase1Repetition,
  kPreamble,
  kPhase2Noise,
  kGainDraw,
};

std::uint64_t splitmix64(std::uint64_t x);

// Hashes a seed together with a path of integers.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

Rng make_rng(std::uint64_t seed);

// CN(0, variance) sample.
std::complex<double> complex_normal(Rng& rng, std::normal_distribution<double>& unit, double variance);

// Counter-based uniform in (0, 1) from a 64-bit key.
double hashed_uniform(std::uint64_t key);

// Counter-based standard normal pair from a 64-bit key (Box-Muller).
std::pair<double, double> hashed_normal_pair(std::uint64_t key);

}  // namespace lgra

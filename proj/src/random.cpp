#include "lgra/random.hpp"

#include <cmath>
#include <numbers>

namespace lgra {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

std::complex<double> complex_normal(Rng& rng, std::normal_distribution<double>& unit, double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = unit(rng);
  const double im = unit(rng);
  return {s * re, s * im};
}

double hashed_uniform(std::uint64_t key) {
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(splitmix64(key) >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> hashed_normal_pair(std::uint64_t key) {
  const double u1 = hashed_uniform(key);
  const double u2 = hashed_uniform(key ^ 0xd1b54a32d192ed03ULL);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace lgra

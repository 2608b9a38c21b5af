#include "lgra/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lgra/cell.hpp"
#include "lgra/config.hpp"
#include "lgra/error.hpp"

namespace lgra {

double large_scale_gain_db(double distance_m, double shadow_db, const PathLoss& pl) {
  if (!(distance_m > 0)) throw std::invalid_argument("large_scale_gain_db: distance must be positive");
  return -(pl.alpha + pl.beta * std::log10(distance_m)) + shadow_db;
}

double db_to_amplitude(double gain_db) { return std::pow(10.0, gain_db / 20.0); }

double sample_gain(double distance_m, const PathLoss& pl, double shadow_std_db, Rng& rng) {
  std::normal_distribution<double> unit;
  const double shadow = shadow_std_db > 0 ? shadow_std_db * unit(rng) : 0.0;
  return db_to_amplitude(large_scale_gain_db(distance_m, shadow, pl));
}

std::complex<double> D2dLinks::coefficient(int i, int n, double distance_m) const {
  const auto lo = static_cast<std::uint64_t>(std::min(i, n));
  const auto hi = static_cast<std::uint64_t>(std::max(i, n));
  const std::uint64_t key = derive_seed(seed_, {lo, hi});
  const auto [z, unused] = hashed_normal_pair(key);
  (void)unused;
  const double phase = 2.0 * std::numbers::pi * hashed_uniform(key ^ 0x9e3779b97f4a7c15ULL);
  const double d = std::max(distance_m, 1.0);
  const double amp = db_to_amplitude(large_scale_gain_db(d, shadow_std_db_ * z, pl_));
  return std::polar(amp, phase);
}

double D2dLinks::reach(double min_power) const {
  // Solve -(alpha + beta*log10 d) + 5 sigma = 10 log10(min_power) for d.
  const double exponent = (-10.0 * std::log10(min_power) + 5.0 * shadow_std_db_ - pl_.alpha) / pl_.beta;
  return std::pow(10.0, exponent);
}

ChannelTable sample_channels(const CellState& cell, const ScenarioConfig& config, std::uint64_t seed) {
  const std::size_t n = cell.users.size();
  ChannelTable table;
  table.beta.resize(n);
  table.g.resize(n);
  table.h_small.resize(n);
  table.h_ub.resize(n);
  Rng rng = make_rng(derive_seed(seed, {tag(Stream::kSmallScale)}));
  std::normal_distribution<double> unit;
  for (std::size_t u = 0; u < n; ++u) {
    const double g = cell.gain[u];
    table.g[u] = g;
    table.beta[u] = g * g;
    table.h_small[u] = config.small_scale_fading ? complex_normal(rng, unit, 1.0) : std::complex<double>(1.0, 0.0);
    table.h_ub[u] = g * table.h_small[u];
  }
  return table;
}

}  // namespace lgra

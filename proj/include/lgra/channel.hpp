#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lgra/random.hpp"

namespace lgra {

struct CellState;
struct ScenarioConfig;

struct PathLoss {
  double alpha = 15.3;
  double beta = 37.6;
};

// Signed large-scale gain in dB: -(alpha + beta*log10(d)) + shadow_db.
double large_scale_gain_db(double distance_m, double shadow_db, const PathLoss& pl);

// Amplitude convention: g = 10^(dB/20), so that the power gain is g^2.
double db_to_amplitude(double gain_db);

// One large-scale amplitude draw at a fixed distance.
double sample_gain(double distance_m, const PathLoss& pl, double shadow_std_db, Rng& rng);

// Reciprocal device-to-device links. Coefficients are a pure function of the
// unordered user pair, so no table is stored and d2d(i, n) == d2d(n, i).
class D2dLinks {
 public:
  D2dLinks() = default;
  D2dLinks(std::uint64_t seed, PathLoss pl, double shadow_std_db)
      : seed_(seed), pl_(pl), shadow_std_db_(shadow_std_db) {}

  std::complex<double> coefficient(int i, int n, double distance_m) const;
  double power(int i, int n, double distance_m) const { return std::norm(coefficient(i, n, distance_m)); }

  // Distance beyond which the power gain is below `min_power` for every
  // shadowing draw within five standard deviations.
  double reach(double min_power) const;

 private:
  std::uint64_t seed_ = 0;
  PathLoss pl_{};
  double shadow_std_db_ = 0.0;
};

// Per-RAO channel state toward the base station.
struct ChannelTable {
  std::vector<double> beta;                   // g^2, realized large-scale power gain
  std::vector<double> g;                      // large-scale amplitude
  std::vector<std::complex<double>> h_small;  // CN(0, 1), or 1 when small-scale fading is off
  std::vector<std::complex<double>> h_ub;     // g * h_small
};

// Copies the cell's static large-scale gains and draws fresh small-scale
// coefficients for one access opportunity.
ChannelTable sample_channels(const CellState& cell, const ScenarioConfig& config, std::uint64_t seed);

}  // namespace lgra

#pragma once

#include <vector>

#include "lgra/channel.hpp"
#include "lgra/config.hpp"

namespace lgra {

// Discrete representation of a large-scale amplitude distribution: nodes g_i
// with probability weights summing to one.
struct GainDistribution {
  std::vector<double> gain;
  std::vector<double> weight;

  double mean_power() const;  // E[g^2]
  std::size_t size() const { return gain.size(); }

  static GainDistribution point_mass(double g);
  static GainDistribution empirical(const std::vector<double>& gains);
};

// Closed-form density of the large-scale amplitude g for users in the ring
// [R1, R2] under log-distance path loss and log-normal shadowing.
//
// With RadialLaw::kShiftedDisc the density is the two-term expression
//   a1 g^-gamma1 Q1(g) - a2 g^-gamma2 Q2(g)
// which corresponds to the distance density 2(d - R1)/(R2 - R1)^2. With
// RadialLaw::kUniformArea (users uniform over the ring area, as placed by the
// simulator) only the first term survives, rescaled by
// (R2 - R1)^2 / (R2^2 - R1^2).
class FadingPdf {
 public:
  struct Constants {
    double a1, a2, gamma1, gamma2, b, c11, c12, c21, c22;
  };

  FadingPdf(Ring ring, PathLoss pl, double shadow_std_db, RadialLaw law = RadialLaw::kUniformArea);

  double density(double g) const;  // throws std::invalid_argument for g <= 0
  double q(int i, double g) const;  // Q_i(g), i in {1, 2}
  const Constants& constants() const { return c_; }
  Ring ring() const { return ring_; }
  RadialLaw law() const { return law_; }

  // Support in dB outside which the probability mass is negligible (< 1e-6).
  double db_lower() const;
  double db_upper() const;

  // Composite Gauss-Legendre tabulation over the support, in the dB domain,
  // renormalized to unit mass. `raw_mass` receives the mass before
  // renormalization when non-null.
  GainDistribution tabulate(int nodes, double* raw_mass = nullptr) const;

 private:
  Ring ring_;
  PathLoss pl_;
  double sigma_;
  RadialLaw law_;
  Constants c_{};
  double log_a1_ = 0.0;
  double log_a2_ = 0.0;  // -inf when R1 == 0
  double area_scale_ = 1.0;
};

// Gain distribution for one cluster ring. Uses FadingPdf when shadowing is
// present, a distance-only quadrature without shadowing, and a unit point
// mass in the unit-gain setting.
GainDistribution ring_gain_distribution(const ScenarioConfig& config, Ring ring);

}  // namespace lgra

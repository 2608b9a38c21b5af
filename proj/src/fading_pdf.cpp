#include "lgra/fading_pdf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "lgra/error.hpp"
#include "lgra/quadrature.hpp"

namespace lgra {

namespace {

constexpr double kQLimit = 7.0;  // exp(-49) is far below the quadrature tolerance
constexpr double kTailSigmas = 5.0;
constexpr double kInnerFraction = 1e-3;

double effective_inner(const Ring& ring) { return ring.inner > 0 ? ring.inner : ring.outer * kInnerFraction; }

}  // namespace

double GainDistribution::mean_power() const {
  double s = 0.0;
  for (std::size_t i = 0; i < gain.size(); ++i) s += weight[i] * gain[i] * gain[i];
  return s;
}

GainDistribution GainDistribution::point_mass(double g) { return {{g}, {1.0}}; }

GainDistribution GainDistribution::empirical(const std::vector<double>& gains) {
  GainDistribution d;
  d.gain = gains;
  d.weight.assign(gains.size(), gains.empty() ? 0.0 : 1.0 / static_cast<double>(gains.size()));
  return d;
}

FadingPdf::FadingPdf(Ring ring, PathLoss pl, double shadow_std_db, RadialLaw law)
    : ring_(ring), pl_(pl), sigma_(shadow_std_db), law_(law) {
  if (!(ring.inner >= 0 && ring.outer > ring.inner)) throw std::invalid_argument("FadingPdf: invalid ring");
  if (!(pl.beta > 0)) throw std::invalid_argument("FadingPdf: path-loss slope must be positive");
  if (!(shadow_std_db > 0)) throw std::invalid_argument("FadingPdf: shadowing deviation must be positive");

  const double ln10 = std::numbers::ln10;
  const double r1 = ring.inner;
  const double r2 = ring.outer;
  const double a = pl.alpha;
  const double bpl = pl.beta;
  const double s2 = sigma_ * sigma_;
  const double spread = (r2 - r1) * (r2 - r1) * bpl * std::sqrt(std::numbers::pi);

  log_a1_ = std::log(40.0 / spread) + 2.0 * ln10 * ln10 * s2 / (bpl * bpl) - 2.0 * ln10 * a / bpl;
  log_a2_ = r1 > 0 ? std::log(40.0 * r1 / spread) + ln10 * ln10 * s2 / (2.0 * bpl * bpl) - ln10 * a / bpl
                   : -std::numeric_limits<double>::infinity();

  c_.a1 = std::exp(log_a1_);
  c_.a2 = std::exp(log_a2_);
  c_.gamma1 = 40.0 / bpl + 1.0;
  c_.gamma2 = 20.0 / bpl + 1.0;
  c_.b = -10.0 * std::numbers::sqrt2 / (ln10 * sigma_);
  const double root2s = std::numbers::sqrt2 * sigma_;
  const double inner_term = r1 > 0 ? (-a - bpl * std::log10(r1)) / root2s : std::numeric_limits<double>::infinity();
  const double outer_term = (-a - bpl * std::log10(r2)) / root2s;
  c_.c11 = outer_term - 20.0 / (1.0 * bpl * c_.b);
  c_.c21 = outer_term - 20.0 / (2.0 * bpl * c_.b);
  c_.c12 = inner_term - 20.0 / (1.0 * bpl * c_.b);
  c_.c22 = inner_term - 20.0 / (2.0 * bpl * c_.b);

  area_scale_ = (r2 - r1) * (r2 - r1) / (r2 * r2 - r1 * r1);
}

double FadingPdf::q(int i, double g) const {
  if (!(g > 0)) throw std::invalid_argument("FadingPdf: gain must be positive");
  const double lg = std::log(g);
  const double lo_c = i == 1 ? c_.c11 : c_.c21;
  const double hi_c = i == 1 ? c_.c12 : c_.c22;
  const double lo = std::max(c_.b * lg + lo_c, -kQLimit);
  const double hi = std::isinf(hi_c) ? kQLimit : std::min(c_.b * lg + hi_c, kQLimit);
  if (hi <= lo) return 0.0;
  return adaptive_simpson([](double s) { return std::exp(-s * s); }, lo, hi, 1e-8);
}

double FadingPdf::density(double g) const {
  if (!(g > 0)) throw std::invalid_argument("FadingPdf: gain must be positive");
  const double lg = std::log(g);
  const double first = std::exp(log_a1_ - c_.gamma1 * lg) * q(1, g);
  if (law_ == RadialLaw::kUniformArea) return area_scale_ * first;
  const double second = std::isinf(log_a2_) ? 0.0 : std::exp(log_a2_ - c_.gamma2 * lg) * q(2, g);
  return std::max(first - second, 0.0);
}

double FadingPdf::db_lower() const {
  return -(pl_.alpha + pl_.beta * std::log10(ring_.outer)) - kTailSigmas * sigma_;
}

double FadingPdf::db_upper() const {
  return -(pl_.alpha + pl_.beta * std::log10(effective_inner(ring_))) + kTailSigmas * sigma_;
}

GainDistribution FadingPdf::tabulate(int nodes, double* raw_mass) const {
  const int panels = std::max(1, nodes / 16);
  const GaussRule rule = composite_gauss(db_lower(), db_upper(), panels);
  GainDistribution out;
  const double jac = std::numbers::ln10 / 20.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double g = db_to_amplitude(rule.nodes[i]);
    const double w = density(g) * g * jac * rule.weights[i];
    if (w <= 0) continue;
    out.gain.push_back(g);
    out.weight.push_back(w);
  }
  const double mass = std::accumulate(out.weight.begin(), out.weight.end(), 0.0);
  if (raw_mass) *raw_mass = mass;
  if (!(mass > 0)) throw SolverError("FadingPdf: tabulated mass is zero");
  for (double& w : out.weight) w /= mass;
  return out;
}

GainDistribution ring_gain_distribution(const ScenarioConfig& config, Ring ring) {
  if (config.unit_gain) return GainDistribution::point_mass(1.0);
  const PathLoss pl{config.pathloss_alpha, config.pathloss_beta};
  if (config.shadowing_var > 0) {
    return FadingPdf(ring, pl, config.shadow_std_db(), config.radial_law).tabulate(config.gain_nodes);
  }
  // Without shadowing the gain is a deterministic function of distance.
  const double r1 = effective_inner(ring);
  const GaussRule rule = composite_gauss(r1, ring.outer, std::max(1, config.gain_nodes / 16));
  GainDistribution out;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double d = rule.nodes[i];
    const double f = config.radial_law == RadialLaw::kUniformArea ? 2.0 * d : 2.0 * (d - ring.inner);
    out.gain.push_back(db_to_amplitude(large_scale_gain_db(d, 0.0, pl)));
    out.weight.push_back(f * rule.weights[i]);
  }
  const double mass = std::accumulate(out.weight.begin(), out.weight.end(), 0.0);
  for (double& w : out.weight) w /= mass;
  return out;
}

}  // namespace lgra

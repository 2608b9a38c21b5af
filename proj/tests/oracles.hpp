#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "lgra/channel.hpp"
#include "lgra/config.hpp"
#include "lgra/denoiser.hpp"
#include "lgra/fading_pdf.hpp"
#include "lgra/quadrature.hpp"

namespace oracle {

// 1-D factor of the separable posterior integrand for one real coordinate:
// exp(-u^2/g^2 - (c - u)^2/tau^2), integrated with a composite Gauss rule
// over a window that covers both Gaussian factors.
struct Moments {
  double m0 = 0.0;  // integral of the factor
  double m1 = 0.0;  // integral of u times the factor
};

inline Moments axis_moments(double c, double tau, double g, double shift) {
  const double spread = std::min(tau, g) / std::sqrt(2.0);
  const double lo = std::min(0.0, c) - 12.0 * std::max(spread, 1e-300);
  const double hi = std::max(0.0, c) + 12.0 * std::max(spread, 1e-300);
  const int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / (0.25 * spread))), 64, 200000);
  const lgra::GaussRule rule = lgra::composite_gauss(lo, hi, panels);
  Moments m;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double e = std::exp(-u * u / (g * g) - (c - u) * (c - u) / (tau * tau) + shift);
    m.m0 += rule.weights[i] * e;
    m.m1 += rule.weights[i] * u * e;
  }
  return m;
}

// Posterior mean E[X | xhat] for X = 0 w.p. 1 - lambda, X ~ CN(0, g^2) w.p.
// lambda, observed through CN(0, tau^2) noise, by tensor-product quadrature
// of the two-dimensional integrals over the complex plane.
inline std::complex<double> posterior_mean(std::complex<double> xhat, double tau, double g, double lambda) {
  // Exponent offset keeping the real-axis factors near unity.
  const double a = xhat.real(), b = xhat.imag();
  const double sr = std::min(a * a / (g * g + tau * tau), 600.0);
  const double si = std::min(b * b / (g * g + tau * tau), 600.0);
  const Moments re = axis_moments(a, tau, g, sr);
  const Moments im = axis_moments(b, tau, g, si);
  const double pi = std::acos(-1.0);
  // Active density: lambda / (pi g^2 pi tau^2) * integrand; inactive: (1 - lambda) / (pi tau^2) e^{-|xhat|^2/tau^2}.
  const double act = lambda / (pi * g * g * pi * tau * tau);
  const double z_act = act * re.m0 * im.m0;
  const double z_in = (1.0 - lambda) / (pi * tau * tau) * std::exp(-(a * a + b * b) / (tau * tau) + sr + si);
  const double denom = z_act + z_in;
  return {act * re.m1 * im.m0 / denom, act * re.m0 * im.m1 / denom};
}

// Large-scale amplitudes of users uniform over the ring area with
// log-normal shadowing, drawn directly from the propagation model.
inline std::vector<double> sample_ring_gains(const lgra::ScenarioConfig& c, lgra::Ring ring, int n, std::mt19937_64& rng,
                                             bool shifted_disc = false) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> unit;
  const double sigma = std::sqrt(c.shadowing_var);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double u = u01(rng);
    const double d = shifted_disc
                         ? ring.inner + (ring.outer - ring.inner) * std::sqrt(u)
                         : std::sqrt(ring.inner * ring.inner + u * (ring.outer * ring.outer - ring.inner * ring.inner));
    const double db = -(c.pathloss_alpha + c.pathloss_beta * std::log10(std::max(d, 1.0))) + sigma * unit(rng);
    out[i] = std::pow(10.0, db / 20.0);
  }
  return out;
}

// Monte Carlo estimate of E|eta(X + tau W) - X|^2 over independently sampled
// ring gains.
inline double monte_carlo_mse(const lgra::ScenarioConfig& c, lgra::Ring ring, double tau, double lambda, int n,
                              unsigned long long seed) {
  std::mt19937_64 rng(seed);
  const std::vector<double> gains = sample_ring_gains(c, ring, n, rng);
  std::bernoulli_distribution active(lambda);
  std::normal_distribution<double> unit;
  const double s = std::sqrt(0.5);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = gains[i];
    std::complex<double> x(0.0, 0.0);
    if (active(rng)) x = g * std::complex<double>(s * unit(rng), s * unit(rng));
    const std::complex<double> w(s * unit(rng), s * unit(rng));
    const std::complex<double> est = lgra::mmse_denoise(x + tau * w, tau, g, lambda).value;
    acc += std::norm(est - x);
  }
  return acc / n;
}

// L1 distance between the histogram of log-gains and the bin masses of the
// analytic density, over `bins` equal bins in dB on the density's support.
inline double histogram_l1(const lgra::FadingPdf& pdf, const std::vector<double>& gains, int bins) {
  const double lo = pdf.db_lower(), hi = pdf.db_upper();
  const double width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  double outside = 0.0;
  for (double g : gains) {
    const double db = 20.0 * std::log10(g);
    const int b = static_cast<int>(std::floor((db - lo) / width));
    if (b < 0 || b >= bins) {
      outside += 1.0;
    } else {
      counts[b] += 1.0;
    }
  }
  double l1 = outside / gains.size();
  const double ln10 = std::log(10.0);
  for (int b = 0; b < bins; ++b) {
    // Mass of g in the bin: integral over dB of p(g) dg/ddB.
    const double mass = lgra::adaptive_simpson(
        [&](double db) {
          const double g = std::pow(10.0, db / 20.0);
          return pdf.density(g) * g * ln10 / 20.0;
        },
        lo + b * width, lo + (b + 1) * width, 1e-9);
    l1 += std::abs(counts[b] / gains.size() - mass);
  }
  return l1;
}

// Kolmogorov-Smirnov distance of samples from the uniform law on [0, 1].
inline double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
  }
  return d;
}

}  // namespace oracle

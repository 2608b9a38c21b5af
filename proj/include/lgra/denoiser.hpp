#pragma once

#include <cmath>
#include <complex>

namespace lgra {

struct Denoised {
  std::complex<double> value;
  double derivative;  // Wirtinger derivative d eta / d xhat (real for this prior)
};

// Posterior mean of X given xhat = X + tau W under the prior
//   X = 0 with probability 1 - lambda,  X ~ CN(0, g^2) with probability lambda,
// with W ~ CN(0, 1).
inline Denoised mmse_denoise(std::complex<double> xhat, double tau, double g, double lambda) {
  if (g <= 0.0 || lambda <= 0.0) return {{0.0, 0.0}, 0.0};
  const double t2 = tau * tau;
  const double g2 = g * g;
  const double v1 = g2 + t2;
  const double w = g2 / v1;
  const double kappa = g2 / (t2 * v1);
  const double r = std::norm(xhat);
  double post = 1.0;  // posterior activity probability
  if (lambda < 1.0) {
    const double log_ratio = std::log((1.0 - lambda) / lambda) + std::log(v1 / t2) - kappa * r;
    if (log_ratio > 0.0) {
      const double e = std::exp(-log_ratio);
      post = e / (1.0 + e);
    } else {
      post = 1.0 / (1.0 + std::exp(log_ratio));
    }
  }
  const double deriv = w * (post + r * kappa * post * (1.0 - post));
  return {post * w * xhat, deriv};
}

}  // namespace lgra

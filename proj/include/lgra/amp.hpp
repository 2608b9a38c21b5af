#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lgra/denoiser.hpp"
#include "lgra/fading_pdf.hpp"
#include "lgra/kernels.hpp"

namespace lgra {

struct AmpOptions {
  int max_iters = 50;
  double tolerance = 1e-3;  // stop when the relative change of tau falls below this
  bool onsager = true;
  Backend backend = Backend::kAuto;
};

struct AmpResult {
  CVector x_hat;              // denoised estimate eta(statistic)
  CVector statistic;          // effective observation S^H z + x fed to the final denoising step
  double tau = 0.0;           // noise level of `statistic`
  std::vector<double> tau_trace;  // ||z^t|| / sqrt(L) for t = 0, 1, ...
  int iterations = 0;
  bool converged = false;
};

// AMP with the MMSE denoiser on y = sqrt(P L) S x + w. The observation is
// rescaled by 1/sqrt(P L) so the estimate lives on the scale of x = a g h.
// `gain` and `lambda` are the per-column prior parameters.
// Throws DivergenceError on non-finite iterates.
AmpResult amp_detect(const CVector& y, const ComplexMatrix& s, const RVector& gain, const RVector& lambda,
                     double power_per_symbol, const AmpOptions& options = {});

struct DetectionMetrics {
  std::optional<double> pF;
  std::optional<double> pM;
  std::optional<double> pS;
  std::vector<std::uint8_t> decisions;
  double theta = 0.0;
  int n_active = 0;
  int n_inactive = 0;
  int n_missed = 0;
  int n_false_alarm = 0;
};

// Declares index m active when |statistic[m]| >= theta.
DetectionMetrics decide_and_score(const CVector& statistic, const std::vector<std::uint8_t>& truth, double theta);

// Threshold at which the empirical false-alarm and missed-detection rates
// cross, found by bisection. Throws SolverError when one class is empty.
double calibrate_threshold_empirical(const CVector& statistic, const std::vector<std::uint8_t>& truth);

// Threshold equating the predicted false-alarm rate exp(-theta^2/tau^2) and
// the predicted missed-detection rate under the gain distribution.
double calibrate_threshold_predicted(double tau, const GainDistribution& dist);

// Predicted rates of the threshold test on a statistic x + tau W.
double predicted_false_alarm(double theta, double tau);
double predicted_missed_detection(double theta, double tau, const GainDistribution& dist);

}  // namespace lgra

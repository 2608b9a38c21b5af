#include "lgra/amp.hpp"

#include <algorithm>
#include <cmath>

#include "lgra/error.hpp"

namespace lgra {

namespace {

double norm2(const CVector& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

bool all_finite(const CVector& v) {
  for (const auto& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace

AmpResult amp_detect(const CVector& y, const ComplexMatrix& s, const RVector& gain, const RVector& lambda,
                     double power_per_symbol, const AmpOptions& options) {
  const std::size_t L = s.rows();
  const std::size_t M = s.cols();
  if (y.size() != L || gain.size() != M || lambda.size() != M) {
    throw std::invalid_argument("amp_detect: dimension mismatch");
  }
  const double scale = 1.0 / std::sqrt(power_per_symbol * static_cast<double>(L));
  CVector yt(L);
  for (std::size_t i = 0; i < L; ++i) yt[i] = scale * y[i];

  AmpResult res;
  CVector x(M, cdouble(0.0, 0.0));
  CVector z = yt;
  CVector r, x_new, sx;
  RVector deriv;
  const double root_l = std::sqrt(static_cast<double>(L));
  double tau = std::sqrt(norm2(z)) / root_l;
  res.tau_trace.push_back(tau);
  if (!std::isfinite(tau)) throw DivergenceError(0, "amp_detect: non-finite observation");
  if (tau == 0.0) {
    res.x_hat.assign(M, cdouble(0.0, 0.0));
    res.statistic.assign(M, cdouble(0.0, 0.0));
    res.iterations = 1;
    res.converged = true;
    return res;
  }

  for (int t = 0; t < options.max_iters; ++t) {
    kernels::adjoint(s, z, r, options.backend);
    for (std::size_t m = 0; m < M; ++m) r[m] += x[m];
    kernels::denoise(r, tau, gain, lambda, x_new, deriv, options.backend);
    if (!all_finite(x_new)) throw DivergenceError(t, "amp_detect: non-finite estimate at iteration " + std::to_string(t));

    double onsager = 0.0;
    if (options.onsager) {
      for (double d : deriv) onsager += d;
      onsager /= static_cast<double>(L);
    }
    kernels::matvec(s, x_new, sx, options.backend);
    for (std::size_t i = 0; i < L; ++i) z[i] = yt[i] - sx[i] + onsager * z[i];
    const double tau_new = std::sqrt(norm2(z)) / root_l;
    if (!std::isfinite(tau_new)) {
      throw DivergenceError(t, "amp_detect: non-finite residual at iteration " + std::to_string(t));
    }
    res.tau_trace.push_back(tau_new);
    res.iterations = t + 1;
    res.statistic = r;
    res.tau = tau;
    res.x_hat = x_new;
    const bool stalled = std::abs(tau_new - tau) < options.tolerance * tau;
    x.swap(x_new);
    tau = tau_new;
    if (stalled) {
      res.converged = true;
      break;
    }
  }
  return res;
}

DetectionMetrics decide_and_score(const CVector& statistic, const std::vector<std::uint8_t>& truth, double theta) {
  if (statistic.size() != truth.size()) throw std::invalid_argument("decide_and_score: size mismatch");
  DetectionMetrics m;
  m.theta = theta;
  m.decisions.resize(statistic.size());
  for (std::size_t i = 0; i < statistic.size(); ++i) {
    const bool declared = std::abs(statistic[i]) >= theta;
    m.decisions[i] = declared ? 1 : 0;
    if (truth[i]) {
      ++m.n_active;
      if (!declared) ++m.n_missed;
    } else {
      ++m.n_inactive;
      if (declared) ++m.n_false_alarm;
    }
  }
  if (m.n_inactive > 0) m.pF = static_cast<double>(m.n_false_alarm) / m.n_inactive;
  if (m.n_active > 0) {
    m.pM = static_cast<double>(m.n_missed) / m.n_active;
    m.pS = 1.0 - *m.pM;
  }
  return m;
}

double calibrate_threshold_empirical(const CVector& statistic, const std::vector<std::uint8_t>& truth) {
  std::vector<double> act, inact;
  for (std::size_t i = 0; i < statistic.size(); ++i) (truth[i] ? act : inact).push_back(std::abs(statistic[i]));
  if (act.empty() || inact.empty()) throw SolverError("calibrate_threshold: both classes must be present");
  std::sort(act.begin(), act.end());
  std::sort(inact.begin(), inact.end());
  std::vector<double> cand(act);
  cand.insert(cand.end(), inact.begin(), inact.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  cand.push_back(std::nextafter(cand.back(), INFINITY));

  // f(theta) = pF - pM is non-increasing in theta; bisect on the candidate index.
  auto diff = [&](std::size_t i) {
    const double th = cand[i];
    const double pf = static_cast<double>(inact.end() - std::lower_bound(inact.begin(), inact.end(), th)) /
                      static_cast<double>(inact.size());
    const double pm = static_cast<double>(std::lower_bound(act.begin(), act.end(), th) - act.begin()) /
                      static_cast<double>(act.size());
    return pf - pm;
  };
  std::size_t lo = 0, hi = cand.size() - 1;  // diff(lo) > 0 >= diff(hi) unless already crossed at lo
  if (diff(lo) <= 0) return cand[lo];
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (diff(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(diff(lo)) < std::abs(diff(hi)) ? cand[lo] : cand[hi];
}

double predicted_false_alarm(double theta, double tau) { return std::exp(-theta * theta / (tau * tau)); }

double predicted_missed_detection(double theta, double tau, const GainDistribution& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    s += dist.weight[i] * -std::expm1(-theta * theta / (tau * tau + dist.gain[i] * dist.gain[i]));
  }
  return s;
}

double calibrate_threshold_predicted(double tau, const GainDistribution& dist) {
  if (!(tau > 0)) throw SolverError("calibrate_threshold: tau must be positive");
  auto f = [&](double log_theta) {
    const double th = std::exp(log_theta);
    return predicted_false_alarm(th, tau) - predicted_missed_detection(th, tau, dist);
  };
  double lo = std::log(tau * 1e-6);
  double hi = std::log(tau * 12.0);
  if (!(f(lo) > 0 && f(hi) < 0)) throw SolverError("calibrate_threshold: no crossing of predicted rates");
  for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace lgra

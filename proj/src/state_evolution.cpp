#include "lgra/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lgra/amp.hpp"
#include "lgra/error.hpp"
#include "lgra/quadrature.hpp"

namespace lgra {

namespace {

constexpr double kTail = 50.0;  // exp(-50) ~ 2e-22

// MMSE divided by tau^2 as a function of s = 1 + g^2/tau^2. In units of u =
// |xhat|^2 / tau^2 the posterior variance is pi w + pi (1 - pi) w^2 u with
// pi(u) = 1 / (1 + C exp(-w u)), and u follows the mixture
// lambda Exp(mean s) + (1 - lambda) Exp(mean 1).
double mmse_ratio(double s, double lambda) {
  if (!(s > 1.0) || lambda <= 0.0) return 0.0;
  const double w = 1.0 - 1.0 / s;
  if (lambda >= 1.0) return w;
  const double log_c = std::log((1.0 - lambda) / lambda) + std::log(s);
  auto h = [&](double u) {
    const double a = w * u - log_c;
    const double pi = a >= 0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
    return pi * w + pi * (1.0 - pi) * w * w * u;
  };
  const double center = log_c / w;  // sigmoid midpoint in u
  const double tol = 1e-11 * std::max(w, 1e-300);

  auto integrate = [&](auto&& f, double mid) {
    if (mid > 0 && mid < kTail) return adaptive_simpson(f, 0.0, mid, tol) + adaptive_simpson(f, mid, kTail, tol);
    return adaptive_simpson(f, 0.0, kTail, tol);
  };
  const double active = integrate([&](double v) { return h(s * v) * std::exp(-v); }, center / s);
  const double idle = integrate([&](double u) { return h(u) * std::exp(-u); }, center);
  return lambda * active + (1.0 - lambda) * idle;
}

}  // namespace

double mmse_scalar(double tau, double g, double lambda) {
  if (!(tau > 0)) return 0.0;
  const double t2 = tau * tau;
  return t2 * mmse_ratio(1.0 + g * g / t2, lambda);
}

MseTable::MseTable(double lambda) : lambda_(lambda), x0_(-30.0), step_(0.05) {
  const int n = static_cast<int>((45.0 - x0_) / step_) + 1;
  values_.resize(n);
  for (int i = 0; i < n; ++i) values_[i] = mmse_ratio(1.0 + std::exp(x0_ + i * step_), lambda);
}

double MseTable::ratio(double s) const {
  if (!(s > 1.0)) return 0.0;
  const double x = std::log(s - 1.0);
  const double pos = (x - x0_) / step_;
  const int n = static_cast<int>(values_.size());
  if (pos <= 0.0) return values_.front() * std::exp(x - x0_);  // F ~ lambda (s - 1) for weak gains
  if (pos >= n - 1) return values_.back();
  int i = static_cast<int>(pos);
  const double t = pos - i;
  // Catmull-Rom interpolation on the uniform grid.
  const double p0 = values_[std::max(i - 1, 0)];
  const double p1 = values_[i];
  const double p2 = values_[i + 1];
  const double p3 = values_[std::min(i + 2, n - 1)];
  return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

double MseTable::mmse(double tau, double g) const {
  const double t2 = tau * tau;
  return t2 * ratio(1.0 + g * g / t2);
}

double MseTable::mse(double tau, const GainDistribution& dist) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) s += dist.weight[i] * mmse(tau, dist.gain[i]);
  return s;
}

double mse(double tau, double lambda, const GainDistribution& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) s += dist.weight[i] * mmse_scalar(tau, dist.gain[i], lambda);
  return s;
}

SeTrace se_recursion(int L, int M, double power, double noise, double lambda, const GainDistribution& dist,
                     int t_max, double tolerance) {
  return se_recursion(L, M, power, noise, MseTable(lambda), dist, t_max, tolerance);
}

SeTrace se_recursion(int L, int M, double power, double noise, const MseTable& table, const GainDistribution& dist,
                     int t_max, double tolerance) {
  if (L < 1 || M < 1) throw std::invalid_argument("se_recursion: L and M must be positive");
  SeTrace trace;
  const double floor = noise / (power * L);
  const double ratio = static_cast<double>(M) / L;
  double tau = std::sqrt(floor + ratio * table.lambda() * dist.mean_power());
  trace.tau.push_back(tau);
  for (int t = 0; t < t_max; ++t) {
    const double next = std::sqrt(floor + ratio * table.mse(tau, dist));
    trace.tau.push_back(next);
    if (std::abs(next - tau) <= tolerance * tau) {
      trace.converged = true;
      break;
    }
    tau = next;
  }
  return trace;
}

Targets solve_targets(double pF, double pM, const GainDistribution& dist) {
  if (!(pF > 0 && pF < 1 && pM > 0 && pM < 1)) throw std::invalid_argument("solve_targets: targets must lie in (0, 1)");
  if (dist.size() == 0) throw std::invalid_argument("solve_targets: empty gain distribution");
  const double c = -std::log(pF);
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (double g : dist.gain) {
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  auto missed = [&](double log_tau) {
    const double tau = std::exp(log_tau);
    return predicted_missed_detection(tau * std::sqrt(c), tau, dist) - pM;
  };
  double lo = std::log(gmin) - 20.0;
  double hi = std::log(gmax) + 20.0;
  const double flo = missed(lo), fhi = missed(hi);
  if (!(flo < 0 && fhi > 0)) {
    std::ostringstream msg;
    msg << "solve_targets: no sign change on tau in [" << std::exp(lo) << ", " << std::exp(hi)
        << "], residuals " << flo << ", " << fhi;
    throw SolverError(msg.str());
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (missed(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Targets t;
  t.tau = std::exp(0.5 * (lo + hi));
  t.theta = t.tau * std::sqrt(c);
  return t;
}

double length_for_tau(const ClusterModel& model, double lambda, double tau) {
  return (model.noise / model.power + model.groups * mse(tau, lambda, model.dist)) / (tau * tau);
}

double length_for_tau(const ClusterModel& model, const MseTable& table, double tau) {
  return (model.noise / model.power + model.groups * table.mse(tau, model.dist)) / (tau * tau);
}

SeSolution mpl_bound(const ClusterModel& model, double lambda, double pF, double pM, bool with_dynamic,
                     const Targets* targets) {
  const Targets t = targets ? *targets : solve_targets(pF, pM, model.dist);
  SeSolution s;
  s.theta_obj = t.theta;
  s.tau_obj = t.tau;
  s.pF_target = pF;
  s.pM_target = pM;
  s.lambda = lambda;
  s.groups = model.groups;
  s.mse_at_tau_obj = mse(t.tau, lambda, model.dist);
  s.relaxed = (model.noise / model.power + model.groups * s.mse_at_tau_obj) / (t.tau * t.tau);
  s.L_bound = std::max(1, static_cast<int>(std::ceil(s.relaxed - 1e-9)));
  s.dynamic = s.relaxed;
  if (with_dynamic) {
    // Beyond tau_0 at the relaxed length the rule is satisfied automatically.
    const double tau_hi = std::sqrt(model.noise / (model.power * s.L_bound) +
                                    static_cast<double>(model.groups) / s.L_bound * lambda * model.dist.mean_power());
    if (tau_hi > t.tau) {
      const MseTable table(lambda);
      const int grid = 48;
      const double a = std::log(t.tau), b = std::log(tau_hi);
      int best = 0;
      for (int i = 0; i <= grid; ++i) {
        const double v = length_for_tau(model, table, std::exp(a + (b - a) * i / grid));
        if (v > s.dynamic) {
          s.dynamic = v;
          best = i;
        }
      }
      // Golden-section refinement around the best grid point.
      double lo = a + (b - a) * std::max(0, best - 1) / grid;
      double hi = a + (b - a) * std::min(grid, best + 1) / grid;
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int i = 0; i < 40; ++i) {
        const double x1 = hi - phi * (hi - lo);
        const double x2 = lo + phi * (hi - lo);
        const double f1 = length_for_tau(model, table, std::exp(x1));
        const double f2 = length_for_tau(model, table, std::exp(x2));
        s.dynamic = std::max({s.dynamic, f1, f2});
        if (f1 > f2) {
          hi = x2;
        } else {
          lo = x1;
        }
      }
    }
  }
  s.L_dynamic = std::max(1, static_cast<int>(std::ceil(s.dynamic - 1e-9)));
  return s;
}

double mnac_baseline(double n, double n_active, double snr) {
  if (!(n_active > 0 && n_active < n && snr > 0)) throw std::invalid_argument("mnac_baseline: degenerate inputs");
  const double p = n_active / n;
  const double h2 = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  return n * h2 / (0.5 * std::log2(1.0 + n_active * snr));
}

PredictedPs predicted_ps(double tau, double theta, double lambda, const GainDistribution& dist) {
  PredictedPs p;
  p.from_missed = 1.0 - predicted_missed_detection(theta, tau, dist);
  p.from_ratio = 1.0 - (1.0 - lambda) / lambda * predicted_false_alarm(theta, tau);
  return p;
}

}  // namespace lgra

#pragma once

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "lgra/config.hpp"
#include "lgra/fading_pdf.hpp"

namespace lgra {

// Bayes MMSE of the scalar channel xhat = X + tau W for one gain g.
double mmse_scalar(double tau, double g, double lambda);

// Bayes MMSE averaged over the gain distribution.
double mse(double tau, double lambda, const GainDistribution& dist);

// MMSE evaluator for a fixed lambda. The normalized MMSE depends on tau and g
// only through s = 1 + g^2/tau^2; it is tabulated once over log(s - 1) and
// interpolated, which makes repeated evaluations (recursions, scans) cheap.
class MseTable {
 public:
  explicit MseTable(double lambda);
  double ratio(double s) const;  // mmse / tau^2
  double mmse(double tau, double g) const;
  double mse(double tau, const GainDistribution& dist) const;
  double lambda() const { return lambda_; }

 private:
  double lambda_;
  double x0_, step_;
  std::vector<double> values_;
};

struct SeTrace {
  std::vector<double> tau;  // tau_0, tau_1, ...
  bool converged = false;
};

// tau_{t+1}^2 = noise/(P L) + (M/L) mse(tau_t), from
// tau_0^2 = noise/(P L) + (M/L) lambda E[g^2].
SeTrace se_recursion(int L, int M, double power, double noise, double lambda, const GainDistribution& dist,
                     int t_max, double tolerance = 1e-6);
SeTrace se_recursion(int L, int M, double power, double noise, const MseTable& table, const GainDistribution& dist,
                     int t_max, double tolerance = 1e-6);

struct Targets {
  double theta = 0.0;
  double tau = 0.0;
};

// Solves pF = exp(-theta^2/tau^2) and pM = E[1 - exp(-theta^2/(tau^2 + g^2))]
// for (theta, tau). Throws SolverError when the bracket has no sign change.
Targets solve_targets(double pF, double pM, const GainDistribution& dist);

// Parameters of one cluster's detection problem.
struct ClusterModel {
  int groups = 1;          // M
  double power = 0.0;      // P_k, W per symbol
  double noise = 0.0;      // sigma^2, W
  GainDistribution dist;
};

struct SeSolution {
  double theta_obj = 0.0;
  double tau_obj = 0.0;
  double mse_at_tau_obj = 0.0;
  double relaxed = 0.0;  // (noise/P + M mse(tau_obj)) / tau_obj^2 before rounding
  int L_bound = 1;       // ceil(relaxed)
  double dynamic = 0.0;  // sup over tau >= tau_obj of (noise/P + M mse(tau)) / tau^2
  int L_dynamic = 1;
  double pF_target = 0.0;
  double pM_target = 0.0;
  double lambda = 0.0;
  int groups = 0;
};

// Minimum-preamble-length bounds. The dynamic form is evaluated only when
// `with_dynamic` is set, since it needs a scan over tau.
SeSolution mpl_bound(const ClusterModel& model, double lambda, double pF, double pM, bool with_dynamic = false,
                     const Targets* targets = nullptr);

// Preamble length implied by the rule L >= (noise/P + M mse(tau)) / tau^2 at a
// given tau.
double length_for_tau(const ClusterModel& model, double lambda, double tau);
double length_for_tau(const ClusterModel& model, const MseTable& table, double tau);

// Many-access channel identification cost N H2(N_ac/N) / (0.5 log2(1 + N_ac gamma)),
// with both logarithms base 2.
double mnac_baseline(double n, double n_active, double snr);

struct PredictedPs {
  double from_missed = 0.0;  // 1 - pM
  double from_ratio = 0.0;   // 1 - ((1 - lambda)/lambda) exp(-theta^2/tau^2)
};
PredictedPs predicted_ps(double tau, double theta, double lambda, const GainDistribution& dist);

// Thread-safe memo of bound solutions keyed by (cluster, groups, load count).
class BoundCache {
 public:
  using Key = std::tuple<int, int, int>;
  template <typename F>
  SeSolution get(const Key& key, F&& compute) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    SeSolution s = compute();
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, s).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<Key, SeSolution> cache_;
};

}  // namespace lgra

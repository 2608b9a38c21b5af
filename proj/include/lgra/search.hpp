#pragma once

#include <cstdint>
#include <vector>

#include "lgra/config.hpp"
#include "lgra/sim.hpp"
#include "lgra/state_evolution.hpp"

namespace lgra {

// One cluster ring detected in isolation: M groups whose heads are drawn
// uniformly over the ring area with fresh shadowing in every trial.
struct RingProblem {
  ScenarioConfig config;  // propagation, power, detector and prior settings
  Ring ring;
  int groups = 1000;
  double lambda = 0.05;
};

struct ProbeResult {
  int length = 0;
  long long active = 0, missed = 0, inactive = 0, false_alarm = 0;
  int failed = 0;
  double pF() const { return inactive > 0 ? static_cast<double>(false_alarm) / inactive : 0.0; }
  double pM() const { return active > 0 ? static_cast<double>(missed) / active : 0.0; }
};

// Pooled detection counts of `trials` single-ring trials at one preamble
// length. Trial t uses the same heads, activity, fading and noise at every
// length (common random numbers); only the preamble matrix changes with L.
ProbeResult probe_length(const RingProblem& problem, int length, int trials, std::uint64_t seed, int parallelism);

// Per-trial tau traces of the AMP detector at one length, for comparison with
// state evolution.
std::vector<std::vector<double>> amp_tau_traces(const RingProblem& problem, int length, int trials,
                                                std::uint64_t seed, int parallelism);

struct MplSearchOptions {
  int trials = 200;
  double success_level = 0.06;  // both pooled pF and pM must not exceed this
  int parallelism = 1;
  std::uint64_t seed = 1;
  int max_length = 0;  // 0: 8 times the bound
};

struct MplSearchResult {
  int simulated = 0;  // smallest successful length; 0 when max_length failed
  SeSolution bound;
  std::vector<ProbeResult> probes;  // in probe order
};

// Smallest L at which the pooled empirical rates meet the success level,
// by bracketing from the relaxed bound and integer bisection.
MplSearchResult simulated_mpl(const RingProblem& problem, const MplSearchOptions& options);

struct CapacityQuery {
  int length = 400;
  double lambda = 0.05;
  bool grouped = true;
  int n_clusters = 4;  // grouped mode only
  int group_size = 5;  // grouped mode only
};

struct CapacityResult {
  long long n_users = 0;
  int groups_per_cluster = 0;
  int n_clusters = 1;
  int group_size = 1;
  std::vector<SeSolution> bounds;  // per cluster at the reported M
};

// Largest N = K * group_size * M for which every cluster's relaxed bound fits
// within the fixed length, by binary search over M. The no-grouping mode is
// K = 1 over the whole cell with group size 1.
CapacityResult capacity_search(const ScenarioConfig& base, const CapacityQuery& query);

}  // namespace lgra

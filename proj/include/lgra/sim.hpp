#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgra/amp.hpp"
#include "lgra/cell.hpp"
#include "lgra/config.hpp"
#include "lgra/dps.hpp"
#include "lgra/fading_pdf.hpp"
#include "lgra/state_evolution.hpp"

namespace lgra {

struct ClusterOutcome {
  int cluster = 0;
  int groups = 0;
  int length = 0;
  int slot_start = 0;
  int est_load = 0;
  int true_load = 0;
  bool zero_load = false;
  double bound = 0.0;
  double tau = 0.0;
  double theta = 0.0;
  int iterations = 0;
  bool converged = false;
  int n_missed = 0;
  int n_false_alarm = 0;
  std::vector<double> tau_trace;
};

// Six-component energy per active user (J), plus the bound-based counterpart.
struct EnergyBreakdown {
  double pmb1 = 0.0, wait1 = 0.0, pcs1 = 0.0;
  double pmb2 = 0.0, wait2 = 0.0, pcs2 = 0.0;
  double total = 0.0;
  double theoretical = 0.0;
  double per_group_total = 0.0;        // same energy normalized per active group
  double per_group_theoretical = 0.0;
};

// Six-component access delay averaged over active heads (symbols).
struct DelayBreakdown {
  double t1 = 0.0, wait1 = 0.0, pcs1 = 0.0;
  double t2 = 0.0, wait2 = 0.0, pcs2 = 0.0;
  double total = 0.0;
};

struct TrialResult {
  std::uint64_t trial_id = 0;
  bool failed = false;
  std::string failure;
  int n_active = 0;
  int n_inactive = 0;
  int n_missed = 0;
  int n_false_alarm = 0;
  std::optional<double> pF, pM, pS;
  double mean_L = 0.0;
  int airtime = 0;
  EnergyBreakdown energy;
  DelayBreakdown delay;
  std::vector<ClusterOutcome> clusters;
};

// Fixed parameters of one cluster's phase-II detector.
struct DetectorSetup {
  double power = 0.0;  // W per symbol
  double noise = 0.0;  // W
  ThresholdMode mode = ThresholdMode::kSeBalanced;
  double theta_objective = 0.0;
  GainDistribution head_dist;  // prior gain distribution used by the balanced threshold
  AmpOptions amp;
};

struct Phase2Outcome {
  AmpResult amp;
  DetectionMetrics metrics;
};

// Phase-II reception and detection of one cluster: y = sqrt(P L) S x + w with
// S drawn from `preamble_seed` and w from `noise_seed`, then AMP, threshold
// and scoring against `truth`. Throws DivergenceError from AMP.
Phase2Outcome detect_phase2(int length, const CVector& x, const std::vector<std::uint8_t>& truth,
                            const RVector& prior_gain, const RVector& prior_lambda, const DetectorSetup& setup,
                            std::uint64_t preamble_seed, std::uint64_t noise_seed);

// Energy per active user of the group-paging comparator, from its configured
// preamble, attempt and wait parameters.
double group_paging_energy(const ScenarioConfig& config);

// Monte Carlo engine over one static cell. Thread-safe: run_rao may be called
// concurrently.
class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& config);
  Simulator(const ScenarioConfig& config, CellState cell);

  TrialResult run_rao(std::uint64_t trial_id) const;

  const ScenarioConfig& config() const { return config_; }
  const CellState& cell() const { return cell_; }
  const GainDistribution& ring_distribution(int cluster) const { return ring_dist_[cluster]; }
  const GainDistribution& head_distribution(int cluster) const { return head_dist_[cluster]; }
  const Targets& targets(int cluster) const { return targets_[cluster]; }
  ClusterModel cluster_model(int cluster) const;
  SeSolution bound(int cluster, int load) const;

  // Upper estimate of the memory one trial needs, in bytes.
  double trial_bytes() const;

 private:
  void prepare();

  ScenarioConfig config_;
  CellState cell_;
  std::vector<std::vector<double>> walsh_;
  std::vector<GainDistribution> ring_dist_;
  std::vector<GainDistribution> head_dist_;
  std::vector<Targets> targets_;
  mutable BoundCache cache_;
};

struct Stat {
  double mean = 0.0;
  double stderr_ = 0.0;
  int n = 0;
  double ci_low() const { return mean - 1.96 * stderr_; }
  double ci_high() const { return mean + 1.96 * stderr_; }
};

struct BatchReport {
  int n_trials = 0;
  int n_failed = 0;
  Stat pF, pM, pS, mean_L;
  Stat pmb1, wait1, pcs1, pmb2, wait2, pcs2, energy_total, energy_theoretical, energy_per_group;
  Stat t1, twait1, tpcs1, t2, twait2, tpcs2, delay_total;
  long long active = 0, missed = 0, inactive = 0, false_alarm = 0;  // pooled counts
  std::vector<TrialResult> trials;
};

// Runs trials first_trial .. first_trial + n_trials - 1 with up to
// `parallelism` threads. Aggregates depend only on the trial ids. Throws
// std::runtime_error when more than half of the trials fail.
BatchReport run_batch(const Simulator& sim, int n_trials, int parallelism, std::uint64_t first_trial = 0);

// Mean and standard error of the defined values, summed in order.
Stat summarize(const std::vector<double>& values);

std::string trial_csv_header();
std::string trial_csv_row(const TrialResult& trial, const Simulator& sim);

}  // namespace lgra

#include "lgra/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lgra/channel.hpp"
#include "lgra/error.hpp"
#include "lgra/fading_pdf.hpp"
#include "lgra/random.hpp"

namespace lgra {

namespace {

constexpr double kMinDistance = 1.0;

struct RingTrial {
  CVector x;
  std::vector<std::uint8_t> truth;
  RVector prior_gain;
  RVector prior_lambda;
  GainDistribution head_dist;
};

RingTrial draw_ring_trial(const RingProblem& p, std::uint64_t trial_seed) {
  const ScenarioConfig& c = p.config;
  const PathLoss pl{c.pathloss_alpha, c.pathloss_beta};
  const double sigma = c.shadow_std_db();
  Rng grng = make_rng(derive_seed(trial_seed, {tag(Stream::kGainDraw)}));
  Rng arng = make_rng(derive_seed(trial_seed, {tag(Stream::kActivity)}));
  Rng hrng = make_rng(derive_seed(trial_seed, {tag(Stream::kSmallScale)}));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> unit;
  std::bernoulli_distribution active(p.lambda);
  const double lam = std::clamp(p.lambda, 1.0 / p.groups, 0.99);
  const double r1 = p.ring.inner * p.ring.inner, r2 = p.ring.outer * p.ring.outer;

  RingTrial t;
  t.x.assign(p.groups, cdouble(0.0, 0.0));
  t.truth.assign(p.groups, 0);
  t.prior_gain.resize(p.groups);
  t.prior_lambda.assign(p.groups, lam);
  std::vector<double> gains(p.groups);
  for (int m = 0; m < p.groups; ++m) {
    const double d = std::max(std::sqrt(r1 + u01(grng) * (r2 - r1)), kMinDistance);
    const double s = sigma > 0 ? sigma * unit(grng) : 0.0;
    double g = 1.0, mean = 1.0;
    if (!c.unit_gain) {
      g = db_to_amplitude(large_scale_gain_db(d, s, pl));
      mean = db_to_amplitude(large_scale_gain_db(d, 0.0, pl));
    }
    const cdouble h = c.small_scale_fading ? complex_normal(hrng, unit, 1.0) : cdouble(1.0, 0.0);
    gains[m] = c.prior_gain == PriorGain::kRealized ? g : mean;
    t.prior_gain[m] = gains[m];
    if (active(arng)) {
      t.truth[m] = 1;
      t.x[m] = g * h;
    }
  }
  t.head_dist = GainDistribution::empirical(gains);
  return t;
}

DetectorSetup ring_setup(const RingProblem& p, const Targets& targets) {
  DetectorSetup s;
  s.power = p.config.tx_power_w();
  s.noise = p.config.noise_power_w();
  s.mode = p.config.threshold_mode;
  s.theta_objective = targets.theta;
  s.amp.max_iters = p.config.amp_max_iters;
  s.amp.tolerance = p.config.amp_tolerance;
  return s;
}

Targets ring_targets(const RingProblem& p) {
  return solve_targets(p.config.target_pF, p.config.target_pM, ring_gain_distribution(p.config, p.ring));
}

template <typename F>
void for_each_trial(int trials, int parallelism, F&& body) {
#pragma omp parallel for num_threads(std::max(1, parallelism)) schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) body(t);
}

}  // namespace

ProbeResult probe_length(const RingProblem& problem, int length, int trials, std::uint64_t seed, int parallelism) {
  if (length < 1 || trials < 1) throw std::invalid_argument("probe_length: length and trials must be positive");
  const Targets targets = ring_targets(problem);
  std::vector<DetectionMetrics> metrics(trials);
  std::vector<char> failed(trials, 0);
  for_each_trial(trials, parallelism, [&](int t) {
    const std::uint64_t ts = derive_seed(seed, {tag(Stream::kTrial), static_cast<std::uint64_t>(t)});
    RingTrial rt = draw_ring_trial(problem, ts);
    DetectorSetup setup = ring_setup(problem, targets);
    setup.head_dist = std::move(rt.head_dist);
    try {
      metrics[t] = detect_phase2(length, rt.x, rt.truth, rt.prior_gain, rt.prior_lambda, setup,
                                 derive_seed(ts, {tag(Stream::kPreamble), static_cast<std::uint64_t>(length)}),
                                 derive_seed(ts, {tag(Stream::kPhase2Noise)}))
                       .metrics;
    } catch (const DivergenceError&) {
      failed[t] = 1;
    }
  });
  ProbeResult r;
  r.length = length;
  for (int t = 0; t < trials; ++t) {
    if (failed[t]) {
      ++r.failed;
      continue;
    }
    r.active += metrics[t].n_active;
    r.missed += metrics[t].n_missed;
    r.inactive += metrics[t].n_inactive;
    r.false_alarm += metrics[t].n_false_alarm;
  }
  return r;
}

std::vector<std::vector<double>> amp_tau_traces(const RingProblem& problem, int length, int trials,
                                                std::uint64_t seed, int parallelism) {
  const Targets targets = ring_targets(problem);
  std::vector<std::vector<double>> traces(trials);
  for_each_trial(trials, parallelism, [&](int t) {
    const std::uint64_t ts = derive_seed(seed, {tag(Stream::kTrial), static_cast<std::uint64_t>(t)});
    RingTrial rt = draw_ring_trial(problem, ts);
    DetectorSetup setup = ring_setup(problem, targets);
    setup.head_dist = std::move(rt.head_dist);
    setup.amp.tolerance = 0.0;  // run the full iteration budget
    traces[t] = detect_phase2(length, rt.x, rt.truth, rt.prior_gain, rt.prior_lambda, setup,
                              derive_seed(ts, {tag(Stream::kPreamble), static_cast<std::uint64_t>(length)}),
                              derive_seed(ts, {tag(Stream::kPhase2Noise)}))
                    .amp.tau_trace;
  });
  return traces;
}

MplSearchResult simulated_mpl(const RingProblem& problem, const MplSearchOptions& options) {
  MplSearchResult res;
  const ScenarioConfig& c = problem.config;
  ClusterModel model{problem.groups, c.tx_power_w(), c.noise_power_w(), ring_gain_distribution(c, problem.ring)};
  res.bound = mpl_bound(model, problem.lambda, c.target_pF, c.target_pM);
  const int cap = options.max_length > 0 ? options.max_length : 8 * res.bound.L_bound;

  auto success = [&](int L) {
    const ProbeResult p = probe_length(problem, L, options.trials, options.seed, options.parallelism);
    res.probes.push_back(p);
    return 2 * p.failed <= options.trials && p.pF() <= options.success_level && p.pM() <= options.success_level;
  };

  int lo = 0, hi = 0;  // lo fails (0 = untested floor), hi succeeds
  int L = std::min(res.bound.L_bound, cap);
  if (success(L)) {
    hi = L;
    for (;;) {
      const int next = std::max(1, static_cast<int>(std::floor(hi * 0.85)));
      if (next >= hi) break;
      if (success(next)) {
        hi = next;
      } else {
        lo = next;
        break;
      }
    }
  } else {
    lo = L;
    for (;;) {
      if (lo >= cap) return res;
      const int next = std::min(cap, std::max(lo + 1, static_cast<int>(std::ceil(lo * 1.15))));
      if (success(next)) {
        hi = next;
        break;
      }
      lo = next;
    }
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (success(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  res.simulated = hi;
  return res;
}

CapacityResult capacity_search(const ScenarioConfig& base, const CapacityQuery& query) {
  if (query.length < 1) throw std::invalid_argument("capacity_search: length must be positive");
  ScenarioConfig c = base;
  CapacityResult res;
  std::vector<Ring> rings;
  if (query.grouped) {
    res.n_clusters = query.n_clusters;
    res.group_size = query.group_size;
    rings = (static_cast<int>(c.cluster_rings.size()) == query.n_clusters)
                ? c.cluster_rings
                : default_rings(query.n_clusters, c.cell_radius_m);
  } else {
    res.n_clusters = 1;
    res.group_size = 1;
    rings = {Ring{0.0, c.cell_radius_m}};
  }

  const double power = c.tx_power_w(), noise = c.noise_power_w();
  std::vector<ClusterModel> models;
  std::vector<SeSolution> unit;
  for (const Ring& r : rings) {
    models.push_back(ClusterModel{1, power, noise, ring_gain_distribution(c, r)});
    unit.push_back(mpl_bound(models.back(), query.lambda, c.target_pF, c.target_pM));
  }
  // The relaxed bound is affine in M, so each probe reuses mse(tau_obj).
  auto fits = [&](long long m) {
    for (const SeSolution& s : unit) {
      const double relaxed = (noise / power + m * s.mse_at_tau_obj) / (s.tau_obj * s.tau_obj);
      if (std::max(1, static_cast<int>(std::ceil(relaxed - 1e-9))) > query.length) return false;
    }
    return true;
  };
  if (!fits(1)) return res;
  long long lo = 1, hi = 2;
  const long long limit = std::numeric_limits<int>::max() / 2;
  while (hi < limit && fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= limit && fits(hi)) lo = hi;
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.groups_per_cluster = static_cast<int>(lo);
  res.n_users = lo * res.n_clusters * res.group_size;
  for (ClusterModel& m : models) {
    m.groups = res.groups_per_cluster;
    res.bounds.push_back(mpl_bound(m, query.lambda, c.target_pF, c.target_pM));
  }
  return res;
}

}  // namespace lgra

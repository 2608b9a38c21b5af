#include "lgra/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgra/channel.hpp"
#include "lgra/csv.hpp"
#include "lgra/error.hpp"
#include "lgra/preamble.hpp"
#include "lgra/random.hpp"

namespace lgra {

namespace {

// Neumaier-compensated sum in the given order.
double ordered_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double prior_lambda(double value, int groups) {
  const double floor = 1.0 / std::max(groups, 1);
  return std::clamp(value, floor, 0.99);
}

}  // namespace

Phase2Outcome detect_phase2(int length, const CVector& x, const std::vector<std::uint8_t>& truth,
                            const RVector& prior_gain, const RVector& prior_lambda, const DetectorSetup& setup,
                            std::uint64_t preamble_seed, std::uint64_t noise_seed) {
  const ComplexMatrix s = group_preamble_matrix(length, static_cast<int>(x.size()), preamble_seed);
  CVector y;
  kernels::matvec(s, x, y, setup.amp.backend);
  const double amp = std::sqrt(setup.power * length);
  Rng rng = make_rng(noise_seed);
  std::normal_distribution<double> unit;
  for (auto& v : y) v = amp * v + complex_normal(rng, unit, setup.noise);

  Phase2Outcome out;
  out.amp = amp_detect(y, s, prior_gain, prior_lambda, setup.power, setup.amp);
  const int active = static_cast<int>(std::count(truth.begin(), truth.end(), 1));
  double theta = 0.0;
  switch (setup.mode) {
    case ThresholdMode::kObjective:
      theta = setup.theta_objective;
      break;
    case ThresholdMode::kOracleBalanced:
      if (active > 0 && active < static_cast<int>(truth.size())) {
        theta = calibrate_threshold_empirical(out.amp.statistic, truth);
        break;
      }
      [[fallthrough]];
    case ThresholdMode::kSeBalanced:
      theta = calibrate_threshold_predicted(out.amp.tau, setup.head_dist);
      break;
  }
  out.metrics = decide_and_score(out.amp.statistic, truth, theta);
  return out;
}

double group_paging_energy(const ScenarioConfig& config) {
  const double ts = config.symbol_duration_s();
  return config.tx_power_w() * config.gp_preamble_symbols * config.gp_attempts * ts +
         config.wait_power_mw * 1e-3 * config.gp_wait_symbols * ts +
         2.0 * config.pcs_power_mw * 1e-3 * config.pcs_symbols * ts;
}

Simulator::Simulator(const ScenarioConfig& config) : config_(config), cell_(build_cell(config, config.rng_seed)) {
  prepare();
}

Simulator::Simulator(const ScenarioConfig& config, CellState cell) : config_(config), cell_(std::move(cell)) {
  config_.validate();
  prepare();
}

void Simulator::prepare() {
  const int K = static_cast<int>(cell_.clusters.size());
  walsh_ = walsh_preambles(K, config_.cluster_preamble_len);
  ring_dist_.clear();
  head_dist_.clear();
  targets_.clear();
  for (int k = 0; k < K; ++k) {
    ring_dist_.push_back(ring_gain_distribution(config_, cell_.clusters[k].ring));
    std::vector<double> heads;
    for (int gi : cell_.clusters[k].groups) {
      const int h = cell_.groups[gi].head;
      heads.push_back(config_.prior_gain == PriorGain::kRealized ? cell_.gain[h] : cell_.mean_gain[h]);
    }
    head_dist_.push_back(GainDistribution::empirical(heads));
    targets_.push_back(solve_targets(config_.target_pF, config_.target_pM, ring_dist_.back()));
  }
}

ClusterModel Simulator::cluster_model(int cluster) const {
  ClusterModel m;
  m.groups = cell_.group_count(cluster);
  m.power = config_.tx_power_w();
  m.noise = config_.noise_power_w();
  m.dist = ring_dist_[cluster];
  return m;
}

SeSolution Simulator::bound(int cluster, int load) const {
  const int groups = cell_.group_count(cluster);
  return cache_.get({cluster, groups, load}, [&] {
    const double lambda = static_cast<double>(load) / groups;
    return mpl_bound(cluster_model(cluster), lambda, config_.target_pF, config_.target_pM,
                     config_.dps_bound == BoundForm::kDynamic, &targets_[cluster]);
  });
}

double Simulator::trial_bytes() const {
  double bytes = 0.0;
  for (std::size_t k = 0; k < cell_.clusters.size(); ++k) {
    const int groups = cell_.group_count(static_cast<int>(k));
    const int load = std::max(1, static_cast<int>(std::lround(config_.sparsity * groups)));
    const int L = config_.strategy == Strategy::kFixed
                      ? config_.fixed_preamble_len
                      : static_cast<int>(std::ceil(config_.safety_factor * bound(static_cast<int>(k), load).L_bound));
    bytes = std::max(bytes, 16.0 * L * groups);
  }
  return 2.0 * bytes;
}

TrialResult Simulator::run_rao(std::uint64_t trial_id) const {
  TrialResult out;
  out.trial_id = trial_id;
  const std::uint64_t seed = derive_seed(config_.rng_seed, {tag(Stream::kTrial), trial_id});
  const int K = static_cast<int>(cell_.clusters.size());
  const double P = config_.tx_power_w();
  const double noise = config_.noise_power_w();

  const Activity activity = draw_activity(cell_, config_.sparsity, seed);
  const ChannelTable channels = sample_channels(cell_, config_, seed);
  const Phase1Params p1 = Phase1Params::from_config(config_, cell_);
  const Phase1Signal signal = phase1_receive(cell_, channels, activity, walsh_, p1, seed);

  std::vector<int> groups(K);
  for (int k = 0; k < K; ++k) groups[k] = cell_.group_count(k);
  const DpsParams dps = DpsParams::from_config(config_);
  const DpsPlan plan_k = plan(signal, walsh_, groups, p1, dps, [&](int k, int load) { return bound(k, load); });
  out.airtime = plan_k.total_airtime;

  AmpOptions opts;
  opts.max_iters = config_.amp_max_iters;
  opts.tolerance = config_.amp_tolerance;

  double sum_L = 0.0;
  for (int rank = 0; rank < K; ++rank) {
    const int k = plan_k.priority[rank];
    const int M = groups[k];
    const int L = plan_k.lengths[k];
    ClusterOutcome co;
    co.cluster = k;
    co.groups = M;
    co.length = L;
    co.slot_start = plan_k.slot_start[k];
    co.est_load = plan_k.est_load[k];
    co.zero_load = plan_k.zero_load[k];
    co.bound = plan_k.bound[k];
    sum_L += L;

    const auto& gidx = cell_.clusters[k].groups;
    CVector x(M, cdouble(0.0, 0.0));
    RVector prior_g(M), prior_l(M);
    const double lam_value = config_.prior_lambda == PriorLambda::kTrue
                                 ? config_.sparsity
                                 : static_cast<double>(plan_k.est_load[k]) / M;
    for (int m = 0; m < M; ++m) {
      const int h = cell_.groups[gidx[m]].head;
      if (activity[k][m]) {
        x[m] = channels.h_ub[h];
        ++co.true_load;
      }
      prior_g[m] = config_.prior_gain == PriorGain::kRealized ? cell_.gain[h] : cell_.mean_gain[h];
      prior_l[m] = prior_lambda(lam_value, M);
    }

    DetectorSetup setup;
    setup.power = P;
    setup.noise = noise;
    setup.mode = config_.threshold_mode;
    setup.theta_objective = targets_[k].theta;
    setup.head_dist = head_dist_[k];
    setup.amp = opts;
    const std::vector<std::uint8_t> truth(activity[k].begin(), activity[k].end());
    Phase2Outcome res;
    try {
      res = detect_phase2(
          L, x, truth, prior_g, prior_l, setup,
          derive_seed(seed, {tag(Stream::kPreamble), static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(L)}),
          derive_seed(seed, {tag(Stream::kPhase2Noise), static_cast<std::uint64_t>(k)}));
    } catch (const DivergenceError& e) {
      out.failed = true;
      out.failure = std::string("cluster ") + std::to_string(k) + ": " + e.what();
      return out;
    }
    co.tau = res.amp.tau;
    co.iterations = res.amp.iterations;
    co.converged = res.amp.converged;
    co.tau_trace = std::move(res.amp.tau_trace);
    co.theta = res.metrics.theta;
    const DetectionMetrics& dm = res.metrics;
    co.n_missed = dm.n_missed;
    co.n_false_alarm = dm.n_false_alarm;
    out.n_active += dm.n_active;
    out.n_inactive += dm.n_inactive;
    out.n_missed += dm.n_missed;
    out.n_false_alarm += dm.n_false_alarm;
    out.clusters.push_back(std::move(co));
  }
  out.mean_L = sum_L / K;
  if (out.n_inactive > 0) out.pF = static_cast<double>(out.n_false_alarm) / out.n_inactive;
  if (out.n_active > 0) {
    out.pM = static_cast<double>(out.n_missed) / out.n_active;
    out.pS = 1.0 - *out.pM;
  }

  // Energy and delay over active heads.
  const double ts = config_.symbol_duration_s();
  const double p_wait = config_.wait_power_mw * 1e-3;
  const double p_pcs = config_.pcs_power_mw * 1e-3;
  const int Ls = config_.cluster_preamble_len;
  const double d2 = plan_k.total_airtime;
  double d2_star = 0.0;
  std::vector<double> L_star(K);
  for (int i = 0; i < K; ++i) {
    const int k = plan_k.priority[i];
    L_star[k] = plan_k.zero_load[k] ? plan_k.lengths[k] : std::min<double>(plan_k.bound[k], plan_k.lengths[k]);
    d2_star += L_star[k] + (i > 0 ? plan_k.guard : 0);
  }
  EnergyBreakdown e;
  DelayBreakdown dl;
  double pmb2_star = 0.0, wait2_star = 0.0;
  int heads = 0;
  for (int k = 0; k < K; ++k) {
    const auto& gidx = cell_.clusters[k].groups;
    const int L = plan_k.lengths[k];
    for (std::size_t m = 0; m < gidx.size(); ++m) {
      if (!activity[k][m]) continue;
      const int h = cell_.groups[gidx[m]].head;
      const double beta = cell_.gain[h] * cell_.gain[h];
      const double p_km = P * cell_.beta_min / beta;
      ++heads;
      e.pmb1 += p_km * Ls * ts;
      e.wait1 += p_wait * config_.phase1_wait_symbols * ts;
      e.pcs1 += p_pcs * config_.pcs_symbols * ts;
      e.pmb2 += P * L * ts;
      e.wait2 += p_wait * (d2 - L) * ts;
      e.pcs2 += p_pcs * config_.pcs_symbols * ts;
      pmb2_star += P * L_star[k] * ts;
      wait2_star += p_wait * (d2_star - L_star[k]) * ts;
      dl.t2 += L;
      dl.wait2 += d2 - L;
    }
  }
  if (heads > 0) {
    const double users_per_group = static_cast<double>(cell_.users.size()) / cell_.groups.size();
    const double group_total = e.pmb1 + e.wait1 + e.pcs1 + e.pmb2 + e.wait2 + e.pcs2;
    const double group_star = e.pmb1 + e.wait1 + e.pcs1 + pmb2_star + wait2_star + e.pcs2;
    const double per_user = 1.0 / (heads * users_per_group);
    e.per_group_total = group_total / heads;
    e.per_group_theoretical = group_star / heads;
    for (double* c : {&e.pmb1, &e.wait1, &e.pcs1, &e.pmb2, &e.wait2, &e.pcs2}) *c *= per_user;
    e.total = e.pmb1 + e.wait1 + e.pcs1 + e.pmb2 + e.wait2 + e.pcs2;
    e.theoretical = e.pmb1 + e.wait1 + e.pcs1 + pmb2_star * per_user + wait2_star * per_user + e.pcs2;

    dl.t1 = Ls;
    dl.wait1 = config_.phase1_wait_symbols;
    dl.pcs1 = config_.pcs_symbols;
    dl.t2 /= heads;
    dl.wait2 /= heads;
    dl.pcs2 = config_.pcs_symbols;
    dl.total = dl.t1 + dl.wait1 + dl.pcs1 + dl.t2 + dl.wait2 + dl.pcs2;
  }
  out.energy = e;
  out.delay = dl;
  return out;
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  s.mean = ordered_sum(values) / s.n;
  if (s.n > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
    s.stderr_ = std::sqrt(ordered_sum(sq) / (s.n - 1) / s.n);
  }
  return s;
}

BatchReport run_batch(const Simulator& sim, int n_trials, int parallelism, std::uint64_t first_trial) {
  if (n_trials < 1) throw std::invalid_argument("run_batch: n_trials must be at least 1");
  BatchReport rep;
  rep.n_trials = n_trials;
  rep.trials.resize(n_trials);
  int threads = std::max(1, parallelism);
  // Keep concurrent trials within a conservative memory budget.
  const double budget = 3.0e9;
  threads = std::max(1, std::min(threads, static_cast<int>(budget / std::max(sim.trial_bytes(), 1.0))));

  std::vector<std::string> errors(n_trials);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (int i = 0; i < n_trials; ++i) {
    try {
      rep.trials[i] = sim.run_rao(first_trial + static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      rep.trials[i].trial_id = first_trial + static_cast<std::uint64_t>(i);
      rep.trials[i].failed = true;
      rep.trials[i].failure = e.what();
    }
  }

  std::vector<double> pf, pm, ps, ml, e1, w1, c1, e2, w2, c2, et, eth, epg, d1, dw1, dp1, d2, dw2, dp2, dt;
  for (const TrialResult& t : rep.trials) {
    if (t.failed) {
      ++rep.n_failed;
      continue;
    }
    if (t.pF) pf.push_back(*t.pF);
    if (t.pM) pm.push_back(*t.pM);
    if (t.pS) ps.push_back(*t.pS);
    ml.push_back(t.mean_L);
    rep.active += t.n_active;
    rep.missed += t.n_missed;
    rep.inactive += t.n_inactive;
    rep.false_alarm += t.n_false_alarm;
    if (t.n_active == 0) continue;
    e1.push_back(t.energy.pmb1);
    w1.push_back(t.energy.wait1);
    c1.push_back(t.energy.pcs1);
    e2.push_back(t.energy.pmb2);
    w2.push_back(t.energy.wait2);
    c2.push_back(t.energy.pcs2);
    et.push_back(t.energy.total);
    eth.push_back(t.energy.theoretical);
    epg.push_back(t.energy.per_group_total);
    d1.push_back(t.delay.t1);
    dw1.push_back(t.delay.wait1);
    dp1.push_back(t.delay.pcs1);
    d2.push_back(t.delay.t2);
    dw2.push_back(t.delay.wait2);
    dp2.push_back(t.delay.pcs2);
    dt.push_back(t.delay.total);
  }
  if (2 * rep.n_failed > n_trials) {
    throw std::runtime_error("run_batch: " + std::to_string(rep.n_failed) + " of " + std::to_string(n_trials) +
                             " trials failed; first failure: " +
                             std::find_if(rep.trials.begin(), rep.trials.end(), [](const TrialResult& t) {
                               return t.failed;
                             })->failure);
  }
  rep.pF = summarize(pf);
  rep.pM = summarize(pm);
  rep.pS = summarize(ps);
  rep.mean_L = summarize(ml);
  rep.pmb1 = summarize(e1);
  rep.wait1 = summarize(w1);
  rep.pcs1 = summarize(c1);
  rep.pmb2 = summarize(e2);
  rep.wait2 = summarize(w2);
  rep.pcs2 = summarize(c2);
  rep.energy_total = summarize(et);
  rep.energy_theoretical = summarize(eth);
  rep.energy_per_group = summarize(epg);
  rep.t1 = summarize(d1);
  rep.twait1 = summarize(dw1);
  rep.tpcs1 = summarize(dp1);
  rep.t2 = summarize(d2);
  rep.twait2 = summarize(dw2);
  rep.tpcs2 = summarize(dp2);
  rep.delay_total = summarize(dt);
  return rep;
}

std::string trial_csv_header() {
  return "trial_id,K,M,lambda,estimator,mean_L,pF,pM,pS,eps_pmb1,eps_wait1,eps_pcs1,eps_pmb2,eps_wait2,eps_pcs2,"
         "eps_total,eps_theoretical,delay_total_symbols,failed";
}

std::string trial_csv_row(const TrialResult& t, const Simulator& sim) {
  const auto& c = sim.config();
  const auto& cell = sim.cell();
  const long long m = std::llround(static_cast<double>(cell.groups.size()) / cell.clusters.size());
  std::string row = std::to_string(t.trial_id) + "," + std::to_string(cell.clusters.size()) + "," +
                    std::to_string(m) + "," + format_number(c.sparsity) + "," +
                    (c.estimator == Estimator::kEnergy ? "energy" : "literal");
  auto add = [&](const std::string& v) { row += "," + v; };
  if (t.failed) {
    for (int i = 0; i < 13; ++i) add("");
    add("1");
    return row;
  }
  add(format_number(t.mean_L));
  add(format_number(t.pF));
  add(format_number(t.pM));
  add(format_number(t.pS));
  for (double v : {t.energy.pmb1, t.energy.wait1, t.energy.pcs1, t.energy.pmb2, t.energy.wait2, t.energy.pcs2,
                   t.energy.total, t.energy.theoretical, t.delay.total}) {
    add(format_number(v));
  }
  add("0");
  return row;
}

}  // namespace lgra

#include <doctest.h>

#include <cmath>

#include "lgra/amp.hpp"
#include "lgra/state_evolution.hpp"
#include "oracles.hpp"

using namespace lgra;

namespace {

ClusterModel ring_model(Ring ring, int groups = 1000) {
  const ScenarioConfig c;
  ClusterModel m;
  m.groups = groups;
  m.power = c.tx_power_w();
  m.noise = c.noise_power_w();
  m.dist = ring_gain_distribution(c, ring);
  return m;
}

}  // namespace

TEST_CASE("averaged MMSE matches Monte Carlo on the outer half") {
  const ScenarioConfig c;
  const Ring ring{500, 1000};
  const GainDistribution dist = ring_gain_distribution(c, ring);
  for (double tau : {5e-8, 1e-7, 3e-7}) {
    const double mc = oracle::monte_carlo_mse(c, ring, tau, 0.05, 2000000, 77);
    INFO("tau " << tau);
    CHECK(mse(tau, 0.05, dist) == doctest::Approx(mc).epsilon(0.02));
  }
}

TEST_CASE("MMSE limits, monotonicity and the tabulated form") {
  const GainDistribution dist = GainDistribution::empirical({0.5, 1.0, 2.0});
  const double lambda = 0.05;
  CHECK(mse(1e-9, lambda, dist) < 1e-12);
  CHECK(mse(1e6, lambda, dist) == doctest::Approx(lambda * dist.mean_power()).epsilon(1e-6));
  double prev = 0.0;
  for (double tau = 0.01; tau < 20.0; tau *= 1.3) {
    const double v = mse(tau, lambda, dist);
    CHECK(v >= prev);
    prev = v;
  }
  const MseTable table(lambda);
  for (double tau : {0.03, 0.2, 0.7, 3.0}) {
    for (double g : {0.5, 1.0, 2.0}) {
      CHECK(table.mmse(tau, g) == doctest::Approx(mmse_scalar(tau, g, lambda)).epsilon(1e-4));
    }
  }
  CHECK(mmse_scalar(0.0, 1.0, lambda) == 0.0);
  // Fully active prior: linear MMSE.
  CHECK(mmse_scalar(0.5, 1.0, 1.0) == doctest::Approx(0.25 / 1.25).epsilon(1e-6));
}

TEST_CASE("detection targets satisfy both rate equations") {
  const ScenarioConfig c;
  const GainDistribution dist = ring_gain_distribution(c, Ring{0, 1000});
  const Targets t = solve_targets(c.target_pF, c.target_pM, dist);
  CHECK(predicted_false_alarm(t.theta, t.tau) == doctest::Approx(c.target_pF).epsilon(1e-4));
  CHECK(predicted_missed_detection(t.theta, t.tau, dist) == doctest::Approx(c.target_pM).epsilon(1e-3));
  CHECK(t.theta > 8.65e-8 / 2);
  CHECK(t.theta < 8.65e-8 * 2);
  CHECK(t.tau > 5e-8 / 2);
  CHECK(t.tau < 5e-8 * 2);
  CHECK_THROWS_AS(solve_targets(0.0, 0.05, dist), std::invalid_argument);
}

TEST_CASE("state evolution noise floor and fixed point") {
  const GainDistribution dist = GainDistribution::point_mass(1.0);
  const SeTrace quiet = se_recursion(400, 1000, 1.0, 0.01, 0.02, dist, 200);
  CHECK(quiet.converged);
  CHECK(quiet.tau.back() * quiet.tau.back() >= 0.01 / 400 * (1 - 1e-12));
  CHECK(quiet.tau.front() == doctest::Approx(std::sqrt(0.01 / 400 + 2.5 * 0.02)));
  const double t = quiet.tau.back();
  CHECK(t * t == doctest::Approx(0.01 / 400 + 2.5 * mse(t, 0.02, dist)).epsilon(1e-5));
  CHECK_THROWS_AS(se_recursion(0, 10, 1.0, 1.0, 0.1, dist, 5), std::invalid_argument);
}

TEST_CASE("bound is monotone in sparsity and group count") {
  const ScenarioConfig c;
  const ClusterModel m = ring_model(Ring{500, 750});
  double prev = 0.0;
  for (double lambda : {0.01, 0.03, 0.05, 0.08, 0.1}) {
    const SeSolution s = mpl_bound(m, lambda, c.target_pF, c.target_pM);
    CHECK(s.relaxed > prev);
    CHECK(s.L_bound == static_cast<int>(std::ceil(s.relaxed)));
    prev = s.relaxed;
  }
  prev = 0.0;
  for (int groups : {250, 500, 1000, 2000}) {
    const SeSolution s = mpl_bound(ring_model(Ring{500, 750}, groups), 0.05, c.target_pF, c.target_pM);
    CHECK(s.relaxed > prev);
    prev = s.relaxed;
  }
  const SeSolution d = mpl_bound(m, 0.05, c.target_pF, c.target_pM, true);
  CHECK(d.dynamic >= d.relaxed * (1 - 1e-9));
  CHECK(d.L_dynamic >= d.L_bound);
  CHECK(length_for_tau(m, 0.05, d.tau_obj) == doctest::Approx(d.relaxed));
}

TEST_CASE("state evolution at the bound reaches the objective on the outer ring") {
  const ScenarioConfig c;
  const ClusterModel m = ring_model(Ring{750, 1000});
  const SeSolution s = mpl_bound(m, 0.05, c.target_pF, c.target_pM);
  const SeTrace trace = se_recursion(s.L_bound, m.groups, m.power, m.noise, 0.05, m.dist, 500, 1e-9);
  CHECK(trace.tau.back() == doctest::Approx(s.tau_obj).epsilon(0.05));
}

TEST_CASE("many-access baseline and predicted success") {
  const double h2 = -(0.05 * std::log2(0.05) + 0.95 * std::log2(0.95));
  CHECK(mnac_baseline(1000, 50, 10.0) == doctest::Approx(1000 * h2 / (0.5 * std::log2(501.0))));
  CHECK(mnac_baseline(1000, 50, 10.0) == doctest::Approx(63.87).epsilon(1e-3));
  CHECK_THROWS_AS(mnac_baseline(1000, 0, 10.0), std::invalid_argument);

  const GainDistribution dist = GainDistribution::point_mass(1.0);
  const PredictedPs p = predicted_ps(0.3, 0.6, 0.05, dist);
  CHECK(p.from_missed == doctest::Approx(std::exp(-0.36 / 1.09)));
  CHECK(p.from_ratio == doctest::Approx(1.0 - 19.0 * std::exp(-4.0)));
}

TEST_CASE("bound cache computes once per key") {
  BoundCache cache;
  int calls = 0;
  auto compute = [&] {
    ++calls;
    SeSolution s;
    s.L_bound = 7;
    return s;
  };
  CHECK(cache.get({0, 10, 1}, compute).L_bound == 7);
  CHECK(cache.get({0, 10, 1}, compute).L_bound == 7);
  cache.get({1, 10, 1}, compute);
  CHECK(calls == 2);
}

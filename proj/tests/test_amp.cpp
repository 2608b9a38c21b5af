#include <doctest.h>

#include <cmath>
#include <random>

#include "lgra/amp.hpp"
#include "lgra/error.hpp"
#include "lgra/preamble.hpp"
#include "lgra/random.hpp"
#include "oracles.hpp"

using namespace lgra;

namespace {

struct Instance {
  ComplexMatrix s;
  CVector x;
  std::vector<std::uint8_t> truth;
  CVector y;
};

// y = S x + noise with unit gains, in the scale where power_per_symbol = 1/L.
Instance make_instance(int L, int M, double lambda, double noise_std, std::uint64_t seed) {
  Instance in;
  in.s = group_preamble_matrix(L, M, seed);
  Rng rng = make_rng(seed + 1);
  std::normal_distribution<double> unit;
  std::bernoulli_distribution active(lambda);
  in.x.assign(M, cdouble(0.0, 0.0));
  in.truth.assign(M, 0);
  for (int m = 0; m < M; ++m) {
    if (active(rng)) {
      in.truth[m] = 1;
      in.x[m] = complex_normal(rng, unit, 1.0);
    }
  }
  kernels::matvec_serial(in.s, in.x, in.y);
  for (auto& v : in.y) v += complex_normal(rng, unit, noise_std * noise_std);
  return in;
}

double mse(const CVector& a, const CVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return s / a.size();
}

}  // namespace

TEST_CASE("denoiser matches the quadrature posterior mean") {
  for (double tau : {0.05, 0.3, 1.0, 2.5}) {
    for (double g : {0.2, 1.0, 3.0}) {
      for (double lambda : {0.01, 0.05, 0.5}) {
        for (cdouble xhat : {cdouble(0.1, 0.0), cdouble(0.4, -0.3), cdouble(-1.2, 0.8), cdouble(2.0, 2.0)}) {
          const cdouble ref = oracle::posterior_mean(xhat, tau, g, lambda);
          const cdouble got = mmse_denoise(xhat, tau, g, lambda).value;
          INFO("tau " << tau << " g " << g << " lambda " << lambda << " xhat " << xhat);
          CHECK(std::abs(got - ref) <= 1e-6 * std::max(std::abs(ref), 1e-12) + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("denoiser derivative by finite differences") {
  // The Wirtinger derivative of f(|x|^2) x is the mean of the radial and
  // tangential directional derivatives.
  const double h = 1e-6;
  for (cdouble x : {cdouble(0.3, 0.2), cdouble(-0.9, 0.4), cdouble(1.5, -1.0)}) {
    const double tau = 0.5, g = 1.2, lambda = 0.05;
    const cdouble e0 = mmse_denoise(x, tau, g, lambda).value;
    const cdouble er = mmse_denoise(x * (1.0 + h), tau, g, lambda).value;
    const cdouble et = mmse_denoise(x * std::polar(1.0, h), tau, g, lambda).value;
    const double radial = ((er - e0) / (h * x)).real();
    const double tangential = ((et - e0) / (cdouble(0.0, h) * x)).real();
    CHECK(mmse_denoise(x, tau, g, lambda).derivative == doctest::Approx(0.5 * (radial + tangential)).epsilon(1e-4));
  }
}

TEST_CASE("denoiser limits") {
  CHECK(mmse_denoise({0.0, 0.0}, 0.5, 1.0, 0.05).value == cdouble(0.0, 0.0));
  const cdouble x(0.7, -0.2);
  const Denoised full = mmse_denoise(x, 0.5, 1.0, 1.0);
  CHECK(std::abs(full.value - x * (1.0 / 1.25)) < 1e-14);
  CHECK(full.derivative == doctest::Approx(0.8));
  CHECK(mmse_denoise(x, 0.5, 1.0, 0.0).value == cdouble(0.0, 0.0));
  // Far in the tail the posterior is active with certainty.
  const cdouble far(50.0, 0.0);
  CHECK(std::abs(mmse_denoise(far, 0.5, 1.0, 0.01).value - far * 0.8) < 1e-9);
}

TEST_CASE("AMP on trivial and noiseless inputs") {
  const int L = 200, M = 1000;
  const RVector g(M, 1.0), lambda(M, 0.05);
  const ComplexMatrix s = group_preamble_matrix(L, M, 1);
  const AmpResult zero = amp_detect(CVector(L, cdouble(0.0, 0.0)), s, g, lambda, 1.0 / L);
  for (auto v : zero.x_hat) CHECK(v == cdouble(0.0, 0.0));
  CHECK(zero.converged);

  const Instance in = make_instance(L, M, 0.05, 0.0, 11);
  AmpOptions o;
  o.max_iters = 100;
  o.tolerance = 0.0;
  const AmpResult r = amp_detect(in.y, in.s, g, lambda, 1.0 / L, o);
  CHECK(mse(r.x_hat, in.x) < 1e-4);
  CHECK(r.tau_trace.back() < 1e-2 * r.tau_trace.front());

  CHECK_THROWS_AS(amp_detect(CVector(L + 1), s, g, lambda, 1.0 / L), std::invalid_argument);
}

TEST_CASE("Onsager term improves recovery") {
  const int L = 250, M = 1000;
  const RVector g(M, 1.0), lambda(M, 0.08);
  double with = 0.0, without = 0.0;
  for (int t = 0; t < 5; ++t) {
    const Instance in = make_instance(L, M, 0.08, 0.02, 100 + t);
    AmpOptions on, off;
    on.max_iters = off.max_iters = 30;
    on.tolerance = off.tolerance = 0.0;
    off.onsager = false;
    with += mse(amp_detect(in.y, in.s, g, lambda, 1.0 / L, on).x_hat, in.x);
    without += mse(amp_detect(in.y, in.s, g, lambda, 1.0 / L, off).x_hat, in.x);
  }
  CHECK(with < 0.5 * without);
}

TEST_CASE("decision and scoring on a hand-built vector") {
  const CVector stat = {{0.1, 0.0}, {0.0, 2.0}, {0.5, 0.5}, {3.0, 0.0}, {0.2, -0.1}, {0.0, 0.9}};
  const std::vector<std::uint8_t> truth = {0, 1, 1, 1, 1, 0};
  const DetectionMetrics m = decide_and_score(stat, truth, 0.8);
  CHECK(m.decisions == std::vector<std::uint8_t>{0, 1, 0, 1, 0, 1});
  CHECK(m.n_active == 4);
  CHECK(m.n_inactive == 2);
  CHECK(m.n_missed == 2);
  CHECK(m.n_false_alarm == 1);
  CHECK(*m.pF == doctest::Approx(0.5));
  CHECK(*m.pM == doctest::Approx(0.5));
  CHECK(*m.pS == doctest::Approx(0.5));

  const DetectionMetrics all = decide_and_score(stat, truth, 0.0);
  CHECK(*all.pF == 1.0);
  CHECK(*all.pM == 0.0);
  const DetectionMetrics none = decide_and_score(stat, truth, INFINITY);
  CHECK(*none.pF == 0.0);
  CHECK(*none.pM == 1.0);

  const DetectionMetrics inactive_only = decide_and_score({{1.0, 0.0}}, {0}, 0.5);
  CHECK(inactive_only.pF.has_value());
  CHECK_FALSE(inactive_only.pM.has_value());
  CHECK_FALSE(inactive_only.pS.has_value());
  CHECK_THROWS_AS(decide_and_score(stat, {0, 1}, 0.5), std::invalid_argument);
}

TEST_CASE("empirical threshold calibration") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> unit;
  CVector stat;
  std::vector<std::uint8_t> truth;
  for (int i = 0; i < 4000; ++i) {
    const bool a = i % 10 == 0;
    const double scale = a ? 2.0 : 0.5;
    stat.emplace_back(scale * unit(rng), scale * unit(rng));
    truth.push_back(a);
  }
  const double th = calibrate_threshold_empirical(stat, truth);
  const DetectionMetrics m = decide_and_score(stat, truth, th);
  CHECK(std::abs(*m.pF - *m.pM) < 0.01);
  CHECK_THROWS_AS(calibrate_threshold_empirical(stat, std::vector<std::uint8_t>(stat.size(), 0)), SolverError);
  CHECK_THROWS_AS(calibrate_threshold_empirical(stat, std::vector<std::uint8_t>(stat.size(), 1)), SolverError);
}

TEST_CASE("predicted rates match Gaussian injection") {
  const double tau = 0.4, theta = 0.7;
  const GainDistribution dist = GainDistribution::empirical({0.5, 1.0, 1.5});
  Rng rng = make_rng(8);
  std::normal_distribution<double> unit;
  std::uniform_int_distribution<int> pick(0, 2);
  const int n = 200000;
  int fa = 0, miss = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(complex_normal(rng, unit, tau * tau)) >= theta) ++fa;
    const double g = dist.gain[pick(rng)];
    if (std::abs(complex_normal(rng, unit, g * g) + complex_normal(rng, unit, tau * tau)) < theta) ++miss;
  }
  CHECK(static_cast<double>(fa) / n == doctest::Approx(predicted_false_alarm(theta, tau)).epsilon(0.02));
  CHECK(static_cast<double>(miss) / n == doctest::Approx(predicted_missed_detection(theta, tau, dist)).epsilon(0.02));
  CHECK(predicted_false_alarm(theta, tau) == doctest::Approx(std::exp(-theta * theta / (tau * tau))));

  const double th = calibrate_threshold_predicted(tau, dist);
  CHECK(predicted_false_alarm(th, tau) == doctest::Approx(predicted_missed_detection(th, tau, dist)).epsilon(1e-6));
  CHECK_THROWS_AS(calibrate_threshold_predicted(0.0, dist), SolverError);
}

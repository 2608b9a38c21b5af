#include <benchmark/benchmark.h>

#include "lgra/amp.hpp"
#include "lgra/kernels.hpp"
#include "lgra/preamble.hpp"
#include "lgra/random.hpp"

namespace {

using namespace lgra;

struct Problem {
  ComplexMatrix s;
  CVector x;
  CVector z;
  RVector g;
  RVector lambda;
};

Problem make_problem(int L, int M) {
  Problem p;
  p.s = group_preamble_matrix(L, M, 11);
  Rng rng = make_rng(12);
  std::normal_distribution<double> unit;
  std::bernoulli_distribution active(0.05);
  p.x.assign(M, cdouble(0.0, 0.0));
  p.g.assign(M, 1.0);
  p.lambda.assign(M, 0.05);
  for (int m = 0; m < M; ++m)
    if (active(rng)) p.x[m] = complex_normal(rng, unit, 1.0);
  p.z.resize(L);
  for (auto& v : p.z) v = complex_normal(rng, unit, 1.0);
  return p;
}

void args(benchmark::internal::Benchmark* b) {
  b->Args({200, 1000})->Args({400, 4000})->Args({1600, 20000});
}

void BM_Matvec(benchmark::State& state, bool omp) {
  const Problem p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  CVector y;
  for (auto _ : state) {
    omp ? kernels::matvec_omp(p.s, p.x, y) : kernels::matvec_serial(p.s, p.x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_Adjoint(benchmark::State& state, bool omp) {
  const Problem p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  CVector r;
  for (auto _ : state) {
    omp ? kernels::adjoint_omp(p.s, p.z, r) : kernels::adjoint_serial(p.s, p.z, r);
    benchmark::DoNotOptimize(r.data());
  }
}

void BM_Denoise(benchmark::State& state, bool omp) {
  const Problem p = make_problem(1, static_cast<int>(state.range(1)));
  CVector out;
  RVector d;
  for (auto _ : state) {
    omp ? kernels::denoise_omp(p.x, 0.3, p.g, p.lambda, out, d) : kernels::denoise_serial(p.x, 0.3, p.g, p.lambda, out, d);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Amp(benchmark::State& state, bool omp) {
  const int L = static_cast<int>(state.range(0));
  const Problem p = make_problem(L, static_cast<int>(state.range(1)));
  CVector y;
  kernels::matvec_serial(p.s, p.x, y);
  AmpOptions o;
  o.backend = omp ? Backend::kOpenMP : Backend::kSerial;
  for (auto _ : state) {
    AmpResult r = amp_detect(y, p.s, p.g, p.lambda, 1.0 / L, o);
    benchmark::DoNotOptimize(r.tau);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Matvec, serial, false)->Apply(args);
BENCHMARK_CAPTURE(BM_Matvec, openmp, true)->Apply(args);
BENCHMARK_CAPTURE(BM_Adjoint, serial, false)->Apply(args);
BENCHMARK_CAPTURE(BM_Adjoint, openmp, true)->Apply(args);
BENCHMARK_CAPTURE(BM_Denoise, serial, false)->Apply(args);
BENCHMARK_CAPTURE(BM_Denoise, openmp, true)->Apply(args);
BENCHMARK_CAPTURE(BM_Amp, serial, false)->Args({200, 1000})->Args({400, 4000});
BENCHMARK_CAPTURE(BM_Amp, openmp, true)->Args({200, 1000})->Args({400, 4000});

BENCHMARK_MAIN();

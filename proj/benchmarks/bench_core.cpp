#include <benchmark/benchmark.h>

#include "heatguide/carleman.hpp"
#include "heatguide/inverse.hpp"

namespace {

using namespace heatguide;

constexpr double kPi = 3.141592653589793238462643383279502884;

const CrossSection& bench_cs() {
  static const CrossSection cs{kPi, GammaSide::RightEnd, 16};
  return cs;
}

const KGrid& bench_kgrid() {
  static const KGrid kg{2.5, 64};
  return kg;
}

void BM_SolveForward(benchmark::State& state) {
  const TimeGrid tg{1.0, static_cast<int>(state.range(0))};
  const SourceProfile one = SourceProfile::constant_one(tg);
  const ModalField beta = random_field(bench_cs(), bench_kgrid(), 30.0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_forward(beta, one, tg));
  }
}
BENCHMARK(BM_SolveForward)->Arg(128)->Arg(512);

void BM_TraceH1Norm(benchmark::State& state) {
  const TimeGrid tg{1.0, static_cast<int>(state.range(0))};
  const SourceProfile one = SourceProfile::constant_one(tg);
  const ModalField beta = random_field(bench_cs(), bench_kgrid(), 30.0, 2);
  const NeumannTrace d = neumann_trace(solve_forward(beta, one, tg));
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace_h1_norm(d));
  }
}
BENCHMARK(BM_TraceH1Norm)->Arg(512);

void BM_ReconstructFromTrace(benchmark::State& state) {
  const TimeGrid tg{1.0, 512};
  const SourceProfile one = SourceProfile::constant_one(tg);
  const ModalField beta = random_field(bench_cs(), bench_kgrid(), 30.0, 3);
  const NeumannTrace d = neumann_trace(solve_forward(beta, one, tg));
  InversionConfig cfg;
  cfg.cutoff_policy = CutoffPolicy::Fixed;
  cfg.fixed_lambda_cut = static_cast<double>(state.range(0));
  cfg.ridge = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct_from_trace(d, bench_cs(), one, cfg));
  }
}
BENCHMARK(BM_ReconstructFromTrace)->Arg(8)->Arg(31);

void BM_CarlemanSides(benchmark::State& state) {
  const CrossSection cs{kPi, GammaSide::RightEnd, 4};
  const KGrid kg{1.0, 8};
  const TimeGrid tg{1.0, 64};
  WeightParams p;
  p.cs = cs;
  p.rho = 4.0;
  p.T = tg.T;
  p.lambda = p.lambda0();
  const auto pair = make_separable_test(cs, kg, tg, {1, 2, 2, 5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(carleman_sides(pair.u, pair.u_t, p, 64));
  }
}
BENCHMARK(BM_CarlemanSides)->Arg(64);

void BM_StabilitySweep(benchmark::State& state) {
  const TimeGrid tg{1.0, 256};
  const SourceProfile one = SourceProfile::constant_one(tg);
  const ModalField beta =
      random_field(bench_cs(), bench_kgrid(), 30.0, 4).rescaled_to_h1(1.0);
  InversionConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_sweep(beta, {1e-3, 1e-5}, one, tg, cfg, 17));
  }
}
BENCHMARK(BM_StabilitySweep);

} // namespace

BENCHMARK_MAIN();

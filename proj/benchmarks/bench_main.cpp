#include <benchmark/benchmark.h>

#include <cmath>

#include "pendamp/extremal.hpp"
#include "pendamp/limits.hpp"
#include "pendamp/linosc.hpp"
#include "pendamp/quasiopt.hpp"

using namespace pendamp;

static void BM_ConstantD(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(constant_D(1e-12).value);
}
BENCHMARK(BM_ConstantD);

static void BM_TauMinus(benchmark::State& state) {
  const double E = 2.0 - std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tau_minus(E).value);
}
BENCHMARK(BM_TauMinus)->Arg(1)->Arg(4)->Arg(8);

static void BM_PeriodIntegral(benchmark::State& state) {
  const double h = -std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(period_integral(h).value);
}
BENCHMARK(BM_PeriodIntegral)->Arg(2)->Arg(8);

static void BM_FreePendulum(benchmark::State& state) {
  Rhs<2> rhs = [](double, const Vec<2>& q) { return Vec<2>{q[1], -std::sin(q[0])}; };
  StepControl ctl;
  ctl.record_samples = false;
  for (auto _ : state) {
    auto seg = integrate<2>(rhs, {1.0, 0.0}, 0.0, 100.0, {}, ctl);
    benchmark::DoNotOptimize(seg.final_state());
  }
}
BENCHMARK(BM_FreePendulum);

static void BM_TraceExtremal(benchmark::State& state) {
  const Params p(0.1);
  StopPolicy sp;
  sp.record_samples = false;
  for (auto _ : state) benchmark::DoNotOptimize(trace_extremal(3.0, 1, p, sp).switch_count);
}
BENCHMARK(BM_TraceExtremal);

static void BM_MaxSwitchings(benchmark::State& state) {
  SweepPolicy sp;
  sp.points_per_sign = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(max_switchings(Params(0.2), sp).max_switchings);
}
BENCHMARK(BM_MaxSwitchings)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_SimulateDamping(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  CapturePolicy cp;
  cp.record_samples = false;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_damping({-3.0, 0.0}, Params(eps), cp).damping_time);
}
BENCHMARK(BM_SimulateDamping)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_LinSimulate(benchmark::State& state) {
  const double E = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lin_simulate({0.0, std::sqrt(2.0 * E)}).T);
}
BENCHMARK(BM_LinSimulate)->Arg(10)->Arg(400);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>

#include "kdv/forcing.hpp"
#include "kdv/fractional.hpp"
#include "kdv/propagators.hpp"
#include "kdv/solver.hpp"

namespace {

using namespace kdv;

Exec mode(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

SpatialProfile gaussian(const Axis& x) {
  SpatialProfile p;
  p.x0 = x.start;
  p.dx = x.step;
  p.samples.resize(x.n);
  for (std::size_t j = 0; j < x.n; ++j) p.samples[j] = std::exp(-x.at(j) * x.at(j));
  return p;
}

void BM_FracIntegrate(benchmark::State& s) {
  const Axis t = time_axis(2.0, 2048);
  const TimeSignal f = bump_signal(t, 1.0);
  for (auto _ : s) benchmark::DoNotOptimize(frac_integrate(f, FracOrder(0.4, 0.2), mode(s)));
}

void BM_XFracIntegrate(benchmark::State& s) {
  const Axis x = staggered_axis(50.0, 1024), t = time_axis(1.0, 128);
  SpaceTimeField v(x, t);
  for (std::size_t n = 0; n < t.n; ++n)
    for (std::size_t j = 0; j < x.n; ++j) v(j, n) = std::exp(-x.at(j) * x.at(j)) * t.at(n);
  for (auto _ : s) benchmark::DoNotOptimize(x_frac_integrate(v, cplx(0.6, 0.0), Side::left, mode(s)));
}

void BM_GroupKernel(benchmark::State& s) {
  const SpatialProfile phi = gaussian(staggered_axis(50.0, 1024));
  for (auto _ : s) benchmark::DoNotOptimize(airy_group_kernel(phi, 0.3, mode(s)));
}

void BM_Duhamel(benchmark::State& s) {
  const Axis x = staggered_axis(50.0, 1024), t = time_axis(1.0, 256);
  SpaceTimeField w(x, t);
  for (std::size_t n = 0; n < t.n; ++n)
    for (std::size_t j = 0; j < x.n; ++j) w(j, n) = std::sin(3.0 * t.at(n)) * std::exp(-x.at(j) * x.at(j));
  for (auto _ : s) benchmark::DoNotOptimize(duhamel_field(w, mode(s)));
}

void BM_ForcingL0(benchmark::State& s) {
  const Axis x = staggered_axis(50.0, 1024), t = time_axis(2.0, 511);
  const ForcingEngine e(x, t);
  const auto F = e.spectrum(bump_signal(t, 1.0));
  for (auto _ : s) benchmark::DoNotOptimize(e.L0(F, 0, mode(s)));
}

void BM_Family(benchmark::State& s) {
  const Axis x = staggered_axis(50.0, 1024), t = time_axis(2.0, 511);
  const ForcingEngine e(x, t);
  const auto F = e.spectrum(bump_signal(t, 1.0));
  for (auto _ : s) benchmark::DoNotOptimize(e.family(F, FracOrder(-0.4), Sign::minus, mode(s)));
}

}  // namespace

// Argument 0 runs the serial reference path, 1 the OpenMP path.
BENCHMARK(BM_FracIntegrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_XFracIntegrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroupKernel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Duhamel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForcingL0)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Family)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

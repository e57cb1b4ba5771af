#include <benchmark/benchmark.h>

#include <cmath>

#include "ppl/calculus.hpp"
#include "ppl/pmeasure.hpp"

using namespace ppl;

namespace {

double log_abs(std::span<const cplx> z) { return std::log(std::abs(z[0])); }

// Extremal function of ({|z| <= 1}, {|z| < e}); range(0) is 1/h.
void BM_DiskCondenser(benchmark::State& state) {
  const double h = 1.0 / state.range(0);
  auto c = sublevel_condenser(log_abs, 0, 1, Box::centered(1, std::exp(1.0) + 2 * h), h);
  std::size_t iters = 0;
  for (auto _ : state) {
    auto ext = relative_extremal(c);
    iters = ext.iterations;
    benchmark::DoNotOptimize(ext.omega.values().data());
  }
  state.counters["nodes"] = static_cast<double>(c.domain->count_class(NodeClass::Interior));
  state.counters["sweeps"] = static_cast<double>(iters);
}
BENCHMARK(BM_DiskCondenser)->Arg(10)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

// One C^2 condenser solve on the 14-line lattice stencil.
void BM_BallCondenser(benchmark::State& state) {
  const double h = 0.2;
  auto phi = [](std::span<const cplx> z) { return 0.5 * std::log(std::norm(z[0]) + std::norm(z[1])); };
  auto c = sublevel_condenser(phi, 0, 1, Box::centered(2, std::exp(1.0) + 2 * h), h);
  for (auto _ : state) benchmark::DoNotOptimize(relative_extremal(c).omega.values().data());
}
BENCHMARK(BM_BallCondenser)->Unit(benchmark::kMillisecond);

void BM_MongeAmpereMass(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double h = n == 1 ? 0.02 : 0.15;
  auto u = field_from_evaluator(build_box_domain(Box::cube(n, -2.2, 2.2), h), [](std::span<const cplx> z) {
    double s = 0;
    for (auto x : z) s += std::norm(x);
    return soft_max(0.5 * std::log(s), -0.5, 0.5);
  });
  for (auto _ : state) benchmark::DoNotOptimize(ma_mass(u).mass);
}
BENCHMARK(BM_MongeAmpereMass)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>

#include "ppl/spectra.hpp"
#include "ppl/supnorm.hpp"

using namespace ppl;

namespace {

double log_abs(std::span<const cplx> z) { return std::log(std::abs(z[0])); }

void BM_GramCircular(benchmark::State& state) {
  const int D = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix({log_abs, 1, 1.0}, D).data());
}
BENCHMARK(BM_GramCircular)->Arg(20)->Arg(40);

// Ellipse x^2/4 + y^2 < 1: no rotation symmetry, so the polar quadrature runs.
void BM_GramEllipse(benchmark::State& state) {
  const int D = static_cast<int>(state.range(0));
  auto phi = [](std::span<const cplx> z) { return std::log(z[0].real() * z[0].real() / 4 + z[0].imag() * z[0].imag()); };
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix({phi, 1, 0.0}, D).data());
}
BENCHMARK(BM_GramEllipse)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Diameters(benchmark::State& state) {
  auto pair = gram_pair(log_abs, 1, 0, 1, 40);
  for (auto _ : state) benchmark::DoNotOptimize(kolmogorov_diameters(pair, 30).d.data());
}
BENCHMARK(BM_Diameters);

void BM_SupNormBall(benchmark::State& state) {
  Holomorphic f = [](std::span<const cplx> z) { return std::pow(z[0], 3) * z[1] - 2.0 * z[0] * z[1] + z[1] * z[1]; };
  Compact K = ball(2, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(sup_norm(f, K).value);
}
BENCHMARK(BM_SupNormBall)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

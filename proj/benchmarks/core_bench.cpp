#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "coarse/ideals.hpp"
#include "coarse/kernel.hpp"
#include "coarse/localization.hpp"
#include "coarse/spectra.hpp"

namespace {

using namespace coarse;

void BM_EigTridiagonal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> diag(n, 2.0), off(n - 1, -1.0);
  for (std::size_t i = n / 2; i < n; ++i) diag[i] = 7.0;
  for (auto _ : state) benchmark::DoNotOptimize(eig_tridiagonal(diag, off));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigTridiagonal)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_OperatorNorm(benchmark::State& state) {
  const auto space = build_lattice_window(1, static_cast<int>(state.range(0)));
  const auto a = adjacency_kernel(space);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(a));
}
BENCHMARK(BM_OperatorNorm)->RangeMultiplier(4)->Range(64, 4096);

void BM_OperatorNormPlane(benchmark::State& state) {
  const auto space = build_lattice_window(2, static_cast<int>(state.range(0)));
  const auto a = adjacency_kernel(space);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(a));
}
BENCHMARK(BM_OperatorNormPlane)->Arg(10)->Arg(30)->Arg(60);

void BM_GhostProfile(benchmark::State& state) {
  std::vector<int> sizes(static_cast<std::size_t>(state.range(0)));
  std::iota(sizes.begin(), sizes.end(), 1);
  const auto pi = build_hls(sizes);
  const std::vector<double> radii{1.0};
  for (auto _ : state) benchmark::DoNotOptimize(ghost_report(pi.kernel(), radii, 0.1));
}
BENCHMARK(BM_GhostProfile)->Arg(10)->Arg(20)->Arg(30);

void BM_FloquetPeriodic(benchmark::State& state) {
  std::vector<Complex> values(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::cos(1.3 * static_cast<double>(i));
  AsymptoticOperatorSpec h;
  h.self_adjoint = true;
  h.bands = {{make_coord({0}), Coefficient::periodic(values)},
             {make_coord({1}), Coefficient::constant(-1.0)},
             {make_coord({-1}), Coefficient::constant(-1.0)}};
  for (auto _ : state) benchmark::DoNotOptimize(floquet_bands(h));
}
BENCHMARK(BM_FloquetPeriodic)->Arg(1)->Arg(4)->Arg(16);

void BM_FiniteSectionStep(benchmark::State& state) {
  AsymptoticOperatorSpec h;
  h.self_adjoint = true;
  h.bands = {{make_coord({0}), Coefficient::step(2.0, 7.0)},
             {make_coord({1}), Coefficient::constant(-1.0)},
             {make_coord({-1}), Coefficient::constant(-1.0)}};
  for (auto _ : state) benchmark::DoNotOptimize(finite_section_spectrum(h, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FiniteSectionStep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

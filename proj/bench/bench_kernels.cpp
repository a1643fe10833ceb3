// Serial reference kernels against their OpenMP versions, plus the
// parallel scans in the scalar module and one full energy evaluation.

#include <benchmark/benchmark.h>

#include <random>

#include "nehari/functional.hpp"
#include "nehari/scalar.hpp"

namespace {

using namespace nehari;

std::vector<double> draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.1, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void set_label(benchmark::State& st) { st.SetLabel(st.range(1) ? "omp" : "serial"); }

void BM_PowerSums(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto q = draws(n, 1), u = draws(n, 2), v = draws(n, 3);
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::power_sums(exec_of(st), q, u, v, 4.0, 2.0, 2.0));
  st.SetItemsProcessed(st.iterations() * st.range(0));
  set_label(st);
}

void BM_NonIntegerPowers(benchmark::State& st) {
  // N = 5: exponent 10/3 goes through std::pow.
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto q = draws(n, 1), u = draws(n, 2), v = draws(n, 3);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        kernels::power_sums(exec_of(st), q, u, v, 10.0 / 3, 5.0 / 3, 5.0 / 3));
  st.SetItemsProcessed(st.iterations() * st.range(0));
  set_label(st);
}

void BM_CellForm(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto k = draws(n - 1, 1), a = draws(n, 2), b = draws(n, 3);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::cell_form(exec_of(st), k, a, b));
  st.SetItemsProcessed(st.iterations() * st.range(0));
  set_label(st);
}

void BM_Energy(benchmark::State& st) {
  ReducedGrid g({4, 2, 3, static_cast<int>(st.range(0))});
  g.set_exec(exec_of(st));
  const PairState p{draws(g.size(), 2), draws(g.size(), 3)};
  const CouplingParams cp{1, 1, 2, 2, -1};
  for (auto _ : st) benchmark::DoNotOptimize(energy(p, cp, g));
  set_label(st);
}

void BM_SyncBruteScan(benchmark::State& st) {
  SyncOptions o;
  o.exec = exec_of(st);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        sync_brute_scan({1, 1, 2, 2, -0.45, 4}, static_cast<int>(st.range(0)), o));
  set_label(st);
}

void BM_PlaneCritical(benchmark::State& st) {
  const PlaneCoeffs c = plane_coeffs(1.2, 0.8, 0.5, 4, 2, 2);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        plane_critical_points(c, static_cast<int>(st.range(0)), 200, exec_of(st)));
  set_label(st);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {1 << 11, 1 << 16, 1 << 20})
    for (long par : {0, 1}) b->Args({n, par});
}

}  // namespace

BENCHMARK(BM_PowerSums)->Apply(sizes);
BENCHMARK(BM_NonIntegerPowers)->Apply(sizes);
BENCHMARK(BM_CellForm)->Apply(sizes);
BENCHMARK(BM_Energy)->Args({2048, 0})->Args({2048, 1})->Args({1 << 18, 0})->Args({1 << 18, 1});
BENCHMARK(BM_SyncBruteScan)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlaneCritical)->Args({200, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

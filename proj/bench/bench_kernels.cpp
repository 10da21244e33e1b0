// Serial reference vs OpenMP for each parallel kernel. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include "dynsym/collision3d.hpp"
#include "dynsym/jump_sim.hpp"
#include "dynsym/measurement.hpp"
#include "dynsym/quantum_arrival.hpp"
#include "dynsym/semiclassical.hpp"

using namespace dynsym;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "openmp" : "serial"); }

const Scenario& slow_set() {
  static const Scenario sc(GaussianPacket(0.1, 0.333, -2.5), GaussianPacket(0.1, -0.333, 2.5));
  return sc;
}

const Scenario& detector_set() {
  static const Scenario sc(GaussianPacket(0.5, 1.5, -1.25), GaussianPacket(0.5, -1.5, 1.25));
  return sc;
}

std::vector<double> window(const Scenario& sc, int n) {
  const auto w = default_time_window(sc);
  return linspace(w.t_min, w.t_max, n);
}

void BM_rho_cl_curve(benchmark::State& st) {
  const auto grid = window(slow_set(), 20001);
  for (auto _ : st) benchmark::DoNotOptimize(rho_cl_curve(slow_set(), grid, mode(st)));
  label(st);
}

void BM_rho_quantum(benchmark::State& st) {
  const auto grid = window(slow_set(), 2001);
  for (auto _ : st) benchmark::DoNotOptimize(rho_quantum(slow_set(), grid, mode(st)));
  label(st);
}

void BM_rho_cl_mc(benchmark::State& st) {
  const HistogramSpec spec{0.0, 4.0, 100};
  for (auto _ : st) benchmark::DoNotOptimize(rho_cl_mc(slow_set(), 1000000, 0, spec, mode(st)));
  label(st);
}

void BM_signal_curve(benchmark::State& st) {
  const auto rho = rho_quantum(detector_set(), linspace(0.0, 3.0, 601)).curve;
  const auto grid = linspace(0.0, 3.0, 3001);
  const Detector det{0.0, 0.25};
  for (auto _ : st) benchmark::DoNotOptimize(signal_curve(detector_set(), det, rho, grid, mode(st)));
  label(st);
}

void BM_simulate_ensemble(benchmark::State& st) {
  const auto w = default_time_window(slow_set());
  const auto rho = rho_quantum(slow_set(), extend_geometric(linspace(w.t_min, w.t_max, 2001), 1e8, 800)).curve;
  for (auto _ : st) benchmark::DoNotOptimize(simulate_ensemble(rho, 1000000, 0, mode(st)));
  label(st);
}

void BM_rho3d_mc(benchmark::State& st) {
  const Gaussian3DPacket L{{GaussianPacket(1.0, 3.33, -2.5), GaussianPacket(1.0, 0.0, 0.0), GaussianPacket(1.0, 0.0, 0.0)}};
  const Gaussian3DPacket R{{GaussianPacket(1.0, -3.33, 2.5), GaussianPacket(1.0, 0.0, 0.0), GaussianPacket(1.0, 0.0, 0.0)}};
  const HistogramSpec spec{0.0, 3.0, 60};
  for (auto _ : st) benchmark::DoNotOptimize(rho3d_mc(L, R, 0.5, 1000000, 0, spec, mode(st)));
  label(st);
}

}  // namespace

BENCHMARK(BM_rho_cl_curve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rho_quantum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rho_cl_mc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_signal_curve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_ensemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rho3d_mc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "ll/counting.hpp"
#include "ll/experiment.hpp"
#include "ll/observables.hpp"
#include "ll/propagator.hpp"

namespace {

using namespace ll;

ExperimentConfig bench_config() {
  ExperimentConfig cfg;
  cfg.grid_points = 64;
  cfg.mode_window = 8;
  cfg.initial_width = 0.8;
  return cfg;
}

void BM_BuildHamiltonian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ExperimentConfig cfg = bench_config();
  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const ModeBasis modes(grid, cfg.mode_window);
  const FockBasis basis = enumerate_basis(n, modes);
  const TwoBodyKernel kernel = potential_coefficients(PotentialShape::Gaussian, 0.2, modes);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_hamiltonian(basis, kernel, +1));
  }
  state.counters["dim"] = static_cast<double>(basis.dim());
}
BENCHMARK(BM_BuildHamiltonian)->Arg(4)->Arg(6)->Arg(8);

void BM_ExpmApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ExperimentConfig cfg = bench_config();
  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const ModeBasis modes(grid, cfg.mode_window);
  const FockBasis basis = enumerate_basis(n, modes);
  const TwoBodyKernel kernel = potential_coefficients(PotentialShape::Gaussian, 0.2, modes);
  const SparseHermitian h = build_hamiltonian(basis, kernel, +1);
  const SpectralField phi = make_initial_datum(cfg, grid);
  const FockVector v = product_state(phi, basis);
  PropagatorConfig pc;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expm_apply(h, v, 0.05, pc));
  }
  state.counters["dim"] = static_cast<double>(basis.dim());
}
BENCHMARK(BM_ExpmApply)->Arg(4)->Arg(6);

void BM_NlsStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ExperimentConfig cfg = bench_config();
  cfg.grid_points = m;
  cfg.box_length = 40.0;  // soliton-scale box keeps dt k_max^2 in bounds
  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const SpectralField phi = make_initial_datum(cfg, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nls_evolve(phi, +1, 0.1, 1e-3, 100));
  }
}
BENCHMARK(BM_NlsStep)->Arg(128)->Arg(512);

void BM_Rdm2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ExperimentConfig cfg = bench_config();
  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const ModeBasis modes(grid, cfg.mode_window);
  const FockBasis basis = enumerate_basis(n, modes);
  const SpectralField phi = make_initial_datum(cfg, grid);
  const FockVector v = product_state(phi, basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdm2(v));
  }
  state.counters["dim"] = static_cast<double>(basis.dim());
}
BENCHMARK(BM_Rdm2)->Arg(4)->Arg(6);

void BM_PkDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ExperimentConfig cfg = bench_config();
  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const ModeBasis modes(grid, cfg.mode_window);
  const FockBasis basis = enumerate_basis(n, modes);
  const SpectralField phi = make_initial_datum(cfg, grid);
  const FockVector v = product_state(phi, basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pk_distribution(v, phi));
  }
}
BENCHMARK(BM_PkDistribution)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();

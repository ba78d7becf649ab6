#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "torusgas/equilibrium.hpp"
#include "torusgas/particles.hpp"
#include "torusgas/regularization.hpp"
#include "torusgas/sampling.hpp"
#include "torusgas/spectral.hpp"

using namespace torusgas;

namespace {

Configuration uniform_config(int d, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * d);
  for (auto& x : c) x = u(rng);
  return Configuration(d, 1.0, c);
}

GridField smooth_field(const TorusGrid& g) {
  return GridField::from_function(g, [](auto x) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::cos(2.0 * std::numbers::pi * (k + 1) * x[k % 3]);
    return s;
  });
}

void BM_ForwardTransform(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const TorusGrid g(d, static_cast<int>(state.range(1)));
  const auto f = smooth_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(forward_transform(f));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_ForwardTransform)->Args({1, 1 << 12})->Args({1, 1 << 16})->Args({2, 128})->Args({2, 512})->Args({3, 64});

void BM_PairEnergy(benchmark::State& state) {
  const TorusGrid g(1, 256);
  const PairInteraction pair(riesz_kernel(g, 2.0), 1 << 16);
  const auto config = uniform_config(1, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pair_energy(pair, config));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairEnergy)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_MetropolisSweep(benchmark::State& state) {
  const TorusGrid g(1, 256);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const GibbsModel model(riesz_kernel(g, 2.0), Potential::cosine(g, 0.5), {n, 1.0 / std::sqrt(double(n))});
  ChainOptions o;
  o.burn_in = 0;
  o.sweeps = 10;
  o.tune = false;
  for (auto _ : state) benchmark::DoNotOptimize(mcmc_sample(model, o));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(o.sweeps * n));
}
BENCHMARK(BM_MetropolisSweep)->Arg(32)->Arg(128)->Arg(512);

void BM_RegularizedEnergy(benchmark::State& state) {
  const TorusGrid g(1, 256);
  const auto kernel = riesz_kernel(g, 0.9);
  const double t = 1e-3;
  const auto config = uniform_config(1, static_cast<std::size_t>(state.range(0)), 2);
  const int cutoff = regularization_cutoff(kernel, t);
  for (auto _ : state) {
    const auto moments = empirical_moments(config, cutoff);
    benchmark::DoNotOptimize(regularized_energy(kernel, moments, t));
  }
}
BENCHMARK(BM_RegularizedEnergy)->Arg(64)->Arg(256)->Arg(1024);

void BM_PartitionQuadrature(benchmark::State& state) {
  const TorusGrid g(1, 256);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const GibbsModel model(riesz_kernel(g, 2.0), Potential::cosine(g, 0.5), {n, 4.0 / double(n)});
  for (auto _ : state) benchmark::DoNotOptimize(direct_log_partition(model, 32, 1e-7));
}
BENCHMARK(BM_PartitionQuadrature)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ThermalSolve(benchmark::State& state) {
  const TorusGrid g(1, 256);
  const auto kernel = riesz_kernel(g, 2.0);
  const auto V = Potential::cosine(g, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_thermal(kernel, V, static_cast<double>(state.range(0))));
}
BENCHMARK(BM_ThermalSolve)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

// Serial reference vs OpenMP evaluation of the flow right-hand side.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "icf/kernels.hpp"

namespace {

struct Fixture {
  icf::CapGrid grid;
  std::vector<double> phi;
  std::vector<double> out;
  std::vector<double> rate;
};

Fixture make(icf::GridMode mode, int n_theta, int n_psi) {
  Fixture f{icf::build_cap_grid(2, std::acos(0.5), {n_theta, n_psi}, mode), {}, {}, {}};
  f.phi.resize(f.grid.size());
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double th = f.grid.theta(i);
    f.phi[i] = 0.05 * std::cos(3.0 * th) + 0.02 * std::pow(std::sin(th), 2) * std::cos(2.0 * f.grid.psi(i));
  }
  f.out.resize(f.grid.size());
  f.rate.resize(f.grid.size());
  return f;
}

template <bool Parallel>
void rhs(benchmark::State& state) {
  const auto mode = state.range(1) ? icf::GridMode::full2d : icf::GridMode::axisymmetric;
  Fixture f = make(mode, static_cast<int>(state.range(0)), 32);
  icf::kernels::RhsArgs args;
  for (auto _ : state) {
    if constexpr (Parallel) {
      icf::kernels::rhs_parallel(f.grid, f.phi, args, f.out, f.rate);
    } else {
      icf::kernels::rhs_serial(f.grid, f.phi, args, f.out, f.rate);
    }
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.grid.size()));
}

}  // namespace

BENCHMARK(rhs<false>)->Name("rhs_serial")->Args({201, 0})->Args({81, 1})->Args({161, 1});
BENCHMARK(rhs<true>)->Name("rhs_parallel")->Args({201, 0})->Args({81, 1})->Args({161, 1});

BENCHMARK_MAIN();

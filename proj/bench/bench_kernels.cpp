// Copyright 2026 The seedless-di Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP path for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "seedless/bell.hpp"
#include "seedless/extractor.hpp"
#include "seedless/kernels.hpp"
#include "seedless/random_ops.hpp"
#include "seedless/rng.hpp"

using namespace seedless;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? Exec::parallel : Exec::serial;
}

void BM_Fwht(benchmark::State& state) {
  const auto size = std::size_t{1} << state.range(0);
  Rng rng(1);
  std::vector<double> base(size);
  for (auto& v : base) v = rng.uniform();
  std::vector<double> work(size);
  for (auto _ : state) {
    work = base;
    kernels::fwht(work, exec_of(state));
    benchmark::DoNotOptimize(work.data());
  }
}
BENCHMARK(BM_Fwht)->ArgsProduct({{12, 16, 20}, {0, 1}});

void BM_Certify(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto g = extract::find_certified_table(n, 3, 1000, 7).table;
  for (auto _ : state) benchmark::DoNotOptimize(extract::certify(g, exec_of(state)));
}
BENCHMARK(BM_Certify)->ArgsProduct({{10, 14, 16}, {0, 1}});

void BM_RoundProduct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const std::vector<std::size_t> d(n, 2);
  const std::size_t dim = std::size_t{1} << (2 * n);
  const auto rho = random::ginibre_density_matrix(rng, dim, dim);
  std::vector<linalg::ComplexMatrix> factors;
  for (std::size_t i = 0; i < n; ++i) factors.push_back(random::random_hermitian(rng, 4, -1.0, 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::round_product_expectation(rho, factors, d, d, exec_of(state)));
  }
}
BENCHMARK(BM_RoundProduct)->ArgsProduct({{2, 3, 4}, {0, 1}});

void BM_Theorem1Sweep(benchmark::State& state) {
  Rng rng(3);
  std::vector<bell::RoundDevices> devices;
  for (int i = 0; i < state.range(0); ++i) devices.push_back(bell::random_qubit_devices(rng));
  const auto grid = bell::clamped_s_grid(50);
  for (auto _ : state) benchmark::DoNotOptimize(bell::sweep_theorem1(devices, grid, exec_of(state)));
}
BENCHMARK(BM_Theorem1Sweep)->ArgsProduct({{20, 200}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();

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

#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "seedless/kernels.hpp"
#include "seedless/linalg.hpp"
#include "seedless/random_ops.hpp"
#include "seedless/rng.hpp"

using namespace seedless;
using kernels::Exec;
using linalg::ComplexMatrix;

TEST(Fwht, MatchesNaiveTransform) {
  Rng rng(41);
  const std::size_t n = 64;
  std::vector<double> data(n);
  for (auto& x : data) x = rng.uniform(-1.0, 1.0);
  std::vector<double> expected(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t a = 0; a < n; ++a) {
      expected[r] += data[a] * (__builtin_popcountll(a & r) % 2 ? -1.0 : 1.0);
    }
  }
  kernels::fwht(data, Exec::serial);
  for (std::size_t r = 0; r < n; ++r) EXPECT_NEAR(data[r], expected[r], 1e-12);
}

TEST(Fwht, SerialAndParallelBitIdentical) {
  Rng rng(42);
  for (std::size_t log_n : {3u, 10u, 15u, 17u}) {
    std::vector<double> a(std::size_t{1} << log_n);
    for (auto& x : a) x = rng.uniform(-1.0, 1.0);
    std::vector<double> b = a;
    kernels::fwht(a, Exec::serial);
    kernels::fwht(b, Exec::parallel);
    EXPECT_EQ(a, b) << "n = 2^" << log_n;
  }
}

TEST(Fwht, InvolutionUpToScale) {
  Rng rng(43);
  std::vector<double> a(1024);
  for (auto& x : a) x = rng.uniform(-1.0, 1.0);
  const auto original = a;
  kernels::fwht(a, Exec::parallel);
  kernels::fwht(a, Exec::parallel);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i] / 1024.0, original[i], 1e-13);
}

TEST(Fwht, RejectsNonPowerOfTwo) {
  std::vector<double> a(6, 0.0);
  EXPECT_THROW(kernels::fwht(a, Exec::serial), std::invalid_argument);
}

TEST(RoundProduct, MatchesExplicitKronecker) {
  Rng rng(44);
  const std::vector<std::size_t> dims_a{2, 3};
  const std::vector<std::size_t> dims_b{2, 2};
  const ComplexMatrix rho = random::ginibre_density_matrix(rng, 24, 24);
  const std::vector<ComplexMatrix> factors{random::ginibre(rng, 4, 4), random::ginibre(rng, 6, 6)};

  // Explicit: F_1 (x) F_2 on A1 B1 A2 B2, reordered to A1 A2 B1 B2.
  const ComplexMatrix f = linalg::kron(factors[0], factors[1]);
  const std::vector<std::size_t> dims{2, 2, 3, 2};  // A1 B1 A2 B2
  const std::vector<std::size_t> perm{0, 2, 1, 3};
  const ComplexMatrix f_ab = linalg::permute_subsystems(f, dims, perm);
  const auto expected = (rho * f_ab).trace();

  for (Exec exec : {Exec::serial, Exec::parallel}) {
    const auto got = kernels::round_product_expectation(rho, factors, dims_a, dims_b, exec);
    EXPECT_NEAR(got.real(), expected.real(), 1e-12);
    EXPECT_NEAR(got.imag(), expected.imag(), 1e-12);
  }
}

TEST(RoundProduct, SerialAndParallelBitIdentical) {
  Rng rng(45);
  const std::vector<std::size_t> d{2, 2, 2};
  const ComplexMatrix rho = random::ginibre_density_matrix(rng, 64, 8);
  std::vector<ComplexMatrix> factors;
  for (int i = 0; i < 3; ++i) factors.push_back(random::random_hermitian(rng, 4, -1.0, 1.0));
  const auto s = kernels::round_product_expectation(rho, factors, d, d, Exec::serial);
  const auto p = kernels::round_product_expectation(rho, factors, d, d, Exec::parallel);
  EXPECT_EQ(s, p);
}

TEST(ForEachIndex, PropagatesException) {
  EXPECT_THROW(kernels::for_each_index(100, Exec::parallel,
                                       [](std::size_t i) {
                                         if (i == 37) throw std::runtime_error("boom");
                                       }),
               std::runtime_error);
}

TEST(ForEachIndex, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  kernels::for_each_index(hits.size(), Exec::parallel, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

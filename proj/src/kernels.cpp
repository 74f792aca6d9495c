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

#include "seedless/kernels.hpp"

#include <bit>
#include <vector>

#include "seedless/errors.hpp"

namespace seedless::kernels {

namespace {
int g_threads = 0;

// Below this size the butterfly stages run serially even under Exec::parallel.
constexpr std::size_t kParallelFwhtMin = std::size_t{1} << 14;
}  // namespace

void set_thread_count(int n) {
  g_threads = n > 0 ? n : 0;
  if (n > 0) {
    omp_set_num_threads(n);
  } else {
    omp_set_num_threads(omp_get_num_procs());
  }
}

int thread_count() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void fwht(std::span<double> data, Exec exec) {
  const std::size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw PreconditionViolation("fwht: length must be a power of two");
  }
  double* v = data.data();
  if (exec == Exec::serial || n < kParallelFwhtMin) {
    for (std::size_t h = 1; h < n; h <<= 1) {
      for (std::size_t base = 0; base < n; base += 2 * h) {
        for (std::size_t j = base; j < base + h; ++j) {
          const double x = v[j];
          const double y = v[j + h];
          v[j] = x + y;
          v[j + h] = x - y;
        }
      }
    }
    return;
  }
  const auto half = static_cast<long long>(n / 2);
  for (std::size_t h = 1; h < n; h <<= 1) {
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < half; ++p) {
      const auto i = static_cast<std::size_t>(p);
      const std::size_t j = (i / h) * 2 * h + (i % h);
      const double x = v[j];
      const double y = v[j + h];
      v[j] = x + y;
      v[j + h] = x - y;
    }
  }
}

linalg::Complex round_product_expectation(const linalg::ComplexMatrix& rho_ab,
                                          std::span<const linalg::ComplexMatrix> factors,
                                          std::span<const std::size_t> dims_a,
                                          std::span<const std::size_t> dims_b, Exec exec) {
  const std::size_t rounds = factors.size();
  if (dims_a.size() != rounds || dims_b.size() != rounds) {
    throw DimensionMismatch("round_product_expectation: one factor per round required");
  }
  std::size_t da = 1, db = 1;
  for (std::size_t i = 0; i < rounds; ++i) {
    const auto local = static_cast<Eigen::Index>(dims_a[i] * dims_b[i]);
    if (factors[i].rows() != local || factors[i].cols() != local) {
      throw DimensionMismatch("round_product_expectation: factor dimension mismatch");
    }
    da *= dims_a[i];
    db *= dims_b[i];
  }
  const std::size_t dim = da * db;
  if (static_cast<std::size_t>(rho_ab.rows()) != dim || rho_ab.rows() != rho_ab.cols()) {
    throw DimensionMismatch("round_product_expectation: state dimension mismatch");
  }

  // local[idx * rounds + i] = index of basis state idx inside A_i (x) B_i.
  std::vector<std::size_t> local(dim * rounds);
  {
    std::vector<std::size_t> stride_a(rounds, 1), stride_b(rounds, 1);
    for (std::size_t i = rounds; i-- > 1;) {
      stride_a[i - 1] = stride_a[i] * dims_a[i];
      stride_b[i - 1] = stride_b[i] * dims_b[i];
    }
    for (std::size_t idx = 0; idx < dim; ++idx) {
      const std::size_t ia = idx / db;
      const std::size_t ib = idx % db;
      for (std::size_t i = 0; i < rounds; ++i) {
        const std::size_t a = (ia / stride_a[i]) % dims_a[i];
        const std::size_t b = (ib / stride_b[i]) % dims_b[i];
        local[idx * rounds + i] = a * dims_b[i] + b;
      }
    }
  }

  // tr[rho O] = sum_{r,c} rho(r, c) O(c, r)
  std::vector<linalg::Complex> row_sum(dim);
  for_each_index(dim, exec, [&](std::size_t r) {
    const std::size_t* lr = &local[r * rounds];
    linalg::Complex acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const linalg::Complex rho_rc = rho_ab(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (rho_rc == 0.0) continue;
      const std::size_t* lc = &local[c * rounds];
      linalg::Complex op = 1.0;
      for (std::size_t i = 0; i < rounds && op != 0.0; ++i) {
        op *= factors[i](static_cast<Eigen::Index>(lc[i]), static_cast<Eigen::Index>(lr[i]));
      }
      acc += rho_rc * op;
    }
    row_sum[r] = acc;
  });
  linalg::Complex total = 0.0;
  for (const auto& v : row_sum) total += v;
  return total;
}

}  // namespace seedless::kernels

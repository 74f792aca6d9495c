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

// Data-parallel kernels. Every kernel takes an Exec policy: Exec::serial is
// the reference path kept for tests and benchmarks, Exec::parallel runs the
// same arithmetic under OpenMP. Reductions are gathered per work item and
// summed in index order, so both paths return bit-identical results for any
// thread count.

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>

#include <omp.h>

#include "seedless/linalg.hpp"

namespace seedless::kernels {

enum class Exec { serial, parallel };

/// Caps the OpenMP team size; n <= 0 restores the runtime default.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, count). Exceptions thrown by body are
/// captured and the first one is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  if (exec == Exec::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// In-place Walsh-Hadamard transform (unnormalised): on return
/// data[r] = sum_a data_in[a] (-1)^{popcount(a & r)}. Size must be a power of 2.
void fwht(std::span<double> data, Exec exec);

/// tr[rho (F_1 (x) ... (x) F_n)] where rho acts on A_1..A_n B_1..B_n and
/// F_i acts on A_i (x) B_i (A_i slow, B_i fast).
linalg::Complex round_product_expectation(const linalg::ComplexMatrix& rho_ab,
                                          std::span<const linalg::ComplexMatrix> factors,
                                          std::span<const std::size_t> dims_a,
                                          std::span<const std::size_t> dims_b, Exec exec);

}  // namespace seedless::kernels

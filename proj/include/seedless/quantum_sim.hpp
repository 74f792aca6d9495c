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

// Exact density-matrix model of the n-round extraction experiment with an
// adversary: the state on A_1..A_n B_1..B_n E, the classical-quantum output
// after Alice measures setting 0 in every round and applies g, its trace
// distance to the ideal output, and the two security bounds
//
//   XOR:    || rho_KE - u_K rho_E ||_1 <= tr[rho_AB prod_i S_i]
//   m-bit:  || rho_KE - u_K rho_E ||_1 <= n^2 sqrt(2)^{m-n} tr[rho_AB prod_i (1 + S_i)]

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "seedless/bell.hpp"
#include "seedless/extractor.hpp"
#include "seedless/kernels.hpp"
#include "seedless/linalg.hpp"
#include "seedless/rng.hpp"

namespace seedless::qsim {

using linalg::ComplexMatrix;

enum class Validation {
  full,        // Hermitian, unit trace, PSD (eigensolve)
  structural,  // Hermitian and unit trace only; caller vouches for positivity
};

struct TripartiteState {
  std::vector<std::size_t> dims_a;
  std::vector<std::size_t> dims_b;
  std::size_t dim_e = 1;
  ComplexMatrix rho;  // factor order A_1..A_n B_1..B_n E

  static TripartiteState make(std::vector<std::size_t> dims_a, std::vector<std::size_t> dims_b,
                              std::size_t dim_e, ComplexMatrix rho,
                              Validation validation = Validation::full);

  std::size_t n_rounds() const { return dims_a.size(); }
  std::size_t dim_a() const;
  std::size_t dim_b() const;
  std::size_t dim_ab() const { return dim_a() * dim_b(); }
  std::size_t dim() const { return dim_ab() * dim_e; }

  /// tr_E rho
  ComplexMatrix reduced_ab() const;
};

/// Per-outcome conditional operators on E, one per k in {0,1}^m.
struct ClassicalQuantumOutput {
  unsigned m_out = 0;
  std::vector<ComplexMatrix> blocks;

  /// sum_k blocks[k]
  ComplexMatrix rho_e() const;
};

/// block_k = sum_{a : g(a) = k} tr_{A B}[rho prod_i A_i(a_i|0)].
/// Requires g.n_in() == n_rounds, matching device dimensions and projective
/// Alice measurements.
ClassicalQuantumOutput build_rho_ke(const TripartiteState& state,
                                    std::span<const bell::RoundDevices> devices,
                                    const extract::ExtractorTable& g);

/// sum_k || block_k - 2^-m rho_E ||_1 (singular-value trace norms).
double trace_distance_to_ideal(const ClassicalQuantumOutput& out);

/// tr[rho_AB prod_i S_i(s)]
double theorem2_rhs(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                    double s, kernels::Exec exec = kernels::Exec::parallel);

/// n^2 sqrt(2)^{m-n} tr[rho_AB prod_i (1 + S_i(s))]. Throws
/// PreconditionViolation when m >= n or g fails certification.
double theorem3_rhs(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                    double s, const extract::ExtractorTable& g,
                    kernels::Exec exec = kernels::Exec::parallel);

enum class BoundKind { xor_extractor, mbit };

struct BoundReport {
  BoundKind kind = BoundKind::xor_extractor;
  double lhs = 0.0;
  double best_rhs = 0.0;
  double best_s = 0.0;
  double slack = 0.0;  // best_rhs - lhs
  bool pass = false;
};

/// Tolerance on lhs <= rhs.
inline constexpr double kBoundTolerance = 1e-8;

/// 64 points with 2 sqrt 2 - s log-spaced down to 1e-6.
std::vector<double> default_s_grid();

/// Trace distance of build_rho_ke(state, devices, g) against the minimum of
/// the applicable right-hand side over s_grid. XOR kind requires g to be the
/// parity table.
BoundReport verify_bound(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                         const extract::ExtractorTable& g, std::span<const double> s_grid,
                         BoundKind kind, kernels::Exec exec = kernels::Exec::parallel);

/// Kind chosen from g: parity tables use the XOR bound, anything else the m-bit bound.
BoundReport verify_bound(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                         const extract::ExtractorTable& g, std::span<const double> s_grid);

// Fixture generators. All use qubits for A_i and B_i.

/// Random A_rB_r state of rank dim_e (Ginibre), purified into E.
TripartiteState random_purified_fixture(Rng& rng, std::size_t n_rounds, std::size_t dim_e);

/// sqrt(1 - w) |Phi+>^n |0>_E + sqrt(w) |G> normalised, |G> a Gaussian vector on ABE.
TripartiteState noisy_bell_fixture(Rng& rng, std::size_t n_rounds, std::size_t dim_e, double w);

/// Full-rank Ginibre state on ABE.
TripartiteState random_mixed_fixture(Rng& rng, std::size_t n_rounds, std::size_t dim_e);

/// 2^-n sum_a |a><a|_A (x) |0><0|_B (x) |a><a|_E: Eve holds a copy of Alice's
/// Z-basis outcomes.
TripartiteState eve_copy_fixture(std::size_t n_rounds);

/// Round states rho_i on A_i B_i (x) ... with trivial E, reordered to A..B.
TripartiteState product_fixture(std::span<const ComplexMatrix> round_states);

/// Optimal qubit devices in every round.
std::vector<bell::RoundDevices> optimal_devices(std::size_t n_rounds);

struct Fixture {
  TripartiteState state;
  /// Per-round qubit angles {alice0, alice1, bob0, bob1}; empty when the file has none.
  std::vector<std::array<double, 4>> device_angles;

  std::vector<bell::RoundDevices> devices() const;
};

/// {nRounds, dims: {A, B, E}, rho: [[re, im], ...] row-major, devices?}
nlohmann::json fixture_to_json(const TripartiteState& state,
                               std::span<const std::array<double, 4>> device_angles = {});
/// Throws ParseError on malformed input and PreconditionViolation on an invalid state.
Fixture fixture_from_json(const nlohmann::json& j);

nlohmann::json bound_report_to_json(const BoundReport& report);

}  // namespace seedless::qsim

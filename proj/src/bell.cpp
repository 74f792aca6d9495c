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

#include "seedless/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "seedless/errors.hpp"
#include "seedless/random_ops.hpp"

namespace seedless::bell {

using linalg::Complex;
using linalg::identity;
using linalg::kron;

namespace {

constexpr double kCompletenessTol = 1e-12;
constexpr double kPositivityTol = 1e-12;
constexpr double kProjectorTol = 1e-10;
constexpr double kLemma2HypothesisTol = 1e-10;

}  // namespace

BinaryMeasurement BinaryMeasurement::from_elements(ComplexMatrix element0, ComplexMatrix element1,
                                                   bool projective) {
  if (element0.rows() != element0.cols() || element0.rows() != element1.rows() ||
      element1.rows() != element1.cols() || element0.rows() == 0) {
    throw DimensionMismatch("BinaryMeasurement: elements must be square with equal dimension");
  }
  const auto dim = static_cast<std::size_t>(element0.rows());
  const double completeness = (element0 + element1 - identity(dim)).cwiseAbs().maxCoeff();
  if (completeness > kCompletenessTol) {
    throw PreconditionViolation("BinaryMeasurement: elements do not sum to the identity");
  }
  for (const ComplexMatrix* e : {&element0, &element1}) {
    if (!linalg::is_hermitian(*e, kCompletenessTol)) {
      throw PreconditionViolation("BinaryMeasurement: element is not Hermitian");
    }
    if (linalg::min_eigenvalue(*e) < -kPositivityTol) {
      throw PreconditionViolation("BinaryMeasurement: element is not positive semidefinite");
    }
    if (projective && ((*e) * (*e) - *e).cwiseAbs().maxCoeff() > kProjectorTol) {
      throw PreconditionViolation("BinaryMeasurement: element flagged projective is not idempotent");
    }
  }
  return BinaryMeasurement(std::move(element0), std::move(element1), projective);
}

BinaryMeasurement BinaryMeasurement::qubit_xz(double theta) {
  const ComplexMatrix obs = std::cos(theta) * linalg::pauli_z() + std::sin(theta) * linalg::pauli_x();
  const ComplexMatrix id = identity(2);
  return BinaryMeasurement(0.5 * (id + obs), 0.5 * (id - obs), true);
}

RoundDevices RoundDevices::make(std::array<BinaryMeasurement, 2> alice,
                                std::array<BinaryMeasurement, 2> bob) {
  if (alice[0].dim() != alice[1].dim() || bob[0].dim() != bob[1].dim()) {
    throw DimensionMismatch("RoundDevices: both settings of a party must act on the same space");
  }
  const std::size_t da = alice[0].dim();
  const std::size_t db = bob[0].dim();
  return RoundDevices{da, db, std::move(alice), std::move(bob)};
}

RoundDevices qubit_devices(double alice0, double alice1, double bob0, double bob1) {
  return RoundDevices::make({BinaryMeasurement::qubit_xz(alice0), BinaryMeasurement::qubit_xz(alice1)},
                            {BinaryMeasurement::qubit_xz(bob0), BinaryMeasurement::qubit_xz(bob1)});
}

RoundDevices optimal_qubit_devices() {
  constexpr double pi = std::numbers::pi;
  return qubit_devices(0.0, pi / 2, pi / 4, -pi / 4);
}

RoundDevices random_qubit_devices(Rng& rng) {
  constexpr double two_pi = 2 * std::numbers::pi;
  const double a0 = rng.uniform(0, two_pi);
  const double a1 = rng.uniform(0, two_pi);
  const double b0 = rng.uniform(0, two_pi);
  const double b1 = rng.uniform(0, two_pi);
  return qubit_devices(a0, a1, b0, b1);
}

linalg::ComplexVector phi_plus() {
  linalg::ComplexVector v = linalg::ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::numbers::sqrt2;
  return v;
}

ComplexMatrix phi_plus_state() { return linalg::projector(phi_plus()); }

ComplexMatrix isotropic_state(double visibility) {
  return visibility * phi_plus_state() + (1.0 - visibility) * 0.25 * identity(4);
}

ComplexMatrix chsh_operator(const RoundDevices& devices) {
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(devices.dim()),
                                          static_cast<Eigen::Index>(devices.dim()));
  for (int x = 0; x < 2; ++x) {
    const ComplexMatrix ax = devices.alice[static_cast<std::size_t>(x)].observable();
    for (int y = 0; y < 2; ++y) {
      const double sign = (x & y) ? -1.0 : 1.0;
      out += sign * kron(ax, devices.bob[static_cast<std::size_t>(y)].observable());
    }
  }
  return out;
}

double chsh_value(const ComplexMatrix& state, const RoundDevices& devices) {
  if (state.rows() != state.cols() || static_cast<std::size_t>(state.rows()) != devices.dim()) {
    throw DimensionMismatch("chsh_value: state dimension " + std::to_string(state.rows()) +
                            " does not match devices " + std::to_string(devices.dim()));
  }
  return linalg::trace_of_product(state, chsh_operator(devices)).real();
}

double mu_of(double s) { return 2.0 / std::sqrt(2.0 - s * s / 4.0); }
double nu_of(double s) { return (s / 4.0) / std::sqrt(2.0 - s * s / 4.0); }

ShiftedChshParams ShiftedChshParams::at(double s) {
  if (!(s >= 2.0 - kSClampMargin && s <= kTsirelson + kSClampMargin)) {
    throw PreconditionViolation("shifted CHSH parameter s = " + std::to_string(s) +
                                " lies outside (2, 2 sqrt 2)");
  }
  const double clamped = std::clamp(s, kSMin, kSMax);
  return ShiftedChshParams(clamped, mu_of(clamped), nu_of(clamped));
}

ComplexMatrix shifted_operator(double mu, double nu, const RoundDevices& devices) {
  ComplexMatrix s = mu * identity(devices.dim()) - nu * chsh_operator(devices);
  return 0.5 * (s + s.adjoint());
}

ComplexMatrix shifted_chsh_operator(const ShiftedChshParams& params, const RoundDevices& devices) {
  return shifted_operator(params.mu(), params.nu(), devices);
}

ComplexMatrix predictability_operator(const RoundDevices& devices) {
  return kron(devices.alice[0].observable(), identity(devices.dim_b));
}

Theorem1Report check_predictability_inequality(const ComplexMatrix& shifted,
                                               const RoundDevices& devices) {
  if (static_cast<std::size_t>(shifted.rows()) != devices.dim()) {
    throw DimensionMismatch("check_predictability_inequality: operator dimension");
  }
  const ComplexMatrix c = predictability_operator(devices);
  Theorem1Report report;
  report.min_eig_plus = linalg::min_eigenvalue(shifted - c);
  report.min_eig_minus = linalg::min_eigenvalue(shifted + c);
  report.pass = report.min_eig_plus >= -kPsdTolerance && report.min_eig_minus >= -kPsdTolerance;
  return report;
}

Theorem1Report verify_theorem1(const ShiftedChshParams& params, const RoundDevices& devices) {
  if (!devices.projective()) {
    throw PreconditionViolation("verify_theorem1: devices must be projective");
  }
  return check_predictability_inequality(shifted_chsh_operator(params, devices), devices);
}

Theorem1Sweep sweep_theorem1(std::span<const RoundDevices> devices, std::span<const double> s_grid,
                             kernels::Exec exec) {
  const std::size_t cells = devices.size() * s_grid.size();
  std::vector<double> worst(cells);
  kernels::for_each_index(cells, exec, [&](std::size_t cell) {
    const auto& dev = devices[cell / s_grid.size()];
    const auto report = verify_theorem1(ShiftedChshParams::at(s_grid[cell % s_grid.size()]), dev);
    worst[cell] = std::min(report.min_eig_plus, report.min_eig_minus);
  });
  Theorem1Sweep sweep;
  sweep.cases = cells;
  sweep.worst_min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (worst[cell] < -kPsdTolerance) ++sweep.failures;
    if (worst[cell] < sweep.worst_min_eig) {
      sweep.worst_min_eig = worst[cell];
      sweep.worst_device = cell / s_grid.size();
      sweep.worst_s = s_grid[cell % s_grid.size()];
    }
  }
  return sweep;
}

std::vector<double> clamped_s_grid(std::size_t k) {
  std::vector<double> grid(k);
  if (k == 1) {
    grid[0] = 0.5 * (kSMin + kSMax);
    return grid;
  }
  for (std::size_t i = 0; i < k; ++i) {
    grid[i] = kSMin + (kSMax - kSMin) * static_cast<double>(i) / static_cast<double>(k - 1);
  }
  return grid;
}

std::vector<double> tsirelson_log_grid(std::size_t k, double min_gap) {
  min_gap = std::max(min_gap, kSClampMargin);
  const double max_gap = kTsirelson - kSMin;
  std::vector<double> grid(k);
  if (k == 1) {
    grid[0] = kTsirelson - min_gap;
    return grid;
  }
  const double lo = std::log(min_gap);
  const double hi = std::log(max_gap);
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k - 1);
    grid[i] = std::clamp(kTsirelson - std::exp(hi + (lo - hi) * t), kSMin, kSMax);
  }
  return grid;
}

Lemma2Report verify_lemma2(std::span<const Lemma2Factor> pairs) {
  if (pairs.empty()) throw PreconditionViolation("verify_lemma2: need at least one factor");
  std::size_t total = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.c.rows() != p.c.cols() || p.s.rows() != p.s.cols() || p.c.rows() != p.s.rows()) {
      throw DimensionMismatch("verify_lemma2: C_i and S_i must be square and equal-sized");
    }
    if (!linalg::is_hermitian(p.c, 1e-12) || !linalg::is_hermitian(p.s, 1e-12)) {
      throw PreconditionViolation("verify_lemma2: factor " + std::to_string(i) + " is not Hermitian");
    }
    if (linalg::min_eigenvalue(p.s - p.c) < -kLemma2HypothesisTol ||
        linalg::min_eigenvalue(p.s + p.c) < -kLemma2HypothesisTol) {
      throw PreconditionViolation("verify_lemma2: factor " + std::to_string(i) +
                                  " violates the hypothesis +-C_i <= S_i");
    }
    total *= static_cast<std::size_t>(p.c.rows());
    if (total > linalg::kMaxDimension) {
      throw PreconditionViolation("verify_lemma2: product dimension exceeds 4096");
    }
  }
  ComplexMatrix prod_c = ComplexMatrix::Ones(1, 1);
  ComplexMatrix prod_s = ComplexMatrix::Ones(1, 1);
  for (const auto& p : pairs) {
    prod_c = kron(prod_c, p.c);
    prod_s = kron(prod_s, p.s);
  }
  Lemma2Report report;
  report.min_eig_plus = linalg::min_eigenvalue(prod_s + prod_c);
  report.min_eig_minus = linalg::min_eigenvalue(prod_s - prod_c);
  report.pass = report.min_eig_plus >= -kPsdTolerance && report.min_eig_minus >= -kPsdTolerance;
  return report;
}

Lemma2Factor random_lemma2_factor(Rng& rng, std::size_t dim) {
  Lemma2Factor f;
  f.c = random::random_hermitian(rng, dim, -1.0, 1.0);
  const double eps = rng.uniform(0.25, 1.0);
  f.s = f.c * f.c + eps * identity(dim);
  f.s = 0.5 * (f.s + f.s.adjoint());
  return f;
}

}  // namespace seedless::bell

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

// Two-outcome measurements, the CHSH functional and the shifted CHSH operator
// family S = mu_s 1 - nu_s sum_{xyab} (-1)^{a+b+xy} A(a|x) B(b|y), together
// with numerical checks of the operator inequalities +-[A(0|0) - A(1|0)] <= S
// and of their tensor-product extension.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "seedless/kernels.hpp"
#include "seedless/linalg.hpp"
#include "seedless/rng.hpp"

namespace seedless::bell {

using linalg::ComplexMatrix;

inline constexpr double kTsirelson = 2.8284271247461900976;  // 2 sqrt(2)
/// Sweeps over s stay inside [kSMin, kSMax]; mu_s and nu_s diverge at 2 sqrt 2.
inline constexpr double kSClampMargin = 1e-6;
inline constexpr double kSMin = 2.0 + kSClampMargin;
inline constexpr double kSMax = kTsirelson - kSClampMargin;
/// Semidefiniteness threshold for dense eigensolves.
inline constexpr double kPsdTolerance = 1e-9;

/// POVM {element(0), element(1)} on a dim-dimensional system.
class BinaryMeasurement {
 public:
  /// Validates completeness and positivity (and idempotence when projective).
  static BinaryMeasurement from_elements(ComplexMatrix element0, ComplexMatrix element1,
                                         bool projective);

  /// Projective qubit measurement of cos(theta) Z + sin(theta) X; outcome 0 is
  /// the +1 eigenspace.
  static BinaryMeasurement qubit_xz(double theta);

  std::size_t dim() const { return static_cast<std::size_t>(elements_[0].rows()); }
  const ComplexMatrix& element(int outcome) const { return elements_.at(static_cast<std::size_t>(outcome)); }
  bool projective() const { return projective_; }

  /// element(0) - element(1)
  ComplexMatrix observable() const { return elements_[0] - elements_[1]; }

 private:
  BinaryMeasurement(ComplexMatrix e0, ComplexMatrix e1, bool projective)
      : elements_{std::move(e0), std::move(e1)}, projective_(projective) {}

  std::array<ComplexMatrix, 2> elements_;
  bool projective_;
};

/// Alice's and Bob's measurements for one round (settings 0 and 1 each).
struct RoundDevices {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::array<BinaryMeasurement, 2> alice;
  std::array<BinaryMeasurement, 2> bob;

  static RoundDevices make(std::array<BinaryMeasurement, 2> alice,
                           std::array<BinaryMeasurement, 2> bob);

  bool alice_projective() const { return alice[0].projective() && alice[1].projective(); }
  bool projective() const {
    return alice_projective() && bob[0].projective() && bob[1].projective();
  }
  std::size_t dim() const { return dim_a * dim_b; }
};

/// Projective X-Z-plane qubit devices from four observable angles.
RoundDevices qubit_devices(double alice0, double alice1, double bob0, double bob1);

/// Alice {0, pi/2}, Bob {pi/4, -pi/4}: reaches CHSH = 2 sqrt 2 on |Phi+>.
RoundDevices optimal_qubit_devices();

/// Angles drawn uniformly from [0, 2 pi).
RoundDevices random_qubit_devices(Rng& rng);

/// (|00> + |11>)/sqrt 2 and its density matrix.
linalg::ComplexVector phi_plus();
ComplexMatrix phi_plus_state();

/// v |Phi+><Phi+| + (1 - v) 1/4; CHSH = 2 sqrt(2) v with optimal devices.
ComplexMatrix isotropic_state(double visibility);

/// sum_{xy} (-1)^{xy} A_x (x) B_y with A_x = A(0|x) - A(1|x).
ComplexMatrix chsh_operator(const RoundDevices& devices);

/// sum_{x,y,a,b} tr[rho A(a|x) B(b|y)] (-1)^{a+b+xy}
double chsh_value(const ComplexMatrix& state, const RoundDevices& devices);

/// The (s, mu_s, nu_s) triple of the shifted CHSH operator.
class ShiftedChshParams {
 public:
  /// Accepts s within kSClampMargin of [2, 2 sqrt 2] and clamps it into
  /// [kSMin, kSMax]; anything farther out throws PreconditionViolation.
  static ShiftedChshParams at(double s);

  double s() const { return s_; }
  double mu() const { return mu_; }
  double nu() const { return nu_; }

  /// mu_s - nu_s * chsh, the expectation of S on a state with that CHSH value.
  double expectation_for_chsh(double chsh) const { return mu_ - nu_ * chsh; }

 private:
  ShiftedChshParams(double s, double mu, double nu) : s_(s), mu_(mu), nu_(nu) {}
  double s_, mu_, nu_;
};

double mu_of(double s);
double nu_of(double s);

ComplexMatrix shifted_chsh_operator(const ShiftedChshParams& params, const RoundDevices& devices);

/// mu 1 - nu CHSH-operator with arbitrary coefficients.
ComplexMatrix shifted_operator(double mu, double nu, const RoundDevices& devices);

/// A(0|0) - A(1|0) on A (x) B.
ComplexMatrix predictability_operator(const RoundDevices& devices);

struct Theorem1Report {
  double min_eig_plus = 0.0;   // lambda_min(S - C (x) 1)
  double min_eig_minus = 0.0;  // lambda_min(S + C (x) 1)
  bool pass = false;
};

/// Eigenvalue check of +-[A(0|0) - A(1|0)] (x) 1 <= S for a given S.
Theorem1Report check_predictability_inequality(const ComplexMatrix& shifted,
                                               const RoundDevices& devices);

/// check_predictability_inequality on the shifted CHSH operator at params;
/// devices must be projective.
Theorem1Report verify_theorem1(const ShiftedChshParams& params, const RoundDevices& devices);

struct Theorem1Sweep {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_min_eig = 0.0;
  double worst_s = 0.0;
  std::size_t worst_device = 0;
};

/// verify_theorem1 over every (device, s) pair.
Theorem1Sweep sweep_theorem1(std::span<const RoundDevices> devices, std::span<const double> s_grid,
                             kernels::Exec exec = kernels::Exec::parallel);

/// k points evenly spaced on [kSMin, kSMax].
std::vector<double> clamped_s_grid(std::size_t k);

/// k points with 2 sqrt 2 - s log-spaced from (kTsirelson - kSMin) down to
/// min_gap (>= kSClampMargin).
std::vector<double> tsirelson_log_grid(std::size_t k, double min_gap = kSClampMargin);

struct Lemma2Factor {
  ComplexMatrix c;
  ComplexMatrix s;
};

struct Lemma2Report {
  double min_eig_plus = 0.0;   // lambda_min(S_1 (x) ... + C_1 (x) ...)
  double min_eig_minus = 0.0;  // lambda_min(S_1 (x) ... - C_1 (x) ...)
  bool pass = false;
};

/// Checks +-(C_1 (x) ... (x) C_k) <= S_1 (x) ... (x) S_k. Throws
/// PreconditionViolation when some pair violates +-C_i <= S_i (to 1e-10) or
/// the product dimension exceeds linalg::kMaxDimension.
Lemma2Report verify_lemma2(std::span<const Lemma2Factor> pairs);

/// C random Hermitian with spectrum in [-1, 1], S = C^2 + eps 1 with
/// eps uniform in [1/4, 1], which makes S -+ C = (C -+ 1/2)^2 + (eps - 1/4) 1 >= 0.
Lemma2Factor random_lemma2_factor(Rng& rng, std::size_t dim);

}  // namespace seedless::bell

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

// Output-length maximisation over (s, alpha0, alpha1, beta) subject to
//
//   p_r sqrt(2)^{beta-1} K_z(s) + p_e sqrt(2)^{alpha_z} = 1,   z = 0, 1
//   K_z(s) = c + mu_s -/+ 4 nu_s,   c = 0 (XOR), 1 (m-bit)
//
// The alphas are eliminated exactly; the remaining search runs over s and
// t = logit(w) with w = p_r sqrt(2)^{beta-1} K_1(s) in (0, 1), which is the
// whole feasible region since K_0 < K_1.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "seedless/kernels.hpp"

namespace seedless::rates {

enum class Mode { xor_bit, mbit };

const char* mode_name(Mode mode);
/// "xor" or "mbit"; throws PreconditionViolation otherwise.
Mode parse_mode(const char* name);

/// Objective = estimation * (alpha0 q0 + alpha1 q1) + raw * beta.
/// Defaults to (p_e, p_r), the per-round asymptotic form.
struct Weights {
  double estimation = 0.0;
  double raw = 0.0;
};

struct RateProblem {
  Mode mode = Mode::xor_bit;
  double pE = 0.5;
  double q0 = 0.75;
  std::optional<Weights> weights;

  Weights effective_weights() const;
};

struct RateSolution {
  double s = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double beta = 0.0;
  double objective = 0.0;
  bool feasible = false;
};

/// Range of t = logit(w) searched by solve.
inline constexpr double kLogitRange = 40.0;
inline constexpr std::size_t kCoarseGrid = 128;
inline constexpr int kRefinePasses = 3;
inline constexpr double kFirstBracketCells = 16.0;

/// K_z(s) for the given mode.
double k_coefficient(Mode mode, double s, int z);

/// The point at (s, t) with alphas from the constraints; objective computed from scratch.
RateSolution evaluate(const RateProblem& problem, double s, double t);

/// Same point expressed through beta (no logit): requires the bracket arguments to be positive.
RateSolution evaluate_beta(const RateProblem& problem, double s, double beta);

/// max |p_r sqrt(2)^{beta-1} K_z + p_e sqrt(2)^{alpha_z} - 1| over z.
double constraint_residual(const RateProblem& problem, const RateSolution& sol);

/// Best point of the coarse kCoarseGrid^2 grid alone.
RateSolution solve_coarse(const RateProblem& problem);

/// Coarse grid followed by kRefinePasses passes of nested golden-section search.
RateSolution solve(const RateProblem& problem);

inline double chsh_from_q0(double q0) { return 8.0 * q0 - 4.0; }
inline double q0_from_chsh(double chsh) { return (chsh + 4.0) / 8.0; }
/// (2 + sqrt 2) / 4
inline constexpr double kQ0Tsirelson = 0.85355339059327376220;

struct MinChshPoint {
  double pE = 0.0;
  double min_chsh = 0.0;  // NaN when there is no yield
  bool yield = false;
};

/// Smallest CHSH = 8 q0 - 4 with solve(...).objective >= 0, by bisection on
/// q0 in [0.75, (2 + sqrt 2)/4] to 1e-5.
MinChshPoint min_chsh_at(Mode mode, double pE);
std::vector<MinChshPoint> min_chsh_curve(Mode mode, std::span<const double> pe_grid,
                                         kernels::Exec exec = kernels::Exec::parallel);

/// p_e range searched by the rate sweeps.
inline constexpr double kPeMin = 1e-4;
inline constexpr double kPeMax = 1.0 - 1e-4;

/// Rates count output bits, so r_ext and r_eff are clamped at 0; the raw
/// maxima are kept alongside.
struct RatePoint {
  double chsh = 0.0;
  double r_ext = 0.0;      // max(0, max over p_e of objective / p_r)
  double r_eff = 0.0;      // max(0, max over p_e of objective)
  double raw_ext = 0.0;
  double raw_eff = 0.0;
  double pe_star = 0.0;    // maximiser of r_ext
  double pe_eff_star = 0.0;
  RateSolution at_ext;     // solution at pe_star
};

RatePoint rate_at(Mode mode, double chsh);
std::vector<RatePoint> rate_curves(Mode mode, std::span<const double> chsh_grid,
                                   kernels::Exec exec = kernels::Exec::parallel);

/// Asymptotic extraction rate (objective / p_r) at fixed (p_e, q0).
double extraction_rate(Mode mode, double pE, double q0);

/// Evenly spaced grids used by the CLI sweeps.
std::vector<double> pe_grid(std::size_t size);    // [0.5, 0.99]
std::vector<double> chsh_grid(std::size_t size);  // interior of (2, 2 sqrt 2)

/// Header + rows, values at 12 significant digits.
void write_min_chsh_csv(std::ostream& out, std::span<const MinChshPoint> points);
void write_rates_csv(std::ostream& out, std::span<const RatePoint> points);

}  // namespace seedless::rates

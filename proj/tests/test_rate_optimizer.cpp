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

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seedless/bell.hpp"
#include "seedless/errors.hpp"
#include "seedless/rate_optimizer.hpp"

using namespace seedless;
using namespace seedless::rates;

namespace {

// Best value of the (s, t) objective on an n x n grid over the same domain
// as solve.
double reference_grid(const RateProblem& p, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = bell::kSMin + (bell::kSMax - bell::kSMin) * static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = -kLogitRange + 2.0 * kLogitRange * static_cast<double>(j) / static_cast<double>(n - 1);
      best = std::max(best, evaluate(p, s, t).objective);
    }
  }
  return best;
}

std::vector<RateProblem> sweep_problems() {
  std::vector<RateProblem> out;
  for (Mode mode : {Mode::xor_bit, Mode::mbit}) {
    for (double pE : {0.05, 0.3, 0.5, 0.74, 0.9, 0.98, 0.999}) {
      for (double q0 : {0.0, 0.5, 0.75, 0.8, 0.84, kQ0Tsirelson, 1.0}) {
        out.push_back({mode, pE, q0, std::nullopt});
      }
    }
  }
  return out;
}

}  // namespace

TEST(RateSolve, XorPositiveAtTsirelsonHighPe) {
  const auto sol = solve({Mode::xor_bit, 0.9, kQ0Tsirelson, std::nullopt});
  EXPECT_TRUE(sol.feasible);
  EXPECT_GT(sol.objective, 0.0);
}

TEST(RateSolve, XorNegativeAtHalf) {
  for (double q0 : {0.5, 0.75, 0.8, kQ0Tsirelson}) {
    EXPECT_LT(solve({Mode::xor_bit, 0.5, q0, std::nullopt}).objective, 0.0) << q0;
  }
}

TEST(RateSolve, ConstraintResiduals) {
  for (const auto& p : sweep_problems()) {
    const auto sol = solve(p);
    ASSERT_TRUE(sol.feasible);
    EXPECT_LE(constraint_residual(p, sol), 1e-10);
    EXPECT_GT(std::pow(2.0, 0.5 * sol.alpha0), 0.0);
    EXPECT_GT(std::pow(2.0, 0.5 * sol.alpha1), 0.0);
  }
}

TEST(RateSolve, ObjectiveReproducibleFromScratch) {
  // Rebuilding alpha from beta cancels in 1 - p_r u K_z; only well-conditioned
  // solutions (both brackets >= 2^-10 p_e) are compared.
  int checked = 0;
  for (const auto& p : sweep_problems()) {
    const auto sol = solve(p);
    if (std::min(sol.alpha0, sol.alpha1) < -20.0) continue;
    ++checked;
    const auto again = evaluate_beta(p, sol.s, sol.beta);
    EXPECT_NEAR(again.objective, sol.objective, 1e-9 * std::max(1.0, std::abs(sol.objective)));
    EXPECT_NEAR(again.alpha0, sol.alpha0, 1e-9);
    EXPECT_NEAR(again.alpha1, sol.alpha1, 1e-9);
  }
  EXPECT_GT(checked, 10);
}

TEST(RateSolve, RefinementDominatesCoarseGrid) {
  for (const auto& p : sweep_problems()) {
    EXPECT_GE(solve(p).objective, solve_coarse(p).objective);
  }
}

TEST(RateSolve, MatchesClosedFormOracle) {
  for (const auto& p : sweep_problems()) {
    const double oracle_value = oracle::closed_form_max(p);
    EXPECT_GE(solve(p).objective, oracle_value - 1e-6)
        << mode_name(p.mode) << " pE " << p.pE << " q0 " << p.q0;
  }
}

TEST(RateSolve, WithinMicroOfReferenceGrid) {
  const std::vector<RateProblem> probes{{Mode::xor_bit, 0.9, kQ0Tsirelson, std::nullopt},
                                        {Mode::xor_bit, 0.74, 0.7501, std::nullopt},
                                        {Mode::mbit, 0.98, kQ0Tsirelson, std::nullopt},
                                        {Mode::mbit, 0.6, 0.8, std::nullopt}};
  for (const auto& p : probes) {
    EXPECT_GE(solve(p).objective, reference_grid(p, 4096) - 1e-6);
  }
}

TEST(RateSolve, CustomWeights) {
  // Scaling both weights scales the optimum.
  const RateProblem base{Mode::mbit, 0.9, 0.84, std::nullopt};
  RateProblem scaled = base;
  scaled.weights = Weights{0.9 * 1000.0, 0.1 * 1000.0};
  EXPECT_NEAR(solve(scaled).objective, 1000.0 * solve(base).objective, 1e-6);
  EXPECT_GE(solve(RateProblem{Mode::mbit, 0.9, 0.84, Weights{90000, 10000}}).objective,
            oracle::closed_form_max({Mode::mbit, 0.9, 0.84, Weights{90000, 10000}}) - 1e-4);
}

TEST(RateSolve, InvalidProblems) {
  EXPECT_THROW(solve({Mode::xor_bit, 0.0, 0.8, std::nullopt}), PreconditionViolation);
  EXPECT_THROW(solve({Mode::xor_bit, 1.0, 0.8, std::nullopt}), PreconditionViolation);
  EXPECT_THROW(solve({Mode::xor_bit, 0.5, 1.2, std::nullopt}), PreconditionViolation);
  EXPECT_THROW(solve({Mode::xor_bit, 0.5, 0.8, Weights{0.0, 0.0}}), PreconditionViolation);
}

TEST(RateSolve, KCoefficientSigns) {
  for (double s : bell::clamped_s_grid(20)) {
    EXPECT_LE(k_coefficient(Mode::xor_bit, s, 0), 1e-12);
    EXPECT_NEAR(k_coefficient(Mode::xor_bit, s, 0), (2.0 - s) / std::sqrt(2.0 - s * s / 4.0), 1e-12);
    EXPECT_GT(k_coefficient(Mode::xor_bit, s, 1), 0.0);
    EXPECT_NEAR(k_coefficient(Mode::mbit, s, 1), 1.0 + k_coefficient(Mode::xor_bit, s, 1), 1e-12);
  }
}

TEST(RateSolve, MonotoneInQ0) {
  double previous = -1e300;
  for (double q0 = 0.70; q0 <= kQ0Tsirelson; q0 += 0.01) {
    const double v = solve({Mode::xor_bit, 0.8, q0, std::nullopt}).objective;
    EXPECT_GE(v, previous - 1e-9);
    previous = v;
  }
}

TEST(MinChsh, Anchors) {
  const auto at074 = min_chsh_at(Mode::xor_bit, 0.74);
  EXPECT_TRUE(at074.yield);
  EXPECT_LE(at074.min_chsh, 2.01);
  EXPECT_FALSE(min_chsh_at(Mode::xor_bit, 0.5).yield);
  EXPECT_TRUE(std::isnan(min_chsh_at(Mode::xor_bit, 0.5).min_chsh));
  const auto at099 = min_chsh_at(Mode::xor_bit, 0.99);
  EXPECT_LE(at099.min_chsh, at074.min_chsh);
}

TEST(MinChsh, BisectionBracketsThreshold) {
  const auto p = min_chsh_at(Mode::xor_bit, 0.6);
  ASSERT_TRUE(p.yield);
  EXPECT_GT(p.min_chsh, 2.0);
  const double q0 = q0_from_chsh(p.min_chsh);
  EXPECT_GE(solve({Mode::xor_bit, 0.6, q0, std::nullopt}).objective, 0.0);
  EXPECT_LT(solve({Mode::xor_bit, 0.6, q0 - 2e-5, std::nullopt}).objective, 0.0);
}

TEST(MinChsh, CurveSerialParallelAgree) {
  const auto grid = pe_grid(8);
  const auto a = min_chsh_curve(Mode::xor_bit, grid, kernels::Exec::serial);
  const auto b = min_chsh_curve(Mode::xor_bit, grid, kernels::Exec::parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].yield, b[i].yield);
    if (a[i].yield) {
      EXPECT_EQ(a[i].min_chsh, b[i].min_chsh);
    }
  }
}

TEST(Rates, ExtractionRateApproachesClosedFormLimit) {
  // As p_e -> 1 the m-bit rate tends to 1 - 2 log2(1 + sqrt(2 - c^2/4)).
  const double c = 2.82;
  const double limit = 1.0 - 2.0 * std::log2(1.0 + std::sqrt(2.0 - c * c / 4.0));
  const auto point = rate_at(Mode::mbit, c);
  EXPECT_LE(point.raw_ext, limit + 1e-6);
  EXPECT_GT(point.raw_ext, limit - 0.05);
}

TEST(Rates, MonotoneInChsh) {
  const std::vector<double> grid{2.3, 2.5, 2.7, 2.8, 2.82};
  const auto points = rate_curves(Mode::mbit, grid);
  for (std::size_t i = 1; i < points.size(); ++i) {
    EXPECT_GE(points[i].r_ext, points[i - 1].r_ext);
    EXPECT_GE(points[i].raw_ext, points[i - 1].raw_ext);
  }
}

TEST(Rates, ClampedAtZeroWithoutYield) {
  const auto p = rate_at(Mode::mbit, 2.05);
  EXPECT_LT(p.raw_ext, 0.0);
  EXPECT_EQ(p.r_ext, 0.0);
  EXPECT_EQ(p.r_eff, 0.0);
}

TEST(Rates, RejectsOutOfRangeChsh) {
  EXPECT_THROW(rate_at(Mode::mbit, 2.0), PreconditionViolation);
  EXPECT_THROW(rate_at(Mode::mbit, 2.9), PreconditionViolation);
}

TEST(Csv, HeadersAndFormatting) {
  std::ostringstream a;
  const std::vector<MinChshPoint> mp{{0.5, std::numeric_limits<double>::quiet_NaN(), false},
                                     {0.74, 2.0, true}};
  write_min_chsh_csv(a, mp);
  EXPECT_EQ(a.str(), "pE,minCHSH,feasible\n0.5,nan,0\n0.74,2,1\n");

  std::ostringstream b;
  RatePoint rp;
  rp.chsh = 2.5;
  rp.r_ext = 1.0 / 3.0;
  write_rates_csv(b, std::vector<RatePoint>{rp});
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')),
            "chsh,rExt,rEff,pE_star,s_star,beta_star,alpha0,alpha1");
  EXPECT_NE(b.str().find("0.333333333333,"), std::string::npos);
}

TEST(Grids, PeAndChsh) {
  const auto pe = pe_grid(50);
  EXPECT_DOUBLE_EQ(pe.front(), 0.5);
  EXPECT_DOUBLE_EQ(pe.back(), 0.99);
  const auto c = chsh_grid(10);
  EXPECT_GT(c.front(), 2.0);
  EXPECT_LT(c.back(), bell::kTsirelson);
}

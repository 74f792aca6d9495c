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

#include "seedless/rate_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <ostream>
#include <string>

#include "seedless/bell.hpp"
#include "seedless/errors.hpp"

namespace seedless::rates {

namespace {

constexpr double kInvPhi = 0.61803398874989484820;  // 1 / golden ratio

void validate(const RateProblem& p) {
  if (!(p.pE > 0.0 && p.pE < 1.0)) throw PreconditionViolation("pE must lie in (0, 1)");
  if (!(p.q0 >= 0.0 && p.q0 <= 1.0)) throw PreconditionViolation("q0 must lie in [0, 1]");
  const Weights w = p.effective_weights();
  if (!(w.estimation >= 0.0 && w.raw >= 0.0) || (w.estimation == 0.0 && w.raw == 0.0)) {
    throw PreconditionViolation("objective weights must be non-negative and not both zero");
  }
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

RateSolution infeasible() {
  RateSolution out;
  out.objective = -std::numeric_limits<double>::infinity();
  out.feasible = false;
  return out;
}

// Maximises f on [lo, hi]; returns the argmax.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

bool better(const RateSolution& a, const RateSolution& b) {
  return a.feasible && (!b.feasible || a.objective > b.objective);
}

std::string fmt12(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

const char* mode_name(Mode mode) { return mode == Mode::xor_bit ? "xor" : "mbit"; }

Mode parse_mode(const char* name) {
  if (std::strcmp(name, "xor") == 0) return Mode::xor_bit;
  if (std::strcmp(name, "mbit") == 0) return Mode::mbit;
  throw PreconditionViolation(std::string("unknown mode '") + name + "'");
}

Weights RateProblem::effective_weights() const {
  return weights.value_or(Weights{pE, 1.0 - pE});
}

double k_coefficient(Mode mode, double s, int z) {
  const auto params = bell::ShiftedChshParams::at(s);
  const double c = mode == Mode::mbit ? 1.0 : 0.0;
  return c + params.mu() + (z == 0 ? -4.0 : 4.0) * params.nu();
}

RateSolution evaluate(const RateProblem& problem, double s, double t) {
  validate(problem);
  const auto params = bell::ShiftedChshParams::at(s);
  const double c = problem.mode == Mode::mbit ? 1.0 : 0.0;
  const double k1 = c + params.mu() + 4.0 * params.nu();
  const double pr = 1.0 - problem.pE;
  const double w = sigmoid(t);
  const double one_minus_w = sigmoid(-t);
  // 1 - w K_0 / K_1 = (1 - w) + w (K_1 - K_0) / K_1
  const double bracket0 = one_minus_w + w * (8.0 * params.nu() / k1);
  const double bracket1 = one_minus_w;
  if (!(w > 0.0 && bracket0 > 0.0 && bracket1 > 0.0)) return infeasible();

  RateSolution out;
  out.s = params.s();
  out.beta = 1.0 + 2.0 * std::log2(w / (pr * k1));
  out.alpha0 = 2.0 * std::log2(bracket0 / problem.pE);
  out.alpha1 = 2.0 * std::log2(bracket1 / problem.pE);
  const Weights wt = problem.effective_weights();
  out.objective = wt.estimation * (out.alpha0 * problem.q0 + out.alpha1 * (1.0 - problem.q0)) +
                  wt.raw * out.beta;
  out.feasible = std::isfinite(out.objective);
  return out;
}

RateSolution evaluate_beta(const RateProblem& problem, double s, double beta) {
  validate(problem);
  const auto params = bell::ShiftedChshParams::at(s);
  const double pr = 1.0 - problem.pE;
  const double u = std::pow(2.0, 0.5 * (beta - 1.0));
  const double b0 = 1.0 - pr * u * k_coefficient(problem.mode, params.s(), 0);
  const double b1 = 1.0 - pr * u * k_coefficient(problem.mode, params.s(), 1);
  if (!(b0 > 0.0 && b1 > 0.0)) return infeasible();
  RateSolution out;
  out.s = params.s();
  out.beta = beta;
  out.alpha0 = 2.0 * std::log2(b0 / problem.pE);
  out.alpha1 = 2.0 * std::log2(b1 / problem.pE);
  const Weights wt = problem.effective_weights();
  out.objective = wt.estimation * (out.alpha0 * problem.q0 + out.alpha1 * (1.0 - problem.q0)) +
                  wt.raw * out.beta;
  out.feasible = std::isfinite(out.objective);
  return out;
}

double constraint_residual(const RateProblem& problem, const RateSolution& sol) {
  const double pr = 1.0 - problem.pE;
  const double u = std::pow(2.0, 0.5 * (sol.beta - 1.0));
  double worst = 0.0;
  for (int z = 0; z < 2; ++z) {
    const double alpha = z == 0 ? sol.alpha0 : sol.alpha1;
    const double lhs = pr * u * k_coefficient(problem.mode, sol.s, z) +
                       problem.pE * std::pow(2.0, 0.5 * alpha);
    worst = std::max(worst, std::abs(lhs - 1.0));
  }
  return worst;
}

RateSolution solve_coarse(const RateProblem& problem) {
  validate(problem);
  RateSolution best = infeasible();
  const double ds = (bell::kSMax - bell::kSMin) / static_cast<double>(kCoarseGrid - 1);
  const double dt = 2.0 * kLogitRange / static_cast<double>(kCoarseGrid - 1);
  for (std::size_t i = 0; i < kCoarseGrid; ++i) {
    const double s = bell::kSMin + ds * static_cast<double>(i);
    for (std::size_t j = 0; j < kCoarseGrid; ++j) {
      const double t = -kLogitRange + dt * static_cast<double>(j);
      const RateSolution cand = evaluate(problem, s, t);
      if (better(cand, best)) best = cand;
    }
  }
  return best;
}

RateSolution solve(const RateProblem& problem) {
  RateSolution best = solve_coarse(problem);
  if (!best.feasible) return best;

  // Inner search: full t range (unimodal in t for fixed s). Outer: s bracket
  // around the incumbent, halved every pass.
  const auto inner = [&](double s) {
    const double t = golden_max(
        [&](double tt) { return evaluate(problem, s, tt).objective; }, -kLogitRange,
        kLogitRange, 1e-10);
    return evaluate(problem, s, t);
  };
  // The t discretisation of the grid shifts its argmax in s by a few cells,
  // so the first bracket spans kFirstBracketCells cells each side.
  double half_width = kFirstBracketCells * (bell::kSMax - bell::kSMin) /
                      static_cast<double>(kCoarseGrid - 1);
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    const double lo = std::max(bell::kSMin, best.s - half_width);
    const double hi = std::min(bell::kSMax, best.s + half_width);
    const double s = golden_max([&](double ss) { return inner(ss).objective; }, lo, hi, 1e-12);
    for (double cand_s : {s, lo, hi}) {
      const RateSolution cand = inner(cand_s);
      if (better(cand, best)) best = cand;
    }
    half_width *= 0.5;
  }
  return best;
}

double extraction_rate(Mode mode, double pE, double q0) {
  return solve(RateProblem{mode, pE, q0, std::nullopt}).objective / (1.0 - pE);
}

MinChshPoint min_chsh_at(Mode mode, double pE) {
  MinChshPoint out;
  out.pE = pE;
  const auto objective = [&](double q0) {
    return solve(RateProblem{mode, pE, q0, std::nullopt}).objective;
  };
  if (!(objective(kQ0Tsirelson) >= 0.0)) {
    out.min_chsh = std::numeric_limits<double>::quiet_NaN();
    out.yield = false;
    return out;
  }
  out.yield = true;
  double lo = 0.75;
  double hi = kQ0Tsirelson;
  if (objective(lo) >= 0.0) {
    out.min_chsh = chsh_from_q0(lo);
    return out;
  }
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    (objective(mid) >= 0.0 ? hi : lo) = mid;
  }
  out.min_chsh = chsh_from_q0(hi);
  return out;
}

std::vector<MinChshPoint> min_chsh_curve(Mode mode, std::span<const double> pe_grid,
                                         kernels::Exec exec) {
  std::vector<MinChshPoint> out(pe_grid.size());
  kernels::for_each_index(pe_grid.size(), exec,
                          [&](std::size_t i) { out[i] = min_chsh_at(mode, pe_grid[i]); });
  return out;
}

RatePoint rate_at(Mode mode, double chsh) {
  if (!(chsh > 2.0 && chsh < bell::kTsirelson)) {
    throw PreconditionViolation("CHSH value must lie in (2, 2 sqrt 2)");
  }
  const double q0 = q0_from_chsh(chsh);
  const auto at = [&](double pE) { return solve(RateProblem{mode, pE, q0, std::nullopt}); };

  RatePoint out;
  out.chsh = chsh;
  // The maximiser can sit at either end of the p_e range, so the ends are
  // compared against the golden-section result.
  const auto best_of = [&](auto&& value) {
    const double g = golden_max([&](double pE) { return value(pE, at(pE)); }, kPeMin, kPeMax, 1e-4);
    double arg = g;
    double val = value(g, at(g));
    for (double end : {kPeMin, kPeMax}) {
      const double v = value(end, at(end));
      if (v > val) {
        val = v;
        arg = end;
      }
    }
    return std::pair{arg, val};
  };
  const auto [pe_ext, r_ext] =
      best_of([](double pE, const RateSolution& s) { return s.objective / (1.0 - pE); });
  const auto [pe_eff, r_eff] = best_of([](double, const RateSolution& s) { return s.objective; });
  out.raw_ext = r_ext;
  out.raw_eff = r_eff;
  out.r_ext = std::max(0.0, r_ext);
  out.pe_star = pe_ext;
  out.r_eff = std::max(0.0, r_eff);
  out.pe_eff_star = pe_eff;
  out.at_ext = at(pe_ext);
  return out;
}

std::vector<RatePoint> rate_curves(Mode mode, std::span<const double> chsh_grid,
                                   kernels::Exec exec) {
  std::vector<RatePoint> out(chsh_grid.size());
  kernels::for_each_index(chsh_grid.size(), exec,
                          [&](std::size_t i) { out[i] = rate_at(mode, chsh_grid[i]); });
  return out;
}

std::vector<double> pe_grid(std::size_t size) {
  if (size < 2) throw PreconditionViolation("grid size must be at least 2");
  std::vector<double> out(size);
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = 0.5 + 0.49 * static_cast<double>(i) / static_cast<double>(size - 1);
  }
  return out;
}

std::vector<double> chsh_grid(std::size_t size) {
  if (size < 1) throw PreconditionViolation("grid size must be at least 1");
  std::vector<double> out(size);
  const double width = bell::kTsirelson - 2.0;
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = 2.0 + width * static_cast<double>(i + 1) / static_cast<double>(size + 1);
  }
  return out;
}

void write_min_chsh_csv(std::ostream& out, std::span<const MinChshPoint> points) {
  out << "pE,minCHSH,feasible\n";
  for (const auto& p : points) {
    out << fmt12(p.pE) << ',' << fmt12(p.min_chsh) << ',' << (p.yield ? 1 : 0) << '\n';
  }
}

void write_rates_csv(std::ostream& out, std::span<const RatePoint> points) {
  out << "chsh,rExt,rEff,pE_star,s_star,beta_star,alpha0,alpha1\n";
  for (const auto& p : points) {
    out << fmt12(p.chsh) << ',' << fmt12(p.r_ext) << ',' << fmt12(p.r_eff) << ','
        << fmt12(p.pe_star) << ',' << fmt12(p.at_ext.s) << ',' << fmt12(p.at_ext.beta) << ','
        << fmt12(p.at_ext.alpha0) << ',' << fmt12(p.at_ext.alpha1) << '\n';
  }
}

}  // namespace seedless::rates

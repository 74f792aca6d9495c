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

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seedless/bell.hpp"
#include "seedless/extractor.hpp"
#include "seedless/quantum_sim.hpp"
#include "seedless/rate_optimizer.hpp"
#include "seedless/rng.hpp"
#include "seedless/spot_protocol.hpp"

using namespace seedless;
using rates::Mode;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s  %-28s %7.2fs (budget %gs)  %s%s\n", ok ? "PASS" : "FAIL", name, secs, budget_s,
              o.detail.c_str(), in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

extract::ExtractorTable random_table(Rng& rng, unsigned n, unsigned m) {
  std::vector<std::uint32_t> v(std::size_t{1} << n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng.bits(m));
  return {n, m, std::move(v)};
}

qsim::TripartiteState random_fixture(Rng& rng, int i, std::size_t n, std::size_t dim_e) {
  switch (i % 3) {
    case 0:
      return qsim::random_purified_fixture(rng, n, dim_e);
    case 1:
      return qsim::noisy_bell_fixture(rng, n, dim_e, rng.uniform(0.0, 0.2));
    default:
      return qsim::random_mixed_fixture(rng, n, dim_e);
  }
}

std::vector<bell::RoundDevices> fixture_devices(Rng& rng, int i, std::size_t n) {
  std::vector<bell::RoundDevices> dev;
  for (std::size_t r = 0; r < n; ++r) {
    dev.push_back(i % 3 == 1 ? bell::optimal_qubit_devices() : bell::random_qubit_devices(rng));
  }
  return dev;
}

Outcome predictability() {
  Rng rng(1001);
  std::vector<bell::RoundDevices> devices;
  for (int i = 0; i < 200; ++i) devices.push_back(bell::random_qubit_devices(rng));
  const auto sweep = bell::sweep_theorem1(devices, bell::clamped_s_grid(50));
  return {sweep.cases == 10000 && sweep.failures == 0 && sweep.worst_min_eig >= -1e-9,
          fmt("cases %.0f, failures %.0f, worst min eig %.3g", static_cast<double>(sweep.cases),
              static_cast<double>(sweep.failures), sweep.worst_min_eig)};
}

Outcome tensor_products() {
  Rng rng(1002);
  double worst = 1.0;
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 2 + static_cast<std::size_t>(i % 3);
    std::vector<bell::Lemma2Factor> pairs;
    for (std::size_t j = 0; j < k; ++j) pairs.push_back(bell::random_lemma2_factor(rng, 2 + (i + j) % 2));
    const auto r = bell::verify_lemma2(pairs);
    worst = std::min({worst, r.min_eig_plus, r.min_eig_minus});
    if (!(r.pass && std::min(r.min_eig_plus, r.min_eig_minus) >= -1e-9)) ++bad;
  }
  return {bad == 0, fmt("50 instances, failures %.0f, worst min eig %.3g", bad, worst)};
}

Outcome xor_bound() {
  Rng rng(1003);
  const auto grid = qsim::default_s_grid();
  int bad = 0;
  double worst_slack = 1e300;
  const std::size_t dims_e[] = {1, 2, 4};
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 3);
    const std::size_t dim_e = dims_e[(i / 3) % 3];
    const auto st = random_fixture(rng, i, n, dim_e);
    const auto dev = fixture_devices(rng, i, n);
    const auto r = qsim::verify_bound(st, dev, extract::xor_table(static_cast<unsigned>(n)), grid,
                                      qsim::BoundKind::xor_extractor);
    worst_slack = std::min(worst_slack, r.slack);
    if (!(r.lhs <= r.best_rhs + 1e-8)) ++bad;
  }
  return {bad == 0, fmt("100 fixtures, failures %.0f, min slack %.3g", bad, worst_slack)};
}

Outcome mbit_bound() {
  Rng rng(1004);
  const auto grid = qsim::default_s_grid();
  int bad = 0;
  int uncertified = 0;
  double worst_slack = 1e300;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 3);
    const std::size_t dim_e = 1 + static_cast<std::size_t>((i / 3) % 2);
    const auto st = random_fixture(rng, i, n, dim_e);
    const auto dev = fixture_devices(rng, i, n);
    const auto g = extract::find_certified_table(static_cast<unsigned>(n), 1, 1000,
                                                 5000 + static_cast<std::uint64_t>(i)).table;
    if (!(oracle::naive_max_deviation(g) <= extract::lemma1_bound(g.n_in(), g.m_out()) + 1e-12)) {
      ++uncertified;
    }
    const auto r = qsim::verify_bound(st, dev, g, grid, qsim::BoundKind::mbit);
    worst_slack = std::min(worst_slack, r.slack);
    if (!(r.lhs <= r.best_rhs + 1e-8)) ++bad;
  }
  return {bad == 0 && uncertified == 0,
          fmt("50 fixtures, failures %.0f, oracle rejections %.0f, min slack %.3g", bad, uncertified,
              worst_slack)};
}

Outcome walsh_oracle() {
  Rng rng(1005);
  double worst = 0.0;
  for (unsigned n = 4; n <= 10; ++n) {
    for (int t = 0; t < 20; ++t) {
      const unsigned m = 1 + static_cast<unsigned>(t) % (n - 1);
      const auto g = random_table(rng, n, m);
      for (std::uint32_t k = 0; k < (1u << m); ++k) {
        const auto fast = extract::walsh_deviations(g, k);
        const auto slow = oracle::naive_walsh(g, k);
        for (std::size_t r = 0; r < fast.size(); ++r) worst = std::max(worst, std::abs(fast[r] - slow[r]));
      }
    }
  }
  return {worst <= 1e-9, fmt("140 tables, max |fast - naive| %.3g", worst)};
}

Outcome extractor_search() {
  const auto r = extract::search_extractor(12, 3, 5, 7);
  bool ok = r.certificate.pass && r.attempts <= 5;
  int rechecked = 0;
  for (unsigned m = 1; m <= 4; ++m) {
    const auto s = extract::search_extractor(10, m, 100, 7);
    ok = ok && oracle::naive_max_deviation(s.table) <= extract::lemma1_bound(10, m) + 1e-12;
    ++rechecked;
  }
  return {ok, fmt("n=12 m=3 seed=7: %.0f attempts, max dev %.4g <= %.4g", static_cast<double>(r.attempts),
                  r.certificate.max_deviation, r.certificate.bound) +
                  ", n=10 naive rechecks " + std::to_string(rechecked)};
}

Outcome exact_security() {
  Rng rng(1007);
  int bad = 0;
  int fixtures = 0;
  std::size_t outputs = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 12; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 3);
    qsim::TripartiteState st = i < 3 ? qsim::eve_copy_fixture(n)
                                     : i < 6 ? qsim::noisy_bell_fixture(rng, n, 2, 0.05)
                                             : qsim::random_purified_fixture(rng, n, 2);
    std::vector<bell::RoundDevices> dev =
        i < 9 ? qsim::optimal_devices(n) : fixture_devices(rng, 0, n);
    ++fixtures;
    for (Mode mode : {Mode::xor_bit, Mode::mbit}) {
      for (double eps : {0.25, 1.0}) {
        const auto r = spot::verify_theorem4_exact(st, dev, 0.9, eps, mode, 11);
        outputs += r.outputs;
        worst_ratio = std::max(worst_ratio, r.lhs_average / eps);
        if (!r.pass) ++bad;
      }
    }
  }
  return {bad == 0 && fixtures >= 10,
          fmt("%.0f fixtures x 2 modes x 2 eps, failures %.0f, max lhs/eps %.3g", fixtures, bad,
              worst_ratio) +
              ", outcomes with output " + std::to_string(outputs)};
}

Outcome q_identities() {
  Rng rng(1008);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto dev = bell::random_qubit_devices(rng);
    worst = std::max(worst, spot::q_identity_residual(dev, rng.uniform(bell::kSMin, bell::kSMax)));
  }
  return {worst <= 1e-10, fmt("50 draws, max residual %.3g", worst)};
}

Outcome min_chsh_anchors() {
  const auto grid = rates::pe_grid(50);
  const auto curve = rates::min_chsh_curve(Mode::xor_bit, grid);
  const auto at074 = rates::min_chsh_at(Mode::xor_bit, 0.74);
  bool low_yield = false;
  for (double pE = 0.01; pE <= 0.5 + 1e-12; pE += 0.01) {
    if (rates::min_chsh_at(Mode::xor_bit, pE).yield) low_yield = true;
  }
  bool monotone = true;
  double prev = 1e300;
  for (const auto& p : curve) {
    const double v = p.yield ? p.min_chsh : 1e300;
    if (v > prev + 1e-9) monotone = false;
    prev = v;
  }
  const bool ok = at074.yield && at074.min_chsh <= 2.01 && !low_yield && monotone;
  return {ok, fmt("minCHSH(0.74) %.6g", at074.min_chsh) +
                  (low_yield ? ", yield at some pE <= 0.5" : ", no yield for pE <= 0.5") +
                  (monotone ? ", monotone" : ", NOT monotone")};
}

Outcome rate_anchors() {
  auto grid = rates::chsh_grid(40);
  grid.push_back(2.82);
  std::sort(grid.begin(), grid.end());
  const auto pts = rates::rate_curves(Mode::mbit, grid);
  bool monotone = true;
  bool eff_positive = true;
  double at282 = 0.0;
  double eff_low = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && pts[i].r_ext < pts[i - 1].r_ext - 1e-9) monotone = false;
    if (pts[i].raw_ext > 0.0 && !(pts[i].r_eff > 0.0)) eff_positive = false;
    if (std::abs(pts[i].chsh - 2.82) < 1e-12) at282 = pts[i].r_ext;
    if (pts[i].chsh <= 2.6) eff_low = std::max(eff_low, pts[i].r_eff);
  }
  const bool small_low = eff_low <= 0.05;
  const bool ok = monotone && eff_positive && small_low && at282 >= 0.9;
  return {ok, fmt("maxRext(2.82) %.4f (need >= 0.9), max Reff for CHSH <= 2.6 %.3g", at282, eff_low) +
                  (monotone ? ", Rext monotone" : ", Rext NOT monotone") +
                  (eff_positive ? ", Reff > 0 where feasible" : ", Reff not positive somewhere")};
}

Outcome end_to_end() {
  spot::ProtocolConfig xor_cfg;
  xor_cfg.n = 100000;
  xor_cfg.pE = 0.9;
  xor_cfg.epsilon = 1e-6;
  xor_cfg.mode = Mode::xor_bit;
  xor_cfg.seed = 2024;
  const auto x = spot::run_protocol(xor_cfg);

  const auto mbit_gap = [](std::uint64_t n, double pE, std::uint64_t seed, double* asym) {
    spot::ProtocolConfig cfg;
    cfg.n = n;
    cfg.pE = pE;
    cfg.epsilon = 1e-6;
    cfg.mode = Mode::mbit;
    cfg.seed = seed;
    const auto tr = spot::run_protocol(cfg);
    const double pe_real = static_cast<double>(tr.nE) / static_cast<double>(tr.n);
    *asym = std::max(0.0, rates::extraction_rate(Mode::mbit, pe_real, *tr.q0));
    return std::abs(static_cast<double>(tr.mOut) / static_cast<double>(tr.nR) - *asym);
  };
  double asym6 = 0.0;
  double asym7 = 0.0;
  const double gap6 = mbit_gap(1000000, 0.9, 2025, &asym6);
  const double gap7 = mbit_gap(10000000, 0.98, 2026, &asym7);
  const bool ok = x.mOut == 1 && gap6 <= 2e-3 && gap7 <= 2e-3;
  return {ok, fmt("xor mOut %.0f; mbit n=1e6 pE=0.9 |gap| %.3g (R_ext %.4g)",
                  static_cast<double>(x.mOut), gap6, asym6) +
                  fmt("; n=1e7 pE=0.98 |gap| %.3g (R_ext %.4g)", gap7, asym7)};
}

}  // namespace

int main() {
  criterion("predictability-universality", 30, predictability);
  criterion("tensor-product-inequality", 30, tensor_products);
  criterion("xor-bound-dominance", 300, xor_bound);
  criterion("mbit-bound-dominance", 300, mbit_bound);
  criterion("walsh-oracle-equivalence", 60, walsh_oracle);
  criterion("extractor-search", 60, extractor_search);
  criterion("exact-protocol-security", 600, exact_security);
  criterion("q-operator-identities", 60, q_identities);
  criterion("min-chsh-anchors", 300, min_chsh_anchors);
  criterion("rate-curve-anchors", 600, rate_anchors);
  criterion("end-to-end-protocol", 300, end_to_end);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

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
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "seedless/errors.hpp"
#include "seedless/extractor.hpp"
#include "seedless/rng.hpp"

using namespace seedless;
using namespace seedless::extract;

namespace {

ExtractorTable random_table(Rng& rng, unsigned n, unsigned m) {
  std::vector<std::uint32_t> v(std::size_t{1} << n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng.bits(m));
  return {n, m, std::move(v)};
}

ExtractorTable constant_table(unsigned n, unsigned m) {
  return {n, m, std::vector<std::uint32_t>(std::size_t{1} << n, 0)};
}

}  // namespace

TEST(XorTable, SmallCases) {
  EXPECT_EQ(xor_table(1).values()[0], 0u);
  EXPECT_EQ(xor_table(1).values()[1], 1u);
  const std::vector<std::uint32_t> two{0, 1, 1, 0};
  EXPECT_TRUE(std::ranges::equal(xor_table(2).values(), two));
  const std::vector<std::uint8_t> a{1, 0, 1};
  EXPECT_EQ(xor_table(3)(bits_to_index(a)), 0u);
  EXPECT_TRUE(is_parity_table(xor_table(7)));
  EXPECT_FALSE(is_parity_table(constant_table(3, 1)));
}

TEST(XorTable, RangeChecked) {
  EXPECT_THROW(xor_table(0), PreconditionViolation);
  EXPECT_THROW(xor_table(27), PreconditionViolation);
}

TEST(Table, Validation) {
  EXPECT_THROW(ExtractorTable(3, 1, std::vector<std::uint32_t>(7, 0)), PreconditionViolation);
  EXPECT_THROW(ExtractorTable(2, 1, std::vector<std::uint32_t>{0, 1, 2, 0}), PreconditionViolation);
}

TEST(Walsh, ConstantFunction) {
  const auto g = constant_table(6, 1);
  const auto d = walsh_deviations(g, 0);
  EXPECT_DOUBLE_EQ(d[0], 32.0);
  for (std::size_t r = 1; r < d.size(); ++r) EXPECT_DOUBLE_EQ(d[r], 0.0);
}

TEST(Walsh, ParityConcentratesOnAllOnes) {
  const unsigned n = 8;
  const auto d = walsh_deviations(xor_table(n), 0);
  for (std::size_t r = 0; r < d.size(); ++r) {
    EXPECT_DOUBLE_EQ(d[r], r == d.size() - 1 ? 128.0 : 0.0);
  }
  // 2^{n-1} exceeds n^2 sqrt(2)^{n-1} from n = 18 on: parity fails certification there.
  EXPECT_TRUE(certify(xor_table(17)).pass);
  EXPECT_FALSE(certify(xor_table(18)).pass);
}

TEST(Walsh, ZeroFrequencyIsBalance) {
  Rng rng(51);
  const auto g = random_table(rng, 9, 3);
  for (std::uint32_t k = 0; k < 8; ++k) {
    double count = 0;
    for (auto v : g.values()) count += v == k ? 1 : 0;
    EXPECT_DOUBLE_EQ(walsh_deviations(g, k)[0], count - 64.0);
  }
}

TEST(Walsh, OracleEquivalence) {
  Rng rng(52);
  for (unsigned n = 4; n <= 10; ++n) {
    for (int t = 0; t < 20; ++t) {
      const unsigned m = 1 + static_cast<unsigned>(t) % (n - 1);
      const auto g = random_table(rng, n, m);
      const std::uint32_t k = static_cast<std::uint32_t>(rng.bits(m));
      const auto fast = walsh_deviations(g, k, t % 2 ? kernels::Exec::parallel : kernels::Exec::serial);
      const auto slow = oracle::naive_walsh(g, k);
      for (std::size_t r = 0; r < fast.size(); ++r) ASSERT_NEAR(fast[r], slow[r], 1e-9);
    }
  }
}

TEST(Walsh, UnattainedOutput) {
  // k never produced: deviation is -2^{n-m} at r = 0 and 0 elsewhere.
  const auto g = constant_table(5, 2);
  const auto d = walsh_deviations(g, 3);
  EXPECT_DOUBLE_EQ(d[0], -8.0);
  EXPECT_EQ(d, oracle::naive_walsh(g, 3));
}

TEST(Walsh, Parseval) {
  Rng rng(53);
  const auto g = random_table(rng, 10, 2);
  for (std::uint32_t k = 0; k < 4; ++k) {
    const auto d = walsh_deviations(g, k);
    double lhs = 0.0;
    for (double x : d) lhs += x * x;
    double rhs = 0.0;
    for (auto v : g.values()) {
      const double c = (v == k ? 1.0 : 0.0) - 0.25;
      rhs += c * c;
    }
    rhs *= 1024.0;
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-6);
  }
}

TEST(Certify, SmallConstantPassesLooseBound) {
  const auto c = certify(constant_table(8, 1));
  EXPECT_DOUBLE_EQ(c.max_deviation, 128.0);
  EXPECT_NEAR(c.bound, 64.0 * std::pow(std::sqrt(2.0), 7), 1e-9);
  EXPECT_TRUE(c.pass);
}

TEST(Certify, LargeConstantFails) {
  const auto c = certify(constant_table(24, 4));
  EXPECT_DOUBLE_EQ(c.max_deviation, std::ldexp(1.0, 24) * (1.0 - 1.0 / 16.0));
  EXPECT_NEAR(c.bound, 576.0 * std::ldexp(1.0, 10), 1e-6);
  EXPECT_FALSE(c.pass);
}

TEST(Certify, RandomMediumTablePasses) {
  Rng rng(54);
  EXPECT_TRUE(certify(random_table(rng, 16, 4)).pass);
}

TEST(Certify, RequiresMLessThanN) {
  EXPECT_THROW(certify(ExtractorTable(3, 3, std::vector<std::uint32_t>(8, 0))),
               PreconditionViolation);
}

TEST(Certify, AgreesWithNaiveOracle) {
  Rng rng(55);
  for (unsigned n = 4; n <= 10; ++n) {
    const auto g = random_table(rng, n, 2);
    const auto c = certify(g);
    EXPECT_NEAR(c.max_deviation, oracle::naive_max_deviation(g), 1e-9);
    EXPECT_EQ(c.pass, oracle::naive_max_deviation(g) <= lemma1_bound(n, 2));
  }
}

TEST(Certify, SerialAndParallelAgree) {
  Rng rng(56);
  const auto g = random_table(rng, 14, 3);
  const auto s = certify(g, kernels::Exec::serial);
  const auto p = certify(g, kernels::Exec::parallel);
  EXPECT_EQ(s.max_deviation, p.max_deviation);
  EXPECT_EQ(s.argmax_k, p.argmax_k);
  EXPECT_EQ(s.argmax_r, p.argmax_r);
}

TEST(Search, TwelveThreeSeedSeven) {
  const auto r = search_extractor(12, 3, 5, 7);
  EXPECT_TRUE(r.certificate.pass);
  EXPECT_LE(r.attempts, 5u);
  EXPECT_EQ(r.table, search_extractor(12, 3, 5, 7).table);
}

TEST(Search, AcceptedTablesPassNaiveOracle) {
  for (unsigned n = 6; n <= 10; ++n) {
    const auto r = search_extractor(n, n - 3, 100, 100 + n);
    EXPECT_LE(oracle::naive_max_deviation(r.table), lemma1_bound(n, n - 3) + 1e-9);
  }
}

TEST(Search, SixFive) { EXPECT_TRUE(search_extractor(6, 5, 100, 3).certificate.pass); }

TEST(Search, Preconditions) {
  EXPECT_THROW(search_extractor(5, 1, 10, 1), PreconditionViolation);
  EXPECT_THROW(search_extractor(10, 10, 10, 1), PreconditionViolation);
  EXPECT_THROW(search_extractor(10, 0, 10, 1), PreconditionViolation);
}

TEST(Search, ExhaustionReportsAttempts) {
  // Random tables essentially always certify, so a zero budget is the
  // reliable way to exhaust the search.
  try {
    find_certified_table(8, 2, 0, 1);
    FAIL() << "expected SearchExhausted";
  } catch (const SearchExhausted& e) {
    EXPECT_EQ(e.attempts(), 0u);
  }
}

TEST(TableIo, RoundTrip) {
  Rng rng(57);
  const auto g = random_table(rng, 7, 5);
  std::stringstream ss;
  write_table(ss, g);
  EXPECT_EQ(ss.str().substr(0, 8), "n=7 m=5\n");
  EXPECT_EQ(read_table(ss), g);
}

TEST(TableIo, Malformed) {
  std::stringstream bad_header("n=3\n0\n");
  EXPECT_THROW(read_table(bad_header), ParseError);
  std::stringstream short_body("n=2 m=1\n0\n1\n");
  EXPECT_THROW(read_table(short_body), ParseError);
  std::stringstream bad_entry("n=1 m=1\n0\nzz\n");
  EXPECT_THROW(read_table(bad_entry), ParseError);
  std::stringstream too_big("n=1 m=1\n0\n2\n");
  EXPECT_THROW(read_table(too_big), std::exception);
}

TEST(CertificateJson, RoundTrip) {
  const auto r = search_extractor(8, 2, 10, 9);
  const auto j = certificate_to_json(r.certificate, r.seed);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 9u);
  const auto back = certificate_from_json(j);
  EXPECT_EQ(back.max_deviation, r.certificate.max_deviation);
  EXPECT_EQ(back.pass, r.certificate.pass);
  EXPECT_EQ(back.argmax_r, r.certificate.argmax_r);
  EXPECT_TRUE(certificate_to_json(r.certificate, std::nullopt).at("seed").is_null());
}

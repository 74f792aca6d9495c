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

#include "seedless/extractor.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "seedless/errors.hpp"
#include "seedless/rng.hpp"

namespace seedless::extract {

namespace {

// Above this input length certify() parallelises inside each transform
// instead of across k, so peak memory stays at one 2^n buffer.
constexpr unsigned kPerKBufferMaxBits = 20;

std::vector<std::size_t> preimage_counts(const ExtractorTable& g) {
  std::vector<std::size_t> counts(std::size_t{1} << g.m_out(), 0);
  for (auto v : g.values()) ++counts[v];
  return counts;
}

// Fills `buf` with D_k(r); `count` is |g^{-1}(k)|.
void deviations_into(const ExtractorTable& g, std::uint32_t k, std::size_t count,
                     std::vector<double>& buf, kernels::Exec exec) {
  const double shift = std::ldexp(1.0, -static_cast<int>(g.m_out()));
  const std::size_t size = g.size();
  buf.resize(size);
  if (count == 0) {
    // Transform of the constant -2^-m.
    std::fill(buf.begin(), buf.end(), 0.0);
    buf[0] = -std::ldexp(1.0, static_cast<int>(g.n_in()) - static_cast<int>(g.m_out()));
    return;
  }
  const auto values = g.values();
  for (std::size_t a = 0; a < size; ++a) buf[a] = (values[a] == k ? 1.0 : 0.0) - shift;
  kernels::fwht(buf, exec);
}

struct KMax {
  double value = -1.0;
  std::uint64_t r = 0;
};

KMax max_abs(const std::vector<double>& d) {
  KMax best;
  for (std::size_t r = 0; r < d.size(); ++r) {
    const double v = std::abs(d[r]);
    if (v > best.value) {
      best.value = v;
      best.r = r;
    }
  }
  return best;
}

void check_search_args(unsigned n_in, unsigned m_out) {
  if (n_in == 0 || n_in > kMaxInputBits) {
    throw PreconditionViolation("extractor input length must lie in [1, 26]");
  }
  if (m_out == 0 || m_out >= n_in) {
    throw PreconditionViolation("extractor output length must satisfy 1 <= m < n");
  }
}

}  // namespace

ExtractorTable::ExtractorTable(unsigned n_in, unsigned m_out, std::vector<std::uint32_t> values)
    : n_in_(n_in), m_out_(m_out), values_(std::move(values)) {
  if (n_in_ > kMaxInputBits) throw PreconditionViolation("extractor table: n_in exceeds 26");
  if (m_out_ > kMaxOutputBits) throw PreconditionViolation("extractor table: m_out exceeds 31");
  if (values_.size() != (std::size_t{1} << n_in_)) {
    throw PreconditionViolation("extractor table: expected 2^n entries");
  }
  const std::uint64_t limit = std::uint64_t{1} << m_out_;
  for (auto v : values_) {
    if (v >= limit) throw PreconditionViolation("extractor table: entry exceeds 2^m - 1");
  }
}

ExtractorTable xor_table(unsigned n_in) {
  if (n_in == 0 || n_in > kMaxInputBits) {
    throw PreconditionViolation("xor_table: input length must lie in [1, 26]");
  }
  std::vector<std::uint32_t> values(std::size_t{1} << n_in);
  for (std::size_t a = 0; a < values.size(); ++a) {
    values[a] = static_cast<std::uint32_t>(std::popcount(a) & 1U);
  }
  return ExtractorTable(n_in, 1, std::move(values));
}

bool is_parity_table(const ExtractorTable& g) {
  if (g.m_out() != 1 || g.n_in() == 0) return false;
  const auto values = g.values();
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] != static_cast<std::uint32_t>(std::popcount(a) & 1U)) return false;
  }
  return true;
}

std::uint64_t bits_to_index(std::span<const std::uint8_t> bits) {
  std::uint64_t index = 0;
  for (auto b : bits) index = (index << 1) | (b & 1U);
  return index;
}

std::vector<double> walsh_deviations(const ExtractorTable& g, std::uint32_t k, kernels::Exec exec) {
  std::size_t count = 0;
  for (auto v : g.values()) count += (v == k);
  std::vector<double> buf;
  deviations_into(g, k, count, buf, exec);
  return buf;
}

double lemma1_bound(unsigned n_in, unsigned m_out) {
  const double n = static_cast<double>(n_in);
  return n * n * std::pow(std::sqrt(2.0), static_cast<double>(n_in) - static_cast<double>(m_out));
}

WalshCertificate certify(const ExtractorTable& g, kernels::Exec exec) {
  if (g.m_out() >= g.n_in()) {
    throw PreconditionViolation("certify: requires m < n (got n = " + std::to_string(g.n_in()) +
                                ", m = " + std::to_string(g.m_out()) + ")");
  }
  const auto counts = preimage_counts(g);
  const std::size_t ks = counts.size();
  std::vector<KMax> per_k(ks);

  if (exec == kernels::Exec::parallel && g.n_in() <= kPerKBufferMaxBits) {
    kernels::for_each_index(ks, exec, [&](std::size_t k) {
      std::vector<double> buf;
      deviations_into(g, static_cast<std::uint32_t>(k), counts[k], buf, kernels::Exec::serial);
      per_k[k] = max_abs(buf);
    });
  } else {
    std::vector<double> buf;
    for (std::size_t k = 0; k < ks; ++k) {
      deviations_into(g, static_cast<std::uint32_t>(k), counts[k], buf, exec);
      per_k[k] = max_abs(buf);
    }
  }

  WalshCertificate cert;
  cert.n_in = g.n_in();
  cert.m_out = g.m_out();
  cert.bound = lemma1_bound(g.n_in(), g.m_out());
  cert.max_deviation = -1.0;
  for (std::size_t k = 0; k < ks; ++k) {
    if (per_k[k].value > cert.max_deviation) {
      cert.max_deviation = per_k[k].value;
      cert.argmax_k = static_cast<std::uint32_t>(k);
      cert.argmax_r = per_k[k].r;
    }
  }
  cert.pass = cert.max_deviation <= cert.bound;
  return cert;
}

SearchResult find_certified_table(unsigned n_in, unsigned m_out, std::size_t max_attempts,
                                  std::uint64_t seed, kernels::Exec exec) {
  check_search_args(n_in, m_out);
  Rng rng(seed);
  const std::size_t size = std::size_t{1} << n_in;
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<std::uint32_t> values(size);
    for (auto& v : values) v = static_cast<std::uint32_t>(rng.bits(m_out));
    ExtractorTable table(n_in, m_out, std::move(values));
    auto cert = certify(table, exec);
    if (cert.pass) return SearchResult{std::move(table), cert, attempt, seed};
  }
  throw SearchExhausted("no certified extractor table found for n = " + std::to_string(n_in) +
                            ", m = " + std::to_string(m_out) + " after " +
                            std::to_string(max_attempts) + " attempts",
                        max_attempts);
}

SearchResult search_extractor(unsigned n_in, unsigned m_out, std::size_t max_attempts,
                              std::uint64_t seed, kernels::Exec exec) {
  if (n_in <= 5) {
    throw PreconditionViolation("search_extractor: requires n > 5 (got n = " +
                                std::to_string(n_in) + ")");
  }
  return find_certified_table(n_in, m_out, max_attempts, seed, exec);
}

void write_table(std::ostream& out, const ExtractorTable& g) {
  out << "n=" << g.n_in() << " m=" << g.m_out() << '\n';
  out << std::hex;
  for (auto v : g.values()) out << v << '\n';
  out << std::dec;
}

ExtractorTable read_table(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("table file: missing header");
  unsigned n = 0, m = 0;
  {
    std::istringstream hs(header);
    std::string nf, mf;
    if (!(hs >> nf >> mf) || nf.rfind("n=", 0) != 0 || mf.rfind("m=", 0) != 0) {
      throw ParseError("table file: header must read 'n=<bits> m=<bits>'");
    }
    try {
      n = static_cast<unsigned>(std::stoul(nf.substr(2)));
      m = static_cast<unsigned>(std::stoul(mf.substr(2)));
    } catch (const std::exception&) {
      throw ParseError("table file: non-numeric n or m in header");
    }
  }
  if (n > kMaxInputBits || m > kMaxOutputBits) throw ParseError("table file: n or m out of range");
  const std::size_t size = std::size_t{1} << n;
  std::vector<std::uint32_t> values;
  values.reserve(size);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(line, &used, 16);
    } catch (const std::exception&) {
      throw ParseError("table file: bad hexadecimal entry '" + line + "'");
    }
    if (used != line.size()) throw ParseError("table file: bad hexadecimal entry '" + line + "'");
    if (values.size() == size) throw ParseError("table file: more than 2^n entries");
    values.push_back(static_cast<std::uint32_t>(v));
  }
  if (values.size() != size) throw ParseError("table file: expected 2^n entries");
  try {
    return ExtractorTable(n, m, std::move(values));
  } catch (const PreconditionViolation& e) {
    throw ParseError(std::string("table file: ") + e.what());
  }
}

nlohmann::json certificate_to_json(const WalshCertificate& cert, std::optional<std::uint64_t> seed) {
  nlohmann::json j;
  j["n"] = cert.n_in;
  j["m"] = cert.m_out;
  j["maxDeviation"] = cert.max_deviation;
  j["bound"] = cert.bound;
  j["pass"] = cert.pass;
  j["argmaxK"] = cert.argmax_k;
  j["argmaxR"] = cert.argmax_r;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

WalshCertificate certificate_from_json(const nlohmann::json& j) {
  try {
    WalshCertificate cert;
    cert.n_in = j.at("n").get<unsigned>();
    cert.m_out = j.at("m").get<unsigned>();
    cert.max_deviation = j.at("maxDeviation").get<double>();
    cert.bound = j.at("bound").get<double>();
    cert.pass = j.at("pass").get<bool>();
    cert.argmax_k = j.at("argmaxK").get<std::uint32_t>();
    cert.argmax_r = j.at("argmaxR").get<std::uint64_t>();
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
}

}  // namespace seedless::extract

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

// Extractor functions g: {0,1}^n -> {0,1}^m as explicit truth tables, and
// their certification through the centred Walsh spectrum
//
//   D_k(r) = sum_a (delta_{g(a) = k} - 2^-m) (-1)^{a . r}
//
// against the bound n^2 sqrt(2)^{n - m}. An input string (a_1, ..., a_n) is
// read as the integer a_1 2^{n-1} + ... + a_n, matching the big-endian
// tensor order used for the measured registers.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "seedless/kernels.hpp"

namespace seedless::extract {

inline constexpr unsigned kMaxInputBits = 26;
inline constexpr unsigned kMaxOutputBits = 31;

class ExtractorTable {
 public:
  /// Throws PreconditionViolation on a bad size, n_in > 26, or an entry >= 2^m_out.
  ExtractorTable(unsigned n_in, unsigned m_out, std::vector<std::uint32_t> values);

  unsigned n_in() const { return n_in_; }
  unsigned m_out() const { return m_out_; }
  std::size_t size() const { return values_.size(); }
  std::span<const std::uint32_t> values() const { return values_; }
  std::uint32_t operator()(std::uint64_t input) const { return values_[input]; }

  bool operator==(const ExtractorTable&) const = default;

 private:
  unsigned n_in_;
  unsigned m_out_;
  std::vector<std::uint32_t> values_;
};

/// Parity of the input bits; m_out = 1. Requires 1 <= n_in <= 26.
ExtractorTable xor_table(unsigned n_in);
bool is_parity_table(const ExtractorTable& g);

/// Index of the bit string (a_1 most significant).
std::uint64_t bits_to_index(std::span<const std::uint8_t> bits);

/// D_k(r) for every r, by one fast Walsh-Hadamard transform of the centred
/// indicator of g^{-1}(k).
std::vector<double> walsh_deviations(const ExtractorTable& g, std::uint32_t k,
                                     kernels::Exec exec = kernels::Exec::parallel);

/// n^2 sqrt(2)^{n - m}
double lemma1_bound(unsigned n_in, unsigned m_out);

struct WalshCertificate {
  unsigned n_in = 0;
  unsigned m_out = 0;
  double max_deviation = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::uint32_t argmax_k = 0;
  std::uint64_t argmax_r = 0;
};

/// max_{k,r} |D_k(r)| against lemma1_bound. Ties resolve to the smallest k,
/// then the smallest r. Requires m_out < n_in.
WalshCertificate certify(const ExtractorTable& g, kernels::Exec exec = kernels::Exec::parallel);

struct SearchResult {
  ExtractorTable table;
  WalshCertificate certificate;
  std::size_t attempts = 0;
  std::uint64_t seed = 0;
};

/// Draws uniformly random tables from Rng(seed) until one certifies.
/// Requires n_in > 5 and 1 <= m_out < n_in; throws SearchExhausted after
/// max_attempts failures.
SearchResult search_extractor(unsigned n_in, unsigned m_out, std::size_t max_attempts,
                              std::uint64_t seed, kernels::Exec exec = kernels::Exec::parallel);

/// Same sampler without the n_in > 5 requirement; used where a certified
/// table is needed at small input length (the certificate is what matters).
SearchResult find_certified_table(unsigned n_in, unsigned m_out, std::size_t max_attempts,
                                  std::uint64_t seed, kernels::Exec exec = kernels::Exec::parallel);

/// "n=<n> m=<m>" header, then 2^n lowercase hexadecimal values, one per line.
void write_table(std::ostream& out, const ExtractorTable& g);
ExtractorTable read_table(std::istream& in);

/// {n, m, maxDeviation, bound, pass, argmaxK, argmaxR, seed}
nlohmann::json certificate_to_json(const WalshCertificate& cert, std::optional<std::uint64_t> seed);
WalshCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace seedless::extract

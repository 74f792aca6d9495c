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

// The two spot-checking protocols: each round is an estimation round with
// probability p_e (uniform settings, both parties measure, z = a + b + xy) or
// a raw round (Alice measures setting 0 and keeps a). The output length is
// computed from (n_E, n_R, q0) and the raw bits go through the XOR or an
// m-bit certified extractor.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seedless/bell.hpp"
#include "seedless/extractor.hpp"
#include "seedless/quantum_sim.hpp"
#include "seedless/rate_optimizer.hpp"

namespace seedless::spot {

using linalg::ComplexMatrix;
using rates::Mode;

/// Per-round i.i.d. two-qubit state and measurements.
struct HonestDevice {
  ComplexMatrix state;
  bell::RoundDevices devices;

  /// |Phi+> with the optimal angles (CHSH = 2 sqrt 2).
  static HonestDevice optimal();
  /// Isotropic state with visibility chsh / (2 sqrt 2) and the optimal angles.
  static HonestDevice with_chsh(double chsh);

  double chsh() const;
};

struct ProtocolConfig {
  std::uint64_t n = 0;
  double pE = 0.5;
  double epsilon = 1e-6;
  Mode mode = Mode::xor_bit;
  std::uint64_t seed = 0;
  HonestDevice device = HonestDevice::optimal();
  /// Extractor-table cache; defaults to default_cache_dir().
  std::optional<std::filesystem::path> cache_dir;

  void validate() const;
};

enum class Tag : std::uint8_t { estimation, rawbit };

struct Transcript {
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  double pE = 0.0;
  double epsilon = 0.0;
  Mode mode = Mode::xor_bit;

  std::vector<Tag> t;
  std::vector<std::uint8_t> x;  // estimation rounds only
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> z;
  std::vector<std::uint8_t> a;  // raw rounds only
  std::uint64_t nE = 0;
  std::uint64_t nR = 0;
  std::optional<double> q0;     // absent when nE = 0
  std::uint64_t mOut = 0;
  std::vector<std::uint8_t> k;
  /// "xor", "table", "none" (mOut = 0) or "unavailable" (table too large to build).
  std::string extractor;
};

Transcript run_protocol(const ProtocolConfig& cfg);

/// {seed, n, pE, epsilon, mode, nE, nR, q0, mOut, kHex, extractor}
nlohmann::json transcript_to_json(const Transcript& tr);

/// k_1..k_m as a big-endian hex string of ceil(m / 4) digits ("" for m = 0).
std::string bits_to_hex(std::span<const std::uint8_t> bits);

struct LengthResult {
  std::uint64_t m = 0;
  /// Maximised expression before the decision / floor (-inf when not evaluated).
  double value = 0.0;
  bool optimizer_feasible = false;
  rates::RateSolution solution;
};

/// Statistic-level forms: zeros = |{j : z_j = 0}|.
LengthResult output_length_xor(std::uint64_t nE, std::uint64_t nR, std::uint64_t zeros, double pE,
                               double epsilon);
LengthResult output_length_mbit(std::uint64_t nE, std::uint64_t nR, std::uint64_t zeros,
                                double pE, double epsilon);

/// Transcript-level forms.
LengthResult output_length_xor(std::span<const Tag> t, std::span<const std::uint8_t> z, double pE,
                               double epsilon);
LengthResult output_length_mbit(std::span<const Tag> t, std::span<const std::uint8_t> z,
                                double pE, double epsilon);

LengthResult output_length(Mode mode, std::uint64_t nE, std::uint64_t nR, std::uint64_t zeros,
                           double pE, double epsilon);

/// Tables are built only when n_R <= kMaxTableInput and 2^m 2^{n_R} <= 2^30.
inline constexpr unsigned kMaxTableInput = 20;
bool table_buildable(std::uint64_t nR, std::uint64_t m);

/// $SEEDLESS_DI_CACHE, else $XDG_CACHE_HOME/seedless-di, else ~/.cache/seedless-di.
std::filesystem::path default_cache_dir();

/// Seed of the one-time table search for a transcript seed.
std::uint64_t table_seed(std::uint64_t protocol_seed);

/// Certified table for (n, m) drawn from Rng(seed), loaded from or stored in
/// cache_dir when given. A cached file that fails certification is rebuilt.
extract::ExtractorTable cached_table(unsigned n, unsigned m, std::uint64_t seed,
                                     const std::optional<std::filesystem::path>& cache_dir);

/// Q_z = 1/4 sum_{a,b,x,y} A(a|x) B(b|y) [a + b + xy = z mod 2]
std::array<ComplexMatrix, 2> q_operators(const bell::RoundDevices& devices);

/// max(|| S - (mu 1 - 4 nu (Q_0 - Q_1)) ||, || Q_0 + Q_1 - 1 ||), entrywise max norm.
double q_identity_residual(const bell::RoundDevices& devices, double s);

/// || p_r sqrt(2)^{beta-1} [c 1 + S] + p_e [sqrt(2)^{alpha0} Q_0 + sqrt(2)^{alpha1} Q_1] - 1 ||
/// (entrywise max norm; c = 0 XOR, 1 m-bit).
double factor_identity_residual(Mode mode, double pE, const rates::RateSolution& sol,
                                const bell::RoundDevices& devices);

struct Theorem4Report {
  double lhs_average = 0.0;
  double epsilon = 0.0;
  bool pass = false;
  std::uint64_t outcomes = 0;        // (t, z) pairs enumerated
  std::uint64_t outputs = 0;         // pairs with m(t, z) > 0
  double conservative_mass = 0.0;    // probability charged 2 P instead of the exact distance
};

/// Probability below which a conditional state is not normalised.
inline constexpr double kNegligibleProbability = 1e-14;

/// sum_{t,z} P(t, z) || rho_{KE|t,z} - u_K rho_{E|t,z} ||_1 <= epsilon, exactly,
/// for n <= 3 rounds.
Theorem4Report verify_theorem4_exact(const qsim::TripartiteState& fixture,
                                     std::span<const bell::RoundDevices> devices, double pE,
                                     double epsilon, Mode mode, std::uint64_t seed = 0);

nlohmann::json theorem4_report_to_json(const Theorem4Report& report);

}  // namespace seedless::spot

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

#include "seedless/spot_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <system_error>

#include "seedless/errors.hpp"
#include "seedless/rng.hpp"

namespace seedless::spot {

using linalg::Complex;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

LengthResult no_output() {
  LengthResult out;
  out.value = -std::numeric_limits<double>::infinity();
  return out;
}

void check_length_inputs(double pE, double epsilon) {
  if (!(pE > 0.0 && pE < 1.0)) throw PreconditionViolation("pE must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw PreconditionViolation("epsilon must lie in (0, 1]");
}

struct Counts {
  std::uint64_t nE = 0;
  std::uint64_t nR = 0;
  std::uint64_t zeros = 0;
};

Counts count(std::span<const Tag> t, std::span<const std::uint8_t> z) {
  Counts c;
  for (Tag tag : t) (tag == Tag::estimation ? c.nE : c.nR) += 1;
  if (z.size() != c.nE) {
    throw DimensionMismatch("z has " + std::to_string(z.size()) + " entries for " +
                            std::to_string(c.nE) + " estimation rounds");
  }
  for (auto bit : z) {
    if (bit > 1) throw PreconditionViolation("z entries must be bits");
    c.zeros += bit == 0 ? 1 : 0;
  }
  return c;
}

}  // namespace

HonestDevice HonestDevice::optimal() {
  return {bell::phi_plus_state(), bell::optimal_qubit_devices()};
}

HonestDevice HonestDevice::with_chsh(double chsh) {
  if (!(chsh >= 0.0 && chsh <= bell::kTsirelson)) {
    throw PreconditionViolation("target CHSH must lie in [0, 2 sqrt 2]");
  }
  return {bell::isotropic_state(std::min(1.0, chsh / bell::kTsirelson)),
          bell::optimal_qubit_devices()};
}

double HonestDevice::chsh() const { return bell::chsh_value(state, devices); }

void ProtocolConfig::validate() const {
  if (n == 0) throw PreconditionViolation("n must be at least 1");
  check_length_inputs(pE, epsilon);
  if (device.devices.dim_a != 2 || device.devices.dim_b != 2 || device.state.rows() != 4 ||
      device.state.cols() != 4) {
    throw DimensionMismatch("honest device model must be a two-qubit state");
  }
}

LengthResult output_length(Mode mode, std::uint64_t nE, std::uint64_t nR, std::uint64_t zeros,
                           double pE, double epsilon) {
  check_length_inputs(pE, epsilon);
  if (zeros > nE) throw PreconditionViolation("more zero outcomes than estimation rounds");
  if (nE == 0 || nR == 0) return no_output();

  const double ne = static_cast<double>(nE);
  const double nr = static_cast<double>(nR);
  const rates::RateProblem problem{mode, pE, static_cast<double>(zeros) / ne,
                                   rates::Weights{ne, nr}};
  LengthResult out;
  out.solution = rates::solve(problem);
  out.optimizer_feasible = out.solution.feasible;
  if (!out.solution.feasible) return no_output();

  const double eps_term = 2.0 * std::log2(1.0 / epsilon);
  if (mode == Mode::xor_bit) {
    out.value = out.solution.objective - nr - eps_term;
    out.m = out.value >= 0.0 ? 1 : 0;
  } else {
    out.value = out.solution.objective - eps_term - 4.0 * std::log2(nr);
    const double floored = std::floor(out.value);
    out.m = floored <= 0.0 ? 0 : std::min<std::uint64_t>(static_cast<std::uint64_t>(floored), nR - 1);
  }
  return out;
}

LengthResult output_length_xor(std::uint64_t nE, std::uint64_t nR, std::uint64_t zeros, double pE,
                               double epsilon) {
  return output_length(Mode::xor_bit, nE, nR, zeros, pE, epsilon);
}

LengthResult output_length_mbit(std::uint64_t nE, std::uint64_t nR, std::uint64_t zeros,
                                double pE, double epsilon) {
  return output_length(Mode::mbit, nE, nR, zeros, pE, epsilon);
}

LengthResult output_length_xor(std::span<const Tag> t, std::span<const std::uint8_t> z, double pE,
                               double epsilon) {
  const Counts c = count(t, z);
  return output_length_xor(c.nE, c.nR, c.zeros, pE, epsilon);
}

LengthResult output_length_mbit(std::span<const Tag> t, std::span<const std::uint8_t> z,
                                double pE, double epsilon) {
  const Counts c = count(t, z);
  return output_length_mbit(c.nE, c.nR, c.zeros, pE, epsilon);
}

bool table_buildable(std::uint64_t nR, std::uint64_t m) {
  return m >= 1 && m < nR && nR <= kMaxTableInput && nR + m <= 30;
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("SEEDLESS_DI_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "seedless-di";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "seedless-di";
  }
  return std::filesystem::temp_directory_path() / "seedless-di";
}

std::uint64_t table_seed(std::uint64_t protocol_seed) {
  return splitmix64(protocol_seed ^ 0x6578747261637421ULL);
}

extract::ExtractorTable cached_table(unsigned n, unsigned m, std::uint64_t seed,
                                     const std::optional<std::filesystem::path>& cache_dir) {
  std::filesystem::path file;
  if (cache_dir) {
    file = *cache_dir / ("table_n" + std::to_string(n) + "_m" + std::to_string(m) + "_s" +
                         std::to_string(seed) + ".txt");
    std::ifstream in(file);
    if (in) {
      try {
        auto g = extract::read_table(in);
        if (g.n_in() == n && g.m_out() == m && extract::certify(g).pass) return g;
      } catch (const ParseError&) {
        // rebuilt below
      }
    }
  }
  auto g = extract::find_certified_table(n, m, 1000, seed).table;
  if (cache_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*cache_dir, ec);
    if (!ec) {
      const auto tmp = file.string() + ".tmp";
      {
        std::ofstream out(tmp);
        extract::write_table(out, g);
      }
      std::filesystem::rename(tmp, file, ec);
    }
  }
  return g;
}

Transcript run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  const auto& dev = cfg.device.devices;
  const ComplexMatrix& rho = cfg.device.state;

  // Born-rule tables: p_est[x][y][2a + b], p_raw[a].
  std::array<std::array<std::array<double, 4>, 2>, 2> p_est{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      double total = 0.0;
      for (int ab = 0; ab < 4; ++ab) {
        const ComplexMatrix op = linalg::kron(dev.alice[x].element(ab >> 1),
                                              dev.bob[y].element(ab & 1));
        const double p = std::max(0.0, linalg::trace_of_product(rho, op).real());
        p_est[x][y][ab] = p;
        total += p;
      }
      for (auto& p : p_est[x][y]) p /= total;
    }
  }
  const double p_raw1 = std::clamp(
      linalg::trace_of_product(rho, linalg::kron(dev.alice[0].element(1), linalg::identity(2)))
          .real(),
      0.0, 1.0);

  Transcript tr;
  tr.seed = cfg.seed;
  tr.n = cfg.n;
  tr.pE = cfg.pE;
  tr.epsilon = cfg.epsilon;
  tr.mode = cfg.mode;
  tr.t.reserve(cfg.n);

  Rng rng(cfg.seed);
  std::uint64_t zeros = 0;
  for (std::uint64_t l = 0; l < cfg.n; ++l) {
    if (rng.bernoulli(cfg.pE)) {
      tr.t.push_back(Tag::estimation);
      const auto x = static_cast<std::uint8_t>(rng.below(2));
      const auto y = static_cast<std::uint8_t>(rng.below(2));
      const double u = rng.uniform();
      const auto& p = p_est[x][y];
      int ab = 0;
      double acc = p[0];
      while (ab < 3 && u >= acc) acc += p[++ab];
      const auto a = static_cast<std::uint8_t>(ab >> 1);
      const auto b = static_cast<std::uint8_t>(ab & 1);
      const auto z = static_cast<std::uint8_t>(a ^ b ^ (x & y));
      tr.x.push_back(x);
      tr.y.push_back(y);
      tr.z.push_back(z);
      zeros += z == 0 ? 1 : 0;
    } else {
      tr.t.push_back(Tag::rawbit);
      tr.a.push_back(rng.uniform() < p_raw1 ? 1 : 0);
    }
  }
  tr.nE = tr.z.size();
  tr.nR = tr.a.size();
  if (tr.nE > 0) tr.q0 = static_cast<double>(zeros) / static_cast<double>(tr.nE);

  tr.mOut = output_length(cfg.mode, tr.nE, tr.nR, zeros, cfg.pE, cfg.epsilon).m;
  if (tr.mOut == 0) {
    tr.extractor = "none";
  } else if (cfg.mode == Mode::xor_bit) {
    std::uint8_t parity = 0;
    for (auto bit : tr.a) parity ^= bit;
    tr.k = {parity};
    tr.extractor = "xor";
  } else if (table_buildable(tr.nR, tr.mOut)) {
    const auto g = cached_table(static_cast<unsigned>(tr.nR), static_cast<unsigned>(tr.mOut),
                                table_seed(cfg.seed), cfg.cache_dir.value_or(default_cache_dir()));
    const std::uint32_t value = g(extract::bits_to_index(tr.a));
    for (std::uint64_t i = 0; i < tr.mOut; ++i) {
      tr.k.push_back(static_cast<std::uint8_t>((value >> (tr.mOut - 1 - i)) & 1u));
    }
    tr.extractor = "table";
  } else {
    tr.extractor = "unavailable";
  }
  return tr;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = (bits.size() + 3) / 4;
  const std::size_t pad = digits * 4 - bits.size();
  std::string out;
  out.reserve(digits);
  unsigned nibble = 0;
  for (std::size_t i = 0; i < digits * 4; ++i) {
    const unsigned bit = i < pad ? 0u : bits[i - pad] & 1u;
    nibble = (nibble << 1) | bit;
    if (i % 4 == 3) {
      out.push_back(kDigits[nibble]);
      nibble = 0;
    }
  }
  return out;
}

nlohmann::json transcript_to_json(const Transcript& tr) {
  nlohmann::json j;
  j["seed"] = tr.seed;
  j["n"] = tr.n;
  j["pE"] = tr.pE;
  j["epsilon"] = tr.epsilon;
  j["mode"] = rates::mode_name(tr.mode);
  j["nE"] = tr.nE;
  j["nR"] = tr.nR;
  j["q0"] = tr.q0 ? nlohmann::json(*tr.q0) : nlohmann::json(nullptr);
  j["mOut"] = tr.mOut;
  j["kHex"] = bits_to_hex(tr.k);
  j["extractor"] = tr.extractor;
  return j;
}

std::array<ComplexMatrix, 2> q_operators(const bell::RoundDevices& devices) {
  const auto d = static_cast<Eigen::Index>(devices.dim());
  std::array<ComplexMatrix, 2> q{ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d)};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const int z = a ^ b ^ (x & y);
          q[z] += 0.25 * linalg::kron(devices.alice[x].element(a), devices.bob[y].element(b));
        }
      }
    }
  }
  return q;
}

double q_identity_residual(const bell::RoundDevices& devices, double s) {
  const auto params = bell::ShiftedChshParams::at(s);
  const auto q = q_operators(devices);
  const ComplexMatrix id = linalg::identity(devices.dim());
  const ComplexMatrix s_op = bell::shifted_chsh_operator(params, devices);
  return std::max(max_abs(s_op - (params.mu() * id - 4.0 * params.nu() * (q[0] - q[1]))),
                  max_abs(q[0] + q[1] - id));
}

double factor_identity_residual(Mode mode, double pE, const rates::RateSolution& sol,
                                const bell::RoundDevices& devices) {
  const auto params = bell::ShiftedChshParams::at(sol.s);
  const auto q = q_operators(devices);
  const ComplexMatrix id = linalg::identity(devices.dim());
  const double c = mode == Mode::mbit ? 1.0 : 0.0;
  const ComplexMatrix lhs =
      (1.0 - pE) * std::pow(2.0, 0.5 * (sol.beta - 1.0)) *
          (c * id + bell::shifted_chsh_operator(params, devices)) +
      pE * (std::pow(2.0, 0.5 * sol.alpha0) * q[0] + std::pow(2.0, 0.5 * sol.alpha1) * q[1]);
  return max_abs(lhs - id);
}

Theorem4Report verify_theorem4_exact(const qsim::TripartiteState& fixture,
                                     std::span<const bell::RoundDevices> devices, double pE,
                                     double epsilon, Mode mode, std::uint64_t seed) {
  check_length_inputs(pE, epsilon);
  const std::size_t n = fixture.n_rounds();
  if (n > 3) throw PreconditionViolation("exact verification is limited to n <= 3 rounds");
  if (devices.size() != n) throw DimensionMismatch("device list does not match the fixture");
  for (std::size_t i = 0; i < n; ++i) {
    if (devices[i].dim_a != fixture.dims_a[i] || devices[i].dim_b != fixture.dims_b[i]) {
      throw DimensionMismatch("round " + std::to_string(i) + ": device dimensions differ");
    }
  }

  std::vector<std::size_t> dims;
  dims.insert(dims.end(), fixture.dims_a.begin(), fixture.dims_a.end());
  dims.insert(dims.end(), fixture.dims_b.begin(), fixture.dims_b.end());
  dims.push_back(fixture.dim_e);

  std::vector<std::array<ComplexMatrix, 2>> q;
  q.reserve(n);
  for (const auto& dev : devices) q.push_back(q_operators(dev));

  Theorem4Report report;
  report.epsilon = epsilon;
  for (std::uint32_t tmask = 0; tmask < (1u << n); ++tmask) {
    std::vector<std::size_t> est;
    std::vector<std::size_t> raw;
    for (std::size_t i = 0; i < n; ++i) ((tmask >> i) & 1u ? est : raw).push_back(i);

    // Estimation pairs (A_j B_j) first, then the raw A's, raw B's and E.
    std::vector<std::size_t> perm;
    for (auto j : est) {
      perm.push_back(j);
      perm.push_back(n + j);
    }
    for (auto i : raw) perm.push_back(i);
    for (auto i : raw) perm.push_back(n + i);
    perm.push_back(2 * n);
    const ComplexMatrix rho = linalg::permute_subsystems(fixture.rho, dims, perm);

    const double p_t = std::pow(pE, static_cast<double>(est.size())) *
                       std::pow(1.0 - pE, static_cast<double>(raw.size()));

    std::vector<std::size_t> raw_a;
    std::vector<std::size_t> raw_b;
    std::vector<bell::RoundDevices> raw_devices;
    for (auto i : raw) {
      raw_a.push_back(fixture.dims_a[i]);
      raw_b.push_back(fixture.dims_b[i]);
      raw_devices.push_back(devices[i]);
    }

    for (std::uint32_t zmask = 0; zmask < (1u << est.size()); ++zmask) {
      ++report.outcomes;
      std::uint64_t zeros = 0;
      ComplexMatrix sigma = rho;
      if (!est.empty()) {
        std::vector<ComplexMatrix> factors;
        for (std::size_t k = 0; k < est.size(); ++k) {
          const unsigned z = (zmask >> k) & 1u;
          zeros += z == 0 ? 1 : 0;
          factors.push_back(q[est[k]][z]);
        }
        sigma = linalg::contract_leading(rho, linalg::kron_all(factors));
      }
      const double p_cond = sigma.trace().real();
      const double p_tz = p_t * p_cond;

      const std::uint64_t m = output_length(mode, est.size(), raw.size(), zeros, pE, epsilon).m;
      if (m == 0) continue;
      ++report.outputs;
      if (p_cond <= kNegligibleProbability) {
        report.conservative_mass += std::max(0.0, p_tz);
        report.lhs_average += 2.0 * std::max(0.0, p_tz);
        continue;
      }
      const auto state = qsim::TripartiteState::make(raw_a, raw_b, fixture.dim_e, sigma / p_cond,
                                                     qsim::Validation::structural);
      const auto g = mode == Mode::xor_bit
                         ? extract::xor_table(static_cast<unsigned>(raw.size()))
                         : cached_table(static_cast<unsigned>(raw.size()),
                                        static_cast<unsigned>(m), table_seed(seed), std::nullopt);
      const double dist =
          qsim::trace_distance_to_ideal(qsim::build_rho_ke(state, raw_devices, g));
      report.lhs_average += p_tz * dist;
    }
  }
  report.pass = report.lhs_average <= epsilon;
  return report;
}

nlohmann::json theorem4_report_to_json(const Theorem4Report& report) {
  return {{"lhsAverage", report.lhs_average},
          {"epsilon", report.epsilon},
          {"pass", report.pass},
          {"outcomes", report.outcomes},
          {"outputs", report.outputs},
          {"conservativeMass", report.conservative_mass}};
}

}  // namespace seedless::spot

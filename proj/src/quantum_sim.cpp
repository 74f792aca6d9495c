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

#include "seedless/quantum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "seedless/errors.hpp"
#include "seedless/random_ops.hpp"

namespace seedless::qsim {

using linalg::Complex;
using linalg::ComplexVector;

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_devices(const TripartiteState& state, std::span<const bell::RoundDevices> devices) {
  if (devices.size() != state.n_rounds()) {
    throw DimensionMismatch("device list has " + std::to_string(devices.size()) +
                            " rounds, state has " + std::to_string(state.n_rounds()));
  }
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (devices[i].dim_a != state.dims_a[i] || devices[i].dim_b != state.dims_b[i]) {
      throw DimensionMismatch("round " + std::to_string(i) + ": device dimensions differ from state");
    }
  }
}

// rho on A (x) B (x) E -> tr_B rho on A (x) E.
ComplexMatrix trace_out_middle(const ComplexMatrix& rho, std::size_t da, std::size_t db,
                               std::size_t de) {
  const auto a = static_cast<Eigen::Index>(da);
  const auto b = static_cast<Eigen::Index>(db);
  const auto e = static_cast<Eigen::Index>(de);
  ComplexMatrix out = ComplexMatrix::Zero(a * e, a * e);
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index j = 0; j < a; ++j) {
      auto dst = out.block(i * e, j * e, e, e);
      for (Eigen::Index k = 0; k < b; ++k) {
        dst += rho.block((i * b + k) * e, (j * b + k) * e, e, e);
      }
    }
  }
  return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

double rhs_product(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                   double s, bool plus_identity, kernels::Exec exec) {
  const auto params = bell::ShiftedChshParams::at(s);
  std::vector<ComplexMatrix> factors;
  factors.reserve(devices.size());
  for (const auto& dev : devices) {
    ComplexMatrix op = bell::shifted_chsh_operator(params, dev);
    if (plus_identity) op += linalg::identity(dev.dim());
    factors.push_back(std::move(op));
  }
  const ComplexMatrix rho_ab = state.reduced_ab();
  return kernels::round_product_expectation(rho_ab, factors, state.dims_a, state.dims_b, exec)
      .real();
}

double mbit_prefactor(std::size_t n, unsigned m) {
  const double nd = static_cast<double>(n);
  return nd * nd * std::pow(2.0, 0.5 * (static_cast<double>(m) - nd));
}

void require_mbit_table(const TripartiteState& state, const extract::ExtractorTable& g,
                        kernels::Exec exec) {
  if (g.n_in() != state.n_rounds()) {
    throw DimensionMismatch("extractor input length differs from the number of rounds");
  }
  if (g.m_out() >= g.n_in()) {
    throw PreconditionViolation("m-bit bound requires m < n_r");
  }
  if (!extract::certify(g, exec).pass) {
    throw PreconditionViolation("extractor table fails the Walsh certificate");
  }
}

}  // namespace

TripartiteState TripartiteState::make(std::vector<std::size_t> dims_a,
                                      std::vector<std::size_t> dims_b, std::size_t dim_e,
                                      ComplexMatrix rho, Validation validation) {
  if (dims_a.empty() || dims_a.size() != dims_b.size()) {
    throw DimensionMismatch("state needs the same positive number of A and B factors");
  }
  const auto is_zero = [](std::size_t d) { return d == 0; };
  if (std::ranges::any_of(dims_a, is_zero) || std::ranges::any_of(dims_b, is_zero) || dim_e == 0) {
    throw DimensionMismatch("zero local dimension");
  }
  const std::size_t total = product(dims_a) * product(dims_b) * dim_e;
  if (total > linalg::kMaxDimension) {
    throw PreconditionViolation("total dimension " + std::to_string(total) +
                                " exceeds the 4096 guard");
  }
  if (static_cast<std::size_t>(rho.rows()) != total || rho.rows() != rho.cols()) {
    throw DimensionMismatch("rho is not " + std::to_string(total) + "x" + std::to_string(total));
  }
  if (linalg::hermiticity_defect(rho) > 1e-10) {
    throw PreconditionViolation("rho is not Hermitian");
  }
  rho = hermitian_part(rho);
  const Complex tr = rho.trace();
  if (std::abs(tr.real() - 1.0) > 1e-10 || std::abs(tr.imag()) > 1e-10) {
    throw PreconditionViolation("rho does not have unit trace");
  }
  if (validation == Validation::full && linalg::min_eigenvalue(rho) < -1e-10) {
    throw PreconditionViolation("rho is not positive semidefinite");
  }
  TripartiteState out;
  out.dims_a = std::move(dims_a);
  out.dims_b = std::move(dims_b);
  out.dim_e = dim_e;
  out.rho = std::move(rho);
  return out;
}

std::size_t TripartiteState::dim_a() const { return product(dims_a); }
std::size_t TripartiteState::dim_b() const { return product(dims_b); }

ComplexMatrix TripartiteState::reduced_ab() const {
  if (dim_e == 1) return rho;
  return linalg::trace_out_trailing(rho, dim_e);
}

ComplexMatrix ClassicalQuantumOutput::rho_e() const {
  if (blocks.empty()) return {};
  ComplexMatrix sum = ComplexMatrix::Zero(blocks.front().rows(), blocks.front().cols());
  for (const auto& b : blocks) sum += b;
  return sum;
}

ClassicalQuantumOutput build_rho_ke(const TripartiteState& state,
                                    std::span<const bell::RoundDevices> devices,
                                    const extract::ExtractorTable& g) {
  check_devices(state, devices);
  if (g.n_in() != state.n_rounds()) {
    throw DimensionMismatch("extractor input length differs from the number of rounds");
  }
  for (std::size_t i = 0; i < devices.size(); ++i) {
    if (!devices[i].alice[0].projective()) {
      throw PreconditionViolation("round " + std::to_string(i) +
                                  ": Alice's setting-0 measurement is not projective");
    }
  }

  // Measure A_1, A_2, ... in turn; after round i, branch[a_1..a_i] is the
  // unnormalised operator on A_{i+1}..A_n E.
  std::vector<ComplexMatrix> branch;
  branch.push_back(trace_out_middle(state.rho, state.dim_a(), state.dim_b(), state.dim_e));
  for (std::size_t i = 0; i < devices.size(); ++i) {
    std::vector<ComplexMatrix> next;
    next.reserve(branch.size() * 2);
    for (const auto& sigma : branch) {
      next.push_back(linalg::contract_leading(sigma, devices[i].alice[0].element(0)));
      next.push_back(linalg::contract_leading(sigma, devices[i].alice[0].element(1)));
    }
    branch = std::move(next);
  }

  ClassicalQuantumOutput out;
  out.m_out = g.m_out();
  const auto de = static_cast<Eigen::Index>(state.dim_e);
  out.blocks.assign(std::size_t{1} << g.m_out(), ComplexMatrix::Zero(de, de));
  for (std::size_t a = 0; a < branch.size(); ++a) out.blocks[g(a)] += branch[a];
  for (auto& b : out.blocks) b = hermitian_part(b);
  return out;
}

double trace_distance_to_ideal(const ClassicalQuantumOutput& out) {
  const ComplexMatrix rho_e = out.rho_e();
  const double weight = std::ldexp(1.0, -static_cast<int>(out.m_out));
  double total = 0.0;
  for (const auto& b : out.blocks) total += linalg::trace_norm(b - weight * rho_e);
  return total;
}

double theorem2_rhs(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                    double s, kernels::Exec exec) {
  check_devices(state, devices);
  return rhs_product(state, devices, s, false, exec);
}

double theorem3_rhs(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                    double s, const extract::ExtractorTable& g, kernels::Exec exec) {
  check_devices(state, devices);
  require_mbit_table(state, g, exec);
  return mbit_prefactor(state.n_rounds(), g.m_out()) *
         rhs_product(state, devices, s, true, exec);
}

std::vector<double> default_s_grid() { return bell::tsirelson_log_grid(64); }

BoundReport verify_bound(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                         const extract::ExtractorTable& g, std::span<const double> s_grid,
                         BoundKind kind, kernels::Exec exec) {
  check_devices(state, devices);
  if (s_grid.empty()) throw PreconditionViolation("empty s grid");
  if (kind == BoundKind::xor_extractor) {
    if (!extract::is_parity_table(g)) {
      throw PreconditionViolation("XOR bound requires the parity table");
    }
    if (g.n_in() != state.n_rounds()) {
      throw DimensionMismatch("extractor input length differs from the number of rounds");
    }
  } else {
    require_mbit_table(state, g, exec);
  }

  BoundReport report;
  report.kind = kind;
  report.lhs = trace_distance_to_ideal(build_rho_ke(state, devices, g));
  report.best_rhs = std::numeric_limits<double>::infinity();
  const bool mbit = kind == BoundKind::mbit;
  const double prefactor = mbit ? mbit_prefactor(state.n_rounds(), g.m_out()) : 1.0;
  for (double s : s_grid) {
    const double rhs = prefactor * rhs_product(state, devices, s, mbit, exec);
    if (rhs < report.best_rhs) {
      report.best_rhs = rhs;
      report.best_s = s;
    }
  }
  report.slack = report.best_rhs - report.lhs;
  report.pass = report.lhs <= report.best_rhs + kBoundTolerance;
  return report;
}

BoundReport verify_bound(const TripartiteState& state, std::span<const bell::RoundDevices> devices,
                         const extract::ExtractorTable& g, std::span<const double> s_grid) {
  const auto kind = extract::is_parity_table(g) ? BoundKind::xor_extractor : BoundKind::mbit;
  return verify_bound(state, devices, g, s_grid, kind);
}

namespace {

std::vector<std::size_t> qubits(std::size_t n) { return std::vector<std::size_t>(n, 2); }

void check_fixture_size(std::size_t n_rounds, std::size_t dim_e) {
  if (n_rounds == 0 || dim_e == 0) throw PreconditionViolation("fixture needs n_r >= 1, dim_e >= 1");
  if (n_rounds > 6 || (std::size_t{1} << (2 * n_rounds)) * dim_e > linalg::kMaxDimension) {
    throw PreconditionViolation("fixture exceeds the 4096 dimension guard");
  }
}

TripartiteState pure_fixture(ComplexVector psi, std::size_t n_rounds, std::size_t dim_e) {
  psi.normalize();
  return TripartiteState::make(qubits(n_rounds), qubits(n_rounds), dim_e, linalg::projector(psi),
                               Validation::structural);
}

}  // namespace

TripartiteState random_purified_fixture(Rng& rng, std::size_t n_rounds, std::size_t dim_e) {
  check_fixture_size(n_rounds, dim_e);
  const std::size_t dab = std::size_t{1} << (2 * n_rounds);
  const ComplexMatrix g = random::ginibre(rng, dab, dim_e);
  // psi[(ab) * dim_e + e] = G[ab, e]
  ComplexVector psi(static_cast<Eigen::Index>(dab * dim_e));
  for (std::size_t ab = 0; ab < dab; ++ab) {
    for (std::size_t e = 0; e < dim_e; ++e) {
      psi(static_cast<Eigen::Index>(ab * dim_e + e)) =
          g(static_cast<Eigen::Index>(ab), static_cast<Eigen::Index>(e));
    }
  }
  return pure_fixture(std::move(psi), n_rounds, dim_e);
}

TripartiteState noisy_bell_fixture(Rng& rng, std::size_t n_rounds, std::size_t dim_e, double w) {
  check_fixture_size(n_rounds, dim_e);
  if (!(w >= 0.0 && w <= 1.0)) throw PreconditionViolation("noise weight outside [0, 1]");
  const std::size_t da = std::size_t{1} << n_rounds;
  const auto dim = static_cast<Eigen::Index>(da * da * dim_e);
  ComplexVector bell = ComplexVector::Zero(dim);
  for (std::size_t a = 0; a < da; ++a) {
    bell(static_cast<Eigen::Index>((a * da + a) * dim_e)) = 1.0;
  }
  bell.normalize();
  ComplexVector noise = random::ginibre(rng, static_cast<std::size_t>(dim), 1).col(0);
  noise.normalize();
  return pure_fixture(std::sqrt(1.0 - w) * bell + std::sqrt(w) * noise, n_rounds, dim_e);
}

TripartiteState random_mixed_fixture(Rng& rng, std::size_t n_rounds, std::size_t dim_e) {
  check_fixture_size(n_rounds, dim_e);
  const std::size_t dim = (std::size_t{1} << (2 * n_rounds)) * dim_e;
  return TripartiteState::make(qubits(n_rounds), qubits(n_rounds), dim_e,
                               random::ginibre_density_matrix(rng, dim, dim),
                               Validation::structural);
}

TripartiteState eve_copy_fixture(std::size_t n_rounds) {
  check_fixture_size(n_rounds, std::size_t{1} << n_rounds);
  const std::size_t da = std::size_t{1} << n_rounds;
  const auto dim = static_cast<Eigen::Index>(da * da * da);
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  const double p = 1.0 / static_cast<double>(da);
  for (std::size_t a = 0; a < da; ++a) {
    const auto idx = static_cast<Eigen::Index>((a * da) * da + a);
    rho(idx, idx) = p;
  }
  return TripartiteState::make(qubits(n_rounds), qubits(n_rounds), da, std::move(rho));
}

TripartiteState product_fixture(std::span<const ComplexMatrix> round_states) {
  const std::size_t n = round_states.size();
  if (n == 0) throw PreconditionViolation("product fixture needs at least one round");
  for (const auto& r : round_states) {
    if (r.rows() != 4 || r.cols() != 4) throw DimensionMismatch("round state must be 4x4");
    if (!linalg::is_hermitian(r, 1e-10) || linalg::min_eigenvalue(r) < -1e-10 ||
        std::abs(r.trace() - Complex(1.0, 0.0)) > 1e-10) {
      throw PreconditionViolation("round state is not a density matrix");
    }
  }
  check_fixture_size(n, 1);
  const ComplexMatrix joint = linalg::kron_all(round_states);  // A1 B1 A2 B2 ...
  std::vector<std::size_t> dims(2 * n, 2);
  std::vector<std::size_t> perm(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    perm[i] = 2 * i;
    perm[n + i] = 2 * i + 1;
  }
  return TripartiteState::make(qubits(n), qubits(n), 1,
                               linalg::permute_subsystems(joint, dims, perm),
                               Validation::structural);
}

std::vector<bell::RoundDevices> optimal_devices(std::size_t n_rounds) {
  return std::vector<bell::RoundDevices>(n_rounds, bell::optimal_qubit_devices());
}

std::vector<bell::RoundDevices> Fixture::devices() const {
  if (device_angles.empty()) return optimal_devices(state.n_rounds());
  std::vector<bell::RoundDevices> out;
  out.reserve(device_angles.size());
  for (const auto& t : device_angles) out.push_back(bell::qubit_devices(t[0], t[1], t[2], t[3]));
  return out;
}

nlohmann::json fixture_to_json(const TripartiteState& state,
                               std::span<const std::array<double, 4>> device_angles) {
  nlohmann::json j;
  j["nRounds"] = state.n_rounds();
  j["dims"] = {{"A", state.dims_a}, {"B", state.dims_b}, {"E", state.dim_e}};
  auto& rho = j["rho"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < state.rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < state.rho.cols(); ++c) {
      rho.push_back({state.rho(r, c).real(), state.rho(r, c).imag()});
    }
  }
  if (!device_angles.empty()) {
    auto& devs = j["devices"] = nlohmann::json::array();
    for (const auto& t : device_angles) devs.push_back(t);
  }
  return j;
}

Fixture fixture_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("nRounds").get<std::size_t>();
    const auto& dims = j.at("dims");
    auto dims_a = dims.at("A").get<std::vector<std::size_t>>();
    auto dims_b = dims.at("B").get<std::vector<std::size_t>>();
    const auto dim_e = dims.at("E").get<std::size_t>();
    if (dims_a.size() != n || dims_b.size() != n) {
      throw ParseError("fixture: dims do not match nRounds");
    }
    const std::size_t total = product(dims_a) * product(dims_b) * dim_e;
    if (total > linalg::kMaxDimension) {
      throw PreconditionViolation("fixture exceeds the 4096 dimension guard");
    }
    const auto& entries = j.at("rho");
    if (!entries.is_array() || entries.size() != total * total) {
      throw ParseError("fixture: rho must have " + std::to_string(total * total) + " entries");
    }
    const auto d = static_cast<Eigen::Index>(total);
    ComplexMatrix rho(d, d);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const auto& e = entries[idx++];
        if (!e.is_array() || e.size() != 2) throw ParseError("fixture: rho entry is not [re, im]");
        rho(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    }
    Fixture out{TripartiteState::make(std::move(dims_a), std::move(dims_b), dim_e, std::move(rho)),
                {}};
    if (j.contains("devices")) {
      out.device_angles = j.at("devices").get<std::vector<std::array<double, 4>>>();
      if (out.device_angles.size() != n) throw ParseError("fixture: devices do not match nRounds");
      for (std::size_t i = 0; i < n; ++i) {
        if (out.state.dims_a[i] != 2 || out.state.dims_b[i] != 2) {
          throw ParseError("fixture: device angles need qubit rounds");
        }
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("fixture: ") + e.what());
  }
}

nlohmann::json bound_report_to_json(const BoundReport& report) {
  return {{"kind", report.kind == BoundKind::xor_extractor ? "xor" : "mbit"},
          {"lhs", report.lhs},
          {"bestRhs", report.best_rhs},
          {"bestS", report.best_s},
          {"slack", report.slack},
          {"pass", report.pass}};
}

}  // namespace seedless::qsim

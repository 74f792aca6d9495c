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

// seedless-di: command-line entry point.
//
// Exit codes: 0 success, 1 a verification failed, 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seedless/bell.hpp"
#include "seedless/errors.hpp"
#include "seedless/extractor.hpp"
#include "seedless/kernels.hpp"
#include "seedless/quantum_sim.hpp"
#include "seedless/random_ops.hpp"
#include "seedless/rate_optimizer.hpp"
#include "seedless/rng.hpp"
#include "seedless/spot_protocol.hpp"

namespace {

using nlohmann::json;
namespace sd = seedless;

constexpr const char* kToolVersion = "0.1.0";


class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  int threads = 0;
  std::string manifest;
};

struct Manifest {
  std::string subcommand;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;

  json to_json() const {
    return {{"subcommand", subcommand},
            {"parameters", parameters},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"outputPaths", outputs},
            {"toolVersion", kToolVersion}};
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
  if (!out) throw UsageError("write failed: " + path);
}

// Writes content to `out` (or stdout) and the manifest next to it.
void emit(const std::string& out_path, const std::string& content, Manifest manifest,
          const Common& common) {
  if (!out_path.empty()) {
    write_file(out_path, content);
    manifest.outputs.push_back(out_path);
  } else {
    std::cout << content;
  }
  const std::string text = manifest.to_json().dump() + "\n";
  if (!out_path.empty()) {
    write_file(out_path + ".manifest.json", text);
  } else if (!common.manifest.empty()) {
    write_file(common.manifest, text);
  } else {
    std::cerr << text;
  }
}

std::optional<std::uint64_t> seed_of(const CLI::Option* opt, std::uint64_t value) {
  return opt->count() ? std::optional<std::uint64_t>(value) : std::nullopt;
}

// ---- verify-thm1 ----------------------------------------------------------

struct Thm1Args {
  std::size_t trials = 200;
  std::size_t s_grid = 50;
  std::uint64_t seed = 0;
  std::string out;
};

int run_verify_thm1(const Thm1Args& a, const Common& common) {
  if (a.trials == 0) throw UsageError("--trials must be positive");
  if (a.s_grid < 2) throw UsageError("--s-grid must be at least 2");
  sd::Rng rng(a.seed);
  std::vector<sd::bell::RoundDevices> devices;
  devices.reserve(a.trials);
  for (std::size_t i = 0; i < a.trials; ++i) devices.push_back(sd::bell::random_qubit_devices(rng));
  const auto grid = sd::bell::clamped_s_grid(a.s_grid);
  const auto sweep = sd::bell::sweep_theorem1(devices, grid);
  const json report = {{"trials", a.trials},
                       {"sGrid", a.s_grid},
                       {"seed", a.seed},
                       {"cases", sweep.cases},
                       {"failures", sweep.failures},
                       {"worstMinEig", sweep.worst_min_eig},
                       {"worstS", sweep.worst_s},
                       {"pass", sweep.failures == 0}};
  Manifest m{"verify-thm1", {{"trials", a.trials}, {"sGrid", a.s_grid}}, a.seed, {}};
  emit(a.out, report.dump() + "\n", m, common);
  return sweep.failures == 0 ? 0 : 1;
}

// ---- find-extractor -------------------------------------------------------

struct FindArgs {
  unsigned n = 0;
  unsigned m = 0;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 1000;
  std::string out;
};

int run_find_extractor(const FindArgs& a, const Common& common) {
  sd::extract::SearchResult result = [&] {
    try {
      return sd::extract::search_extractor(a.n, a.m, a.max_attempts, a.seed);
    } catch (const sd::PreconditionViolation& e) {
      throw UsageError(e.what());
    }
  }();
  json cert = sd::extract::certificate_to_json(result.certificate, a.seed);
  cert["attempts"] = result.attempts;
  Manifest m{"find-extractor",
             {{"n", a.n}, {"m", a.m}, {"maxAttempts", a.max_attempts}},
             a.seed,
             {}};
  if (!a.out.empty()) {
    std::ostringstream table;
    sd::extract::write_table(table, result.table);
    write_file(a.out, table.str());
    write_file(a.out + ".cert.json", cert.dump() + "\n");
    m.outputs = {a.out, a.out + ".cert.json"};
    write_file(a.out + ".manifest.json", m.to_json().dump() + "\n");
    std::cout << cert.dump() << "\n";
  } else {
    emit("", cert.dump() + "\n", m, common);
  }
  return result.certificate.pass ? 0 : 1;
}

// ---- verify-bounds --------------------------------------------------------

struct BoundsArgs {
  std::string fixture;
  std::string mode = "xor";
  std::size_t trials = 1;
  std::size_t rounds = 2;
  std::size_t dim_e = 2;
  unsigned m = 1;
  std::uint64_t seed = 0;
  std::string out;
};

sd::qsim::TripartiteState random_instance(sd::Rng& rng, std::size_t i, std::size_t rounds,
                                          std::size_t dim_e) {
  switch (i % 3) {
    case 0:
      return sd::qsim::random_purified_fixture(rng, rounds, dim_e);
    case 1:
      return sd::qsim::noisy_bell_fixture(rng, rounds, dim_e, rng.uniform(0.0, 0.2));
    default:
      return sd::qsim::random_mixed_fixture(rng, rounds, dim_e);
  }
}

int run_verify_bounds(const BoundsArgs& a, const CLI::Option* seed_opt, const Common& common) {
  const auto mode = sd::rates::parse_mode(a.mode.c_str());
  const bool mbit = mode == sd::rates::Mode::mbit;
  if (a.trials == 0) throw UsageError("--trials must be positive");
  if ((a.fixture.empty() || mbit) && !seed_opt->count()) {
    throw UsageError("--seed is required for random fixtures and m-bit tables");
  }
  const auto grid = sd::qsim::default_s_grid();
  sd::Rng rng(a.seed);

  std::ostringstream lines;
  std::size_t failures = 0;
  const auto check = [&](const sd::qsim::TripartiteState& state,
                         const std::vector<sd::bell::RoundDevices>& devices, std::size_t index) {
    const unsigned n = static_cast<unsigned>(state.n_rounds());
    const auto g = mbit ? sd::extract::find_certified_table(n, a.m, 1000, a.seed).table
                        : sd::extract::xor_table(n);
    const auto kind = mbit ? sd::qsim::BoundKind::mbit : sd::qsim::BoundKind::xor_extractor;
    const auto report = sd::qsim::verify_bound(state, devices, g, grid, kind);
    json j = sd::qsim::bound_report_to_json(report);
    j["instance"] = index;
    lines << j.dump() << "\n";
    if (!report.pass) ++failures;
  };

  std::size_t count = 0;
  if (!a.fixture.empty()) {
    std::ifstream in(a.fixture);
    if (!in) throw UsageError("cannot read fixture " + a.fixture);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw sd::ParseError(std::string("fixture is not valid JSON: ") + e.what());
    }
    const auto fixture = sd::qsim::fixture_from_json(j);
    check(fixture.state, fixture.devices(), 0);
    count = 1;
  } else {
    for (std::size_t i = 0; i < a.trials; ++i) {
      const auto state = random_instance(rng, i, a.rounds, a.dim_e);
      std::vector<sd::bell::RoundDevices> devices;
      for (std::size_t r = 0; r < a.rounds; ++r) {
        devices.push_back(i % 3 == 1 ? sd::bell::optimal_qubit_devices()
                                     : sd::bell::random_qubit_devices(rng));
      }
      check(state, devices, i);
    }
    count = a.trials;
  }
  lines << json{{"summary", true}, {"instances", count}, {"failures", failures},
                {"pass", failures == 0}}
               .dump()
        << "\n";

  Manifest m{"verify-bounds",
             {{"fixture", a.fixture},
              {"mode", a.mode},
              {"trials", a.trials},
              {"rounds", a.rounds},
              {"dimE", a.dim_e},
              {"m", a.m}},
             seed_of(seed_opt, a.seed),
             {}};
  emit(a.out, lines.str(), m, common);
  return failures == 0 ? 0 : 1;
}

// ---- simulate -------------------------------------------------------------

struct SimArgs {
  std::uint64_t n = 0;
  double pe = 0.9;
  double epsilon = 1e-6;
  std::string mode = "xor";
  std::optional<double> chsh_target;
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimArgs& a, const Common& common) {
  sd::spot::ProtocolConfig cfg;
  cfg.n = a.n;
  cfg.pE = a.pe;
  cfg.epsilon = a.epsilon;
  cfg.mode = sd::rates::parse_mode(a.mode.c_str());
  cfg.seed = a.seed;
  if (a.chsh_target) cfg.device = sd::spot::HonestDevice::with_chsh(*a.chsh_target);
  const auto tr = sd::spot::run_protocol(cfg);
  json params = {{"n", a.n}, {"pE", a.pe}, {"epsilon", a.epsilon}, {"mode", a.mode}};
  params["chshTarget"] = a.chsh_target ? json(*a.chsh_target) : json(nullptr);
  emit(a.out, sd::spot::transcript_to_json(tr).dump() + "\n",
       Manifest{"simulate", params, a.seed, {}}, common);
  return 0;
}

// ---- rates / min-chsh -----------------------------------------------------

struct CurveArgs {
  std::string mode;
  std::size_t grid_size = 0;
  std::string out;
};

int run_rates(const CurveArgs& a, const Common& common) {
  const auto mode = sd::rates::parse_mode(a.mode.c_str());
  const auto grid = sd::rates::chsh_grid(a.grid_size);
  const auto points = sd::rates::rate_curves(mode, grid);
  std::ostringstream csv;
  sd::rates::write_rates_csv(csv, points);
  emit(a.out, csv.str(),
       Manifest{"rates", {{"mode", a.mode}, {"gridSize", a.grid_size}}, std::nullopt, {}}, common);
  return 0;
}

int run_min_chsh(const CurveArgs& a, const Common& common) {
  const auto mode = sd::rates::parse_mode(a.mode.c_str());
  const auto grid = sd::rates::pe_grid(a.grid_size);
  const auto points = sd::rates::min_chsh_curve(mode, grid);
  std::ostringstream csv;
  sd::rates::write_min_chsh_csv(csv, points);
  emit(a.out, csv.str(),
       Manifest{"min-chsh", {{"mode", a.mode}, {"gridSize", a.grid_size}}, std::nullopt, {}},
       common);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification laboratory for seedless device-independent randomness extraction"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--manifest", common.manifest,
                 "Manifest path when the subcommand has no --out (default: stderr)");

  Thm1Args thm1;
  auto* c_thm1 = app.add_subcommand("verify-thm1", "Check the shifted-CHSH predictability inequality on random devices");
  c_thm1->add_option("--trials", thm1.trials, "Number of random device sets")->capture_default_str();
  c_thm1->add_option("--s-grid", thm1.s_grid, "Number of s values in (2, 2 sqrt 2)")->capture_default_str();
  c_thm1->add_option("--seed", thm1.seed, "RNG seed")->required();
  c_thm1->add_option("--out", thm1.out, "Report file (default: stdout)");

  FindArgs find;
  auto* c_find = app.add_subcommand("find-extractor", "Search for a Walsh-certified m-bit extractor table");
  c_find->add_option("--n", find.n, "Input bits (> 5)")->required();
  c_find->add_option("--m", find.m, "Output bits (< n)")->required();
  c_find->add_option("--seed", find.seed, "RNG seed")->required();
  c_find->add_option("--max-attempts", find.max_attempts, "Tables to try before giving up")->capture_default_str();
  c_find->add_option("--out", find.out, "Table file; certificate goes to FILE.cert.json");

  BoundsArgs bounds;
  auto* c_bounds = app.add_subcommand("verify-bounds", "Compare the trace distance with the XOR / m-bit security bounds");
  auto* o_fixture = c_bounds->add_option("--fixture", bounds.fixture, "State fixture JSON (default: random states)");
  c_bounds->add_option("--mode", bounds.mode, "xor or mbit")->check(CLI::IsMember({"xor", "mbit"}))->capture_default_str();
  auto* o_trials = c_bounds->add_option("--trials", bounds.trials, "Random states to check")->capture_default_str();
  c_bounds->add_option("--rounds", bounds.rounds, "Rounds per random state")->capture_default_str();
  c_bounds->add_option("--dim-e", bounds.dim_e, "Eve's dimension for random states")->capture_default_str();
  c_bounds->add_option("--m", bounds.m, "Output bits of the m-bit table")->capture_default_str();
  auto* o_bounds_seed = c_bounds->add_option("--seed", bounds.seed, "RNG seed (random states, m-bit tables)");
  c_bounds->add_option("--out", bounds.out, "JSON-lines file (default: stdout)");
  o_fixture->excludes(o_trials);

  SimArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run a spot-checking protocol on honest devices");
  c_sim->add_option("--n", sim.n, "Total rounds")->required();
  c_sim->add_option("--pe", sim.pe, "Estimation probability")->capture_default_str();
  c_sim->add_option("--epsilon", sim.epsilon, "Tolerable error")->capture_default_str();
  c_sim->add_option("--mode", sim.mode, "xor or mbit")->check(CLI::IsMember({"xor", "mbit"}))->capture_default_str();
  c_sim->add_option("--chsh-target", sim.chsh_target, "CHSH value of the isotropic device state (default: 2 sqrt 2)");
  c_sim->add_option("--seed", sim.seed, "RNG seed")->required();
  c_sim->add_option("--out", sim.out, "Transcript file (default: stdout)");

  CurveArgs rates_args{"mbit", 64, ""};
  auto* c_rates = app.add_subcommand("rates", "Maximal extraction and efficiency rates against CHSH");
  c_rates->add_option("--mode", rates_args.mode, "xor or mbit")->check(CLI::IsMember({"xor", "mbit"}))->capture_default_str();
  c_rates->add_option("--grid-size", rates_args.grid_size, "CHSH grid points")->check(CLI::PositiveNumber)->capture_default_str();
  c_rates->add_option("--out", rates_args.out, "CSV file (default: stdout)");

  CurveArgs min_args{"xor", 50, ""};
  auto* c_min = app.add_subcommand("min-chsh", "Minimum CHSH with positive yield against p_e");
  c_min->add_option("--mode", min_args.mode, "xor or mbit")->check(CLI::IsMember({"xor", "mbit"}))->capture_default_str();
  c_min->add_option("--grid-size", min_args.grid_size, "p_e grid points")->check(CLI::Range(2, 100000))->capture_default_str();
  c_min->add_option("--out", min_args.out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  sd::kernels::set_thread_count(common.threads);
  try {
    if (*c_thm1) return run_verify_thm1(thm1, common);
    if (*c_find) return run_find_extractor(find, common);
    if (*c_bounds) return run_verify_bounds(bounds, o_bounds_seed, common);
    if (*c_sim) return run_simulate(sim, common);
    if (*c_rates) return run_rates(rates_args, common);
    if (*c_min) return run_min_chsh(min_args, common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {  // DimensionMismatch, PreconditionViolation
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sd::SearchExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

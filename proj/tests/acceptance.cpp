// Copyright 2026 The wfsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wfs/harness.hpp"

using namespace wfs;

namespace {

constexpr std::uint64_t kSeed = 20261017;
const double kTsirelson = 2 * std::sqrt(2.0);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      pass = false;
      detail += " [!]";
    }
  }
};

CampaignConfig campaign(const std::string& model, ScenarioSpec spec, std::uint64_t seed) {
  CampaignConfig c;
  c.scenario = spec;
  c.model = model;
  c.seed = seed;
  c.format = OutputFormat::None;
  return c;
}

std::vector<double> random_weights(std::mt19937_64& gen) {
  std::gamma_distribution<double> g(0.5);
  std::vector<double> w(kStrategyCount);
  double total = 0;
  for (auto& v : w) total += (v = g(gen));
  for (auto& v : w) v /= total;
  return w;
}

Outcome quantum_violation() {
  Outcome o;
  const auto spec = ScenarioSpec::ewfs(1'000'000);
  const double analytic =
      analytic_quantum_S(entangled_labs(brukner_state()), alice_measurements(spec), bob_measurements(spec));
  o.require(std::abs(analytic - kTsirelson) < 1e-9, "analytic S=%.12f", analytic);
  const auto r = run_campaign(campaign("unitary-qm", spec, kSeed)).inequality;
  o.require(std::abs(r.s - analytic) <= 3 * r.se, "unitary-qm MC S=%.5f SE=%.5f", r.s, r.se);
  return o;
}

Outcome model_separation() {
  Outcome o;
  const auto run = [](const std::string& model, ScenarioSpec spec) {
    return run_campaign(campaign(model, spec, kSeed)).inequality;
  };
  const auto toy_bell = run("toy-theta", ScenarioSpec::standard_bell(1'000'000));
  o.require(toy_bell.s <= 2.0 && std::abs(toy_bell.s) <= 0.01, "toy bell S=%.5f", toy_bell.s);
  const auto toy_ewfs = run("toy-theta", ScenarioSpec::ewfs(1'000'000));
  o.require(toy_ewfs.s >= 2.7, "toy ewfs S=%.5f", toy_ewfs.s);
  const auto col_bell = run("collapse", ScenarioSpec::standard_bell(1'000'000));
  o.require(col_bell.s >= 2.7, "collapse bell S=%.5f", col_bell.s);
  const auto col_ewfs = run("collapse", ScenarioSpec::ewfs(1'000'000));
  o.require(col_ewfs.s <= 2.0 + 3 * col_ewfs.se, "collapse ewfs S=%.5f SE=%.5f", col_ewfs.s, col_ewfs.se);
  return o;
}

// Violating log with a fraction `eps` of nonlocal trials; the rest follow a
// uniformly drawn deterministic strategy with friends copying setting 1.
std::vector<RunRecord> synthetic_log(int mechanism, double eps, std::uint64_t trials, std::uint64_t seed) {
  std::vector<RunRecord> out;
  out.reserve(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    Rng rng(seed, "synthetic", i);
    RunRecord r;
    r.trial = i;
    r.scenario = ScenarioKind::BruknerEWFS;
    r.x = rng.uniform() < 0.5 ? 1 : 2;
    r.y = rng.uniform() < 0.5 ? 1 : 2;
    const int parity = (r.x == 2 && r.y == 2) ? -1 : 1;
    if (rng.uniform() >= eps) {
      const auto s = Strategy::from_id(static_cast<int>(rng() % kStrategyCount));
      r.a = s.a(r.x);
      r.b = s.b(r.y);
      r.c = s.a(1);
      r.d = s.b(1);
    } else if (mechanism == 0) {
      // Shared friend outcome; Bob's answer depends on Alice's setting.
      const int c = rng.sign();
      r.c = r.d = c;
      r.a = c;
      r.b = c * parity;
    } else if (mechanism == 1) {
      // Friends unrelated to the superobservers.
      r.c = rng.sign();
      r.d = rng.sign();
      r.a = rng.sign();
      r.b = r.a * parity;
    } else {
      // Friend outcomes correlated with the later settings.
      const int c = rng.sign();
      r.c = c;
      r.d = c * parity;
      r.a = c;
      r.b = c * parity;
    }
    out.push_back(r);
  }
  return out;
}

Outcome local_friendliness() {
  Outcome o;
  std::mt19937_64 gen(kSeed);
  // One family of 20 campaigns with three statistical checks each.
  CheckOptions options;
  options.k = family_wise_k(3.0, 20 * 3);
  int passing = 0;
  double worst_exact = -1e9;
  for (int i = 0; i < 20; ++i) {
    ModelOptions m;
    m.lhv_weights = random_weights(gen);
    worst_exact = std::max(worst_exact,
                           chsh_max_variant(expectations(BehaviorTable::from_strategy_weights(m.lhv_weights))).s);
    auto c = campaign("lhv", ScenarioSpec::ewfs(100'000), kSeed + i);
    c.model_options = m;
    const auto log = run_trials(c);
    const auto report = check_assumptions(log, options);
    passing += report.all_pass();
    if (!report.all_pass())
      for (const auto& chk : report.checks)
        if (chk.verdict != Verdict::Pass)
          std::fprintf(stderr, "  lhv campaign %d: %s %s\n", i, chk.name.c_str(), std::string(to_string(chk.verdict)).c_str());
  }
  o.require(worst_exact <= 2.0 + 1e-12, "max exact S over 20 lhv=%.12f", worst_exact);
  o.require(passing == 20, "lhv campaigns passing all checks=%d/20", passing);

  std::uniform_real_distribution<double> eps(0.5, 1.0);
  int violators = 0, caught = 0;
  for (int i = 0; i < 30; ++i) {
    const auto log = synthetic_log(i % 3, eps(gen), 20'000, kSeed + 100 + i);
    const auto ineq = evaluate_inequality(tabulate(log));
    if (!(ineq.s > 2.0 + 3 * ineq.se)) continue;
    ++violators;
    const auto report = check_assumptions(log);
    bool failed = false;
    for (const char* name : {"AOE-ii", "AOE-iii", "NSD", "L"}) failed |= report.find(name)->verdict == Verdict::Fail;
    caught += failed;
  }
  o.require(violators >= 10 && caught == violators, "violating synthetic logs caught=%d/%d", caught, violators);
  return o;
}

using Table = std::array<double, 16>;

Table deterministic_table(int id) {
  Table t{};
  const auto s = Strategy::from_id(id);
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) t[BehaviorTable::index(x, y, s.a(x), s.b(y))] = 1.0;
  return t;
}

Table box_table(int alpha, int beta, int gamma) {
  Table t{};
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) {
      const int parity = ((x - 1) * (y - 1) + alpha * (x - 1) + beta * (y - 1) + gamma) % 2;
      for (int a : {1, -1})
        for (int b : {1, -1}) t[BehaviorTable::index(x, y, a, b)] = (a * b == 1) == (parity == 0) ? 0.5 : 0.0;
    }
  return t;
}

Outcome fine_equivalence() {
  Outcome o;
  std::vector<Table> vertices;
  for (int id = 0; id < kStrategyCount; ++id) vertices.push_back(deterministic_table(id));
  for (int k = 0; k < 8; ++k) vertices.push_back(box_table(k & 1, (k >> 1) & 1, (k >> 2) & 1));
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int disagreements = 0, members = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Dirichlet mixture over local vertices plus a random share of one box.
    std::gamma_distribution<double> g(trial % 2 ? 0.3 : 1.0);
    std::vector<double> w(vertices.size(), 0.0);
    double total = 0;
    for (int i = 0; i < kStrategyCount; ++i) total += (w[i] = g(gen));
    const double q = 0.6 * unit(gen);
    for (int i = 0; i < kStrategyCount; ++i) w[i] *= (1 - q) / total;
    w[kStrategyCount + gen() % 8] += q;
    Table t{};
    for (std::size_t v = 0; v < vertices.size(); ++v)
      for (int i = 0; i < 16; ++i) t[i] += w[v] * vertices[v][i];
    const auto table = BehaviorTable::from_probabilities(t);
    const bool lp = local_polytope_feasible(table).member;
    const bool facets = chsh_max_variant(expectations(table)).s <= 2.0 + 1e-7;
    disagreements += lp != facets;
    members += lp;
  }
  o.require(disagreements == 0, "disagreements=%d over 1000 tables (%d local)", disagreements, members);
  return o;
}

Outcome derivation_chain() {
  Outcome o;
  std::mt19937_64 gen(kSeed + 1);
  auto lhv = campaign("lhv", ScenarioSpec::ewfs(100'000), kSeed);
  lhv.model_options.lhv_weights = random_weights(gen);
  const auto lhv_report = verify_derivation_chain(run_trials(lhv));
  o.require(lhv_report.all_hold, "lhv chain %s", lhv_report.all_hold ? "holds" : "breaks");
  const auto col_report = verify_derivation_chain(run_trials(campaign("collapse", ScenarioSpec::ewfs(100'000), kSeed)));
  o.require(col_report.all_hold, "collapse chain %s", col_report.all_hold ? "holds" : "breaks");
  auto spec = ScenarioSpec::ewfs(100'000);
  spec.set_angles(aligned_angles());
  const auto toy = verify_derivation_chain(run_trials(campaign("toy-theta", spec, kSeed)));
  const auto& step = toy.steps.at(1);
  o.require(step.assumption == "AOE" && !step.holds && std::abs(step.delta) >= 0.9,
            "toy <C1D1>=%.4f <A1B1>=%.4f gap=%.4f", step.lhs, step.rhs, std::abs(step.delta));
  return o;
}

Outcome aoe_consistency() {
  Outcome o;
  for (const char* model : {"collapse", "lhv", "toy-theta"}) {
    const auto aoe = check_aoe(run_trials(campaign(model, ScenarioSpec::ewfs(250'000), kSeed)));
    const auto& ii = aoe[1];
    const auto& iii = aoe[2];
    if (std::string(model) == "toy-theta") {
      o.require(ii.statistic < 0.95, "toy freq=%.4f", ii.statistic);
    } else {
      o.require(ii.statistic == 1.0 && iii.statistic == 1.0 && ii.cells[0].n >= 100'000 && iii.cells[0].n >= 100'000,
                "%s freq=%.6f/%.6f over %llu/%llu", model, ii.statistic, iii.statistic,
                static_cast<unsigned long long>(ii.cells[0].n), static_cast<unsigned long long>(iii.cells[0].n));
    }
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "wfsim-acceptance";
  std::filesystem::remove_all(root);
  int identical = 0, compared = 0;
  for (const char* model : {"toy-theta", "collapse", "lhv"}) {
    std::string csv, json;
    for (unsigned threads : {1u, 1u, 4u}) {
      auto c = campaign(model, ScenarioSpec::ewfs(50'000), kSeed);
      c.check_assumptions = true;
      c.threads = threads;
      c.format = OutputFormat::Both;
      c.out_dir = (root / (std::string(model) + "-" + std::to_string(compared))).string();
      write_campaign(c, run_campaign(c));
      const auto dir = std::filesystem::path(c.out_dir);
      const auto this_csv = slurp(dir / (c.label() + "-runs.csv"));
      const auto this_json = slurp(dir / (c.label() + "-report.json"));
      if (csv.empty()) {
        csv = this_csv;
        json = this_json;
      } else {
        identical += this_csv == csv && this_json == json;
      }
      ++compared;
    }
  }
  std::filesystem::remove_all(root);
  o.require(identical == 6, "identical reruns=%d/6 (threads 1,1,4)", identical);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 quantum violation", quantum_violation},
      {"2 model separation", model_separation},
      {"3 local friendliness", local_friendliness},
      {"4 fine equivalence", fine_equivalence},
      {"5 derivation chain", derivation_chain},
      {"6 aoe consistency", aoe_consistency},
      {"7 reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}

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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wfs/assumptions.hpp"

using namespace wfs;

namespace {

std::vector<RunRecord> simulate(const std::string& model, ScenarioSpec spec, std::uint64_t seed,
                                const ModelOptions& options = {}) {
  const auto m = make_model(model, spec, options);
  std::vector<RunRecord> out;
  const auto sampler = SettingsSampler::uniform(seed);
  for (std::uint64_t i = 0; i < spec.trials; ++i) {
    const auto [x, y] = sample_settings(spec, sampler, i);
    Rng rng(seed, model, i);
    out.push_back(m->run_trial(i, x, y, rng));
  }
  return out;
}

Verdict verdict(const AssumptionReport& r, std::string_view name) {
  const auto* c = r.find(name);
  REQUIRE(c != nullptr);
  return c->verdict;
}

}  // namespace

TEST_CASE("family_wise_k") {
  CHECK(family_wise_k(3.0, 1) == 3.0);
  CHECK(family_wise_k(3.0, 0) == 3.0);
  // One-sided tail of 3 sigma is 0.0013499; split over 4 cells.
  CHECK(family_wise_k(3.0, 4) == doctest::Approx(3.39956).epsilon(1e-5));
  CHECK(family_wise_k(3.0, 16) > family_wise_k(3.0, 4));
}

TEST_CASE("check order and names") {
  const auto report = check_assumptions(simulate("lhv", ScenarioSpec::ewfs(2000), 1));
  REQUIRE(report.checks.size() == 6);
  const char* names[] = {"AOE-i", "AOE-ii", "AOE-iii", "NSD", "L", "SI"};
  for (int i = 0; i < 6; ++i) CHECK(report.checks[i].name == names[i]);
  CHECK(report.find("nope") == nullptr);
  CHECK(to_string(Verdict::NotApplicable) == "not-applicable");
}

TEST_CASE("lhv logs satisfy every assumption") {
  std::mt19937_64 gen(7);
  std::gamma_distribution<double> g(0.5);
  ModelOptions o;
  double total = 0;
  o.lhv_weights.resize(16);
  for (auto& w : o.lhv_weights) total += (w = g(gen));
  for (auto& w : o.lhv_weights) w /= total;
  const auto report = check_assumptions(simulate("lhv", ScenarioSpec::ewfs(100'000), 2, o));
  for (const auto& c : report.checks) CHECK_MESSAGE(c.verdict == Verdict::Pass, c.name);
  CHECK(report.all_pass());
  CHECK(report.find("AOE-ii")->statistic == 1.0);
  CHECK(report.find("AOE-iii")->statistic == 1.0);
}

TEST_CASE("collapse: AOE holds exactly, no hidden-state payload") {
  const auto report = check_assumptions(simulate("collapse", ScenarioSpec::ewfs(50'000), 3));
  CHECK(verdict(report, "AOE-i") == Verdict::Pass);
  CHECK(verdict(report, "AOE-ii") == Verdict::Pass);
  CHECK(verdict(report, "AOE-iii") == Verdict::Pass);
  CHECK(verdict(report, "NSD") == Verdict::Pass);
  CHECK(verdict(report, "L") == Verdict::Pass);
  CHECK(verdict(report, "SI") == Verdict::NotApplicable);
  CHECK_FALSE(report.all_pass());
}

TEST_CASE("toy: Alice's outcome disagrees with Charlie's") {
  const auto report = check_assumptions(simulate("toy-theta", ScenarioSpec::ewfs(50'000), 4));
  CHECK(verdict(report, "AOE-i") == Verdict::Pass);
  CHECK(verdict(report, "AOE-ii") == Verdict::Fail);
  CHECK(verdict(report, "AOE-iii") == Verdict::Fail);
  CHECK(report.find("AOE-ii")->statistic < 0.95);
  CHECK(report.find("AOE-ii")->note.find("counterexamples") != std::string::npos);
  CHECK(verdict(report, "NSD") == Verdict::Pass);
  CHECK(verdict(report, "SI") == Verdict::Pass);
}

TEST_CASE("unitary-qm: friend outcomes are undefined") {
  const auto report = check_assumptions(simulate("unitary-qm", ScenarioSpec::ewfs(1000), 5));
  CHECK(verdict(report, "AOE-i") == Verdict::Fail);
  CHECK(report.find("AOE-i")->statistic < 1.0);
  CHECK(verdict(report, "NSD") == Verdict::Inconclusive);
  CHECK(verdict(report, "L") == Verdict::Inconclusive);
}

TEST_CASE("synthetic violations are caught") {
  auto base = simulate("lhv", ScenarioSpec::ewfs(40'000), 6);

  SUBCASE("C copies X: NSD fails with TV near one half") {
    auto log = base;
    for (auto& r : log) r.c = r.x == 1 ? 1 : -1;
    const auto nsd = check_nsd(log);
    CHECK(nsd.verdict == Verdict::Fail);
    CHECK(nsd.statistic == doctest::Approx(0.5).epsilon(0.03));
  }
  SUBCASE("A copies Y: locality fails with TV of one") {
    auto log = base;
    for (auto& r : log) r.a = r.y == 1 ? 1 : -1;
    const auto l = check_locality(log);
    CHECK(l.verdict == Verdict::Fail);
    CHECK(l.statistic == doctest::Approx(1.0));
  }
  SUBCASE("hidden state correlated with settings: SI fails") {
    auto log = base;
    for (auto& r : log) r.lambda.bin = (r.x - 1) * 2 + (r.y - 1) + (r.lambda.bin % 2) * 4;
    CHECK(check_settings_independence(log).verdict == Verdict::Fail);
  }
  SUBCASE("one disagreement fails AOE-ii") {
    auto log = base;
    for (auto& r : log)
      if (r.x == 1) {
        r.c = -r.a;
        break;
      }
    const auto aoe = check_aoe(log);
    CHECK(aoe[0].verdict == Verdict::Pass);
    CHECK(aoe[1].verdict == Verdict::Fail);
    CHECK(aoe[2].verdict == Verdict::Pass);
  }
}

TEST_CASE("sparse cells are inconclusive") {
  const auto log = simulate("lhv", ScenarioSpec::ewfs(120), 8);
  const auto report = check_assumptions(log);
  CHECK(verdict(report, "AOE-i") == Verdict::Pass);
  CHECK(verdict(report, "AOE-ii") == Verdict::Inconclusive);
  CHECK(verdict(report, "AOE-iii") == Verdict::Inconclusive);
  CHECK(verdict(report, "NSD") == Verdict::Inconclusive);
  CHECK(verdict(report, "L") == Verdict::Inconclusive);
  CHECK(verdict(report, "SI") == Verdict::Inconclusive);

  const auto empty = check_assumptions(std::vector<RunRecord>{});
  for (const auto& c : empty.checks) CHECK(c.verdict != Verdict::Pass);
}

TEST_CASE("property: false alarm rate on local logs is small") {
  int failures = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto report = check_assumptions(simulate("lhv", ScenarioSpec::ewfs(20'000), seed));
    failures += !report.all_pass();
  }
  CHECK(failures <= 1);
}

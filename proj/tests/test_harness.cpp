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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wfs/error.hpp"
#include "wfs/harness.hpp"

using namespace wfs;
using nlohmann::json;

namespace {

CampaignConfig config(const std::string& model, ScenarioSpec spec, std::uint64_t seed) {
  CampaignConfig c;
  c.scenario = spec;
  c.model = model;
  c.seed = seed;
  c.check_assumptions = true;
  c.format = OutputFormat::None;
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wfsim-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("output format parsing") {
  CHECK(parse_output_format("json") == OutputFormat::Json);
  CHECK(parse_output_format("csv") == OutputFormat::Csv);
  CHECK(parse_output_format("both") == OutputFormat::Both);
  CHECK(parse_output_format("none") == OutputFormat::None);
  CHECK_THROWS_AS(parse_output_format("xml"), ContractError);
}

TEST_CASE("config validation") {
  auto c = config("lhv", ScenarioSpec::ewfs(10), 1);
  CHECK_NOTHROW(c.validate());
  CHECK(c.label() == "lhv-ewfs");
  c.model = "nope";
  CHECK_THROWS(c.validate());
  c = config("unitary-qm", ScenarioSpec::standard_bell(10), 1);
  CHECK_THROWS_AS(c.validate(), UnsupportedScenarioError);
  c = config("lhv", ScenarioSpec::ewfs(10), 1);
  c.model_options.lhv_weights = {0.5, 0.5};
  CHECK_THROWS(c.validate());
  c.model_options.lhv_weights.clear();
  c.fixed_settings = {{1, 1}};
  CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("campaign_from_json") {
  const auto c = campaign_from_json(json::parse(R"({
    "scenario": "bell", "model": "toy-theta", "trials": 500, "seed": 9,
    "settings": "aligned", "check_assumptions": true, "k": 4.0, "threads": 2,
    "theta_range": 1.5, "out": "dir", "format": "csv"
  })"));
  CHECK(c.scenario.kind == ScenarioKind::StandardBell);
  CHECK(c.scenario.trials == 500);
  CHECK(c.scenario.bob[0].angle == 0.0);
  CHECK(c.model == "toy-theta");
  CHECK(c.seed == 9);
  CHECK(c.check_assumptions);
  CHECK(c.k == 4.0);
  CHECK(c.threads == 2);
  CHECK(c.model_options.theta_range == 1.5);
  CHECK(c.out_dir == "dir");
  CHECK(c.format == OutputFormat::Csv);

  const auto list = comparison_from_json(json::parse(R"({
    "defaults": {"trials": 300, "seed": 4},
    "campaigns": [{"model": "lhv"}, {"model": "collapse", "seed": 5}]
  })"));
  REQUIRE(list.size() == 2);
  CHECK(list[0].scenario.trials == 300);
  CHECK(list[0].seed == 4);
  CHECK(list[1].model == "collapse");
  CHECK(list[1].seed == 5);
  CHECK_THROWS(comparison_from_json(json::parse(R"({"defaults": {}})")));
}

TEST_CASE("trials are identical for every thread count") {
  auto c = config("toy-theta", ScenarioSpec::ewfs(5000), 77);
  c.threads = 1;
  const auto one = records_csv(run_trials(c));
  c.threads = 3;
  CHECK(records_csv(run_trials(c)) == one);
  c.threads = 8;
  CHECK(records_csv(run_trials(c)) == one);
}

TEST_CASE("records_csv") {
  auto c = config("unitary-qm", ScenarioSpec::ewfs(20), 1);
  const auto csv = records_csv(run_trials(c));
  CHECK(csv.rfind("trial,X,Y,A,B,C,D,lambda_tag\n", 0) == 0);
  CHECK(csv.find("NA") != std::string::npos);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 21);
}

TEST_CASE("fixed settings sequence") {
  auto c = config("lhv", ScenarioSpec::ewfs(4), 1);
  c.fixed_settings = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  const auto records = run_trials(c);
  for (int i = 0; i < 4; ++i) {
    CHECK(records[i].x == c.fixed_settings[i].x);
    CHECK(records[i].y == c.fixed_settings[i].y);
  }
}

TEST_CASE("report JSON schema") {
  const auto c = config("lhv", ScenarioSpec::ewfs(20'000), 3);
  const auto result = run_campaign(c);
  const auto j = report_json(c, result);
  for (const char* key : {"config_echo", "per_setting_counts", "expectations", "S", "SE", "S_variant", "S_canonical",
                          "bound", "verdict", "certificate", "assumptions", "derivation_chain"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["bound"] == 2.0);
  CHECK(j["verdict"] == "not-violated");
  CHECK(j["certificate"]["member"] == true);
  CHECK(j["config_echo"]["model"] == "lhv");
  CHECK(j["config_echo"]["seed"] == 3);
  CHECK(j["assumptions"]["AOE-ii"]["verdict"] == "pass");
  CHECK(j["derivation_chain"]["steps"].size() == 6);
}

TEST_CASE("example campaigns") {
  SUBCASE("local model in the extended scenario") {
    const auto r = run_campaign(config("lhv", ScenarioSpec::ewfs(100'000), 1));
    CHECK(r.inequality.s <= 2.0 + 3 * r.inequality.se);
    CHECK_FALSE(r.inequality.violated);
    REQUIRE(r.assumptions);
    CHECK(r.assumptions->all_pass());
  }
  SUBCASE("toy model in the standard scenario") {
    const auto r = run_campaign(config("toy-theta", ScenarioSpec::standard_bell(100'000), 1));
    CHECK(std::abs(r.inequality.canonical_s) <= 3 * r.inequality.se);
    CHECK_FALSE(r.inequality.violated);
    CHECK_FALSE(r.derivation.has_value());
  }
  SUBCASE("unitary quantum model reaches the analytic value") {
    const auto r = run_campaign(config("unitary-qm", ScenarioSpec::ewfs(100'000), 1));
    CHECK(std::abs(r.inequality.s - 2 * std::sqrt(2.0)) <= 3 * r.inequality.se);
    CHECK(r.inequality.violated);
    CHECK(r.assumptions->find("AOE-i")->verdict == Verdict::Fail);
  }
}

TEST_CASE("writing outputs") {
  auto c = config("lhv", ScenarioSpec::ewfs(1000), 2);
  c.format = OutputFormat::Both;
  c.out_dir = scratch("write").string();
  const auto result = run_campaign(c);
  write_campaign(c, result);
  const auto csv = std::filesystem::path(c.out_dir) / "lhv-ewfs-runs.csv";
  const auto report = std::filesystem::path(c.out_dir) / "lhv-ewfs-report.json";
  CHECK(std::filesystem::exists(csv));
  CHECK(std::filesystem::exists(report));
  CHECK(slurp(csv) == records_csv(result.records));
  CHECK(json::parse(slurp(report)) == report_json(c, result));

  c.format = OutputFormat::Json;
  c.out_dir = scratch("json-only").string();
  write_campaign(c, result);
  CHECK_FALSE(std::filesystem::exists(std::filesystem::path(c.out_dir) / "lhv-ewfs-runs.csv"));

  // A regular file where the directory should be.
  const auto blocker = scratch("blocker");
  std::ofstream(blocker) << "x";
  c.out_dir = (blocker / "sub").string();
  CHECK_THROWS_AS(write_campaign(c, result), OutputError);
  std::filesystem::remove(blocker);
}

TEST_CASE("compare_models") {
  std::vector<CampaignConfig> configs = {config("lhv", ScenarioSpec::ewfs(20'000), 5),
                                         config("collapse", ScenarioSpec::ewfs(20'000), 5),
                                         config("toy-theta", ScenarioSpec::ewfs(20'000), 5)};
  for (auto& c : configs) c.check_assumptions = false;
  const auto rows = compare_models(configs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].model == "lhv");
  CHECK(rows[0].aoe_ii == Verdict::Pass);
  CHECK(rows[1].aoe_ii == Verdict::Pass);
  CHECK(rows[2].aoe_ii == Verdict::Fail);
  CHECK(rows[2].violated);
  CHECK_FALSE(rows[0].violated);
  const auto table = format_comparison(rows);
  CHECK(table.find("toy-theta") != std::string::npos);
  CHECK(comparison_json(rows).size() == 3);
  CHECK_THROWS(compare_models(std::span(configs).first(1)));
}

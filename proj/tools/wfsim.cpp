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

// wfsim: run Bell / extended Wigner's-friend campaigns and report CHSH and
// assumption verdicts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wfs/error.hpp"
#include "wfs/harness.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitOutput = 3;

void print_summary(const wfs::CampaignConfig& config, const wfs::CampaignResult& result) {
  const auto& r = result.inequality;
  std::printf("%s: S = %.6f +- %.6f (variant %d, canonical %.6f), %s; local polytope: %s (%s)\n",
              config.label().c_str(), r.s, r.se, r.variant, r.canonical_s, r.violated ? "VIOLATED" : "satisfied",
              r.membership.member ? "member" : "non-member", std::string(wfs::to_string(r.membership.cause)).c_str());
  if (result.assumptions)
    for (const auto& c : result.assumptions->checks)
      std::printf("  %-8s %-14s statistic=%.6f tolerance=%.6f\n", c.name.c_str(),
                  std::string(wfs::to_string(c.verdict)).c_str(), c.statistic, c.tolerance);
  if (result.derivation)
    for (const auto& s : result.derivation->steps)
      std::printf("  %-24s [%-5s] delta=%+.6f SE=%.6f %s\n", s.label.c_str(), s.assumption.c_str(), s.delta, s.se,
                  s.holds ? "holds" : "FAILS");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell and extended Wigner's-friend scenario simulator"};

  std::string scenario = "ewfs", model = "lhv", settings, source, format = "both", out_dir = "results";
  std::string compare_file, lhv_weights;
  std::uint64_t trials = 100000, seed = 0;
  unsigned threads = 1;
  double k = 3.0, theta_range = 0.0;
  bool check = false;

  app.add_option("--scenario", scenario, "bell or ewfs")->check(CLI::IsMember({"bell", "ewfs"}));
  app.add_option("--model", model, "unitary-qm, collapse, toy-theta or lhv")
      ->check(CLI::IsMember({"unitary-qm", "collapse", "toy-theta", "lhv"}));
  app.add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--settings", settings, "angles 'a1,a2;b1,b2' (e.g. 0,pi/2;pi/4,3pi/4) or chsh / aligned");
  app.add_option("--source", source, "EWFS particle state")->check(CLI::IsMember({"brukner", "singlet"}));
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "json, csv, both or none")->check(CLI::IsMember({"json", "csv", "both", "none"}));
  app.add_flag("--check-assumptions", check, "run AOE / NSD / L / settings-independence checks");
  app.add_option("--compare", compare_file, "JSON file listing campaigns to compare");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("-k,--sigma", k, "standard errors for verdicts")->check(CLI::PositiveNumber);
  app.add_option("--lhv-weights", lhv_weights, "16 comma-separated strategy weights");
  app.add_option("--theta-range", theta_range, "toy model angle prior range")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!compare_file.empty()) {
      std::ifstream in(compare_file);
      if (!in) {
        std::cerr << "cannot read " << compare_file << "\n";
        return kExitUsage;
      }
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid comparison file: " << e.what() << "\n";
        return kExitUsage;
      }
      auto configs = wfs::comparison_from_json(doc);
      for (auto& c : configs) {
        if (app.count("--out")) c.out_dir = out_dir;
        if (app.count("--threads")) c.threads = threads;
      }
      const auto rows = wfs::compare_models(configs, true);
      std::cout << wfs::format_comparison(rows);
      const std::filesystem::path dir(configs.front().out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw wfs::OutputError("cannot create " + dir.string() + ": " + ec.message());
      std::ofstream out(dir / "comparison.json", std::ios::trunc);
      if (!out) throw wfs::OutputError("cannot write " + (dir / "comparison.json").string());
      out << wfs::comparison_json(rows).dump(2) << "\n";
      return 0;
    }

    wfs::CampaignConfig config;
    config.scenario = scenario == "bell" ? wfs::ScenarioSpec::standard_bell(trials) : wfs::ScenarioSpec::ewfs(trials);
    if (!settings.empty()) config.scenario.set_angles(wfs::parse_angle_spec(settings));
    if (!source.empty())
      config.scenario.source = source == "brukner" ? wfs::SourceState::Brukner : wfs::SourceState::Singlet;
    config.model = model;
    config.seed = seed;
    config.check_assumptions = check;
    config.k = k;
    config.threads = threads;
    config.out_dir = out_dir;
    config.format = wfs::parse_output_format(format);
    if (theta_range > 0.0) config.model_options.theta_range = theta_range;
    if (!lhv_weights.empty()) {
      std::stringstream ss(lhv_weights);
      std::string item;
      while (std::getline(ss, item, ',')) config.model_options.lhv_weights.push_back(std::stod(item));
    }
    config.validate();

    const auto result = wfs::run_campaign(config);
    wfs::write_campaign(config, result);
    print_summary(config, result);
    return 0;
  } catch (const wfs::OutputError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const wfs::UnsupportedScenarioError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const wfs::ContractError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
}

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

#ifndef WFS_HARNESS_HPP_
#define WFS_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wfs/assumptions.hpp"
#include "wfs/inequality.hpp"
#include "wfs/models.hpp"
#include "wfs/scenario.hpp"

namespace wfs {

/// An output file or directory could not be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Json, Csv, Both, None };

OutputFormat parse_output_format(std::string_view text);

struct CampaignConfig {
  ScenarioSpec scenario = ScenarioSpec::ewfs(1);
  std::string model = "lhv";
  std::uint64_t seed = 0;
  /// Empty: settings drawn uniformly from the seed's settings stream.
  std::vector<SettingPair> fixed_settings;
  ModelOptions model_options;
  bool check_assumptions = false;
  double k = 3.0;
  /// Worker threads; never changes any output.
  unsigned threads = 1;
  std::string out_dir = "results";
  OutputFormat format = OutputFormat::Both;

  void validate() const;
  /// "<model>-<scenario>", used for output file names.
  std::string label() const;
};

/// Reads one campaign from a JSON object; keys absent from `object` keep the
/// values in `base`.
CampaignConfig campaign_from_json(const nlohmann::json& object, const CampaignConfig& base = {});

/// Campaign list of a comparison file: {"defaults": {...}, "campaigns": [...]}.
std::vector<CampaignConfig> comparison_from_json(const nlohmann::json& document);

struct CampaignResult {
  std::vector<RunRecord> records;
  BehaviorTable table;
  InequalityReport inequality;
  std::optional<AssumptionReport> assumptions;
  std::optional<DerivationReport> derivation;
};

/// All trials of a campaign. Trial i uses settings stream (seed, "settings",
/// i) and model stream (seed, model name, i), so the log does not depend on
/// the thread count.
std::vector<RunRecord> run_trials(const CampaignConfig& config);

CampaignResult run_campaign(const CampaignConfig& config);

/// Columns trial,X,Y,A,B,C,D,lambda_tag; undefined friend outcomes as NA.
std::string records_csv(std::span<const RunRecord> records);

nlohmann::json report_json(const CampaignConfig& config, const CampaignResult& result);

/// Writes the CSV and/or JSON selected by `config.format` into
/// `config.out_dir`. Throws OutputError.
void write_campaign(const CampaignConfig& config, const CampaignResult& result);

struct ComparisonRow {
  std::string model;
  std::string scenario;
  double s = 0.0;
  double se = 0.0;
  bool violated = false;
  Verdict aoe_i = Verdict::Inconclusive;
  Verdict aoe_ii = Verdict::Inconclusive;
  Verdict aoe_iii = Verdict::Inconclusive;
  Verdict nsd = Verdict::Inconclusive;
  Verdict locality = Verdict::Inconclusive;
};

ComparisonRow comparison_row(const CampaignConfig& config, const CampaignResult& result);

/// Runs every campaign (assumption checks forced on) and returns one row per
/// campaign. With `write` set, each campaign's outputs are written too.
std::vector<ComparisonRow> compare_models(std::span<const CampaignConfig> configs, bool write = false);

std::string format_comparison(std::span<const ComparisonRow> rows);
nlohmann::json comparison_json(std::span<const ComparisonRow> rows);

}  // namespace wfs

#endif  // WFS_HARNESS_HPP_

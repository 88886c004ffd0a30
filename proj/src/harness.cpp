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

#include "wfs/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "wfs/error.hpp"
#include "wfs/rng.hpp"

namespace wfs {
namespace {

using nlohmann::json;

const char* basis_name(LabBasis b) { return b == LabBasis::Z ? "Z" : "X"; }

json settings_json(const std::vector<Setting>& party, ScenarioKind kind) {
  json out = json::array();
  for (const auto& s : party) {
    json item = {{"angle", s.angle}};
    if (kind == ScenarioKind::BruknerEWFS) item["basis"] = basis_name(s.basis);
    out.push_back(item);
  }
  return out;
}

std::string cell_key(int x, int y) { return std::to_string(x) + std::to_string(y); }

std::string outcome_key(int a, int b) { return std::string(a == 1 ? "+" : "-") + (b == 1 ? "+" : "-"); }

json check_json(const AssumptionCheck& c) {
  json cells = json::array();
  for (const auto& cell : c.cells)
    cells.push_back({{"cell", cell.label},
                     {"n", cell.n},
                     {"statistic", cell.statistic},
                     {"threshold", cell.threshold},
                     {"sparse", cell.sparse}});
  json out = {{"statistic", c.statistic},
              {"tolerance", c.tolerance},
              {"verdict", std::string(to_string(c.verdict))},
              {"cells", cells}};
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace

OutputFormat parse_output_format(std::string_view text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  if (text == "both") return OutputFormat::Both;
  if (text == "none") return OutputFormat::None;
  throw ContractError("unknown output format '" + std::string(text) + "'");
}

void CampaignConfig::validate() const {
  scenario.validate();
  if (std::find(kModelNames.begin(), kModelNames.end(), model) == kModelNames.end())
    throw ContractError("unknown model '" + model + "'");
  if (!(k > 0.0)) throw ContractError("k must be positive");
  checked_strategy_weights(model_options.lhv_weights);
  if (model == "unitary-qm" && scenario.kind != ScenarioKind::BruknerEWFS)
    throw UnsupportedScenarioError("unitary-qm models friends and only runs the ewfs scenario");
  if (!fixed_settings.empty() && fixed_settings.size() < scenario.trials)
    throw ContractError("fixed settings sequence is shorter than the trial count");
}

std::string CampaignConfig::label() const { return model + "-" + std::string(to_string(scenario.kind)); }

CampaignConfig campaign_from_json(const json& object, const CampaignConfig& base) {
  if (!object.is_object()) throw ContractError("campaign entry must be a JSON object");
  CampaignConfig c = base;
  if (object.contains("scenario")) {
    const auto kind = parse_scenario_kind(object.at("scenario").get<std::string>());
    if (kind != c.scenario.kind) {
      const auto trials = c.scenario.trials;
      c.scenario = kind == ScenarioKind::StandardBell ? ScenarioSpec::standard_bell(trials) : ScenarioSpec::ewfs(trials);
    }
  }
  if (object.contains("trials")) {
    const auto t = object.at("trials").get<std::int64_t>();
    if (t < 1) throw ContractError("trials must be positive");
    c.scenario.trials = static_cast<std::uint64_t>(t);
  }
  if (object.contains("settings")) c.scenario.set_angles(parse_angle_spec(object.at("settings").get<std::string>()));
  if (object.contains("source")) {
    const auto s = object.at("source").get<std::string>();
    if (s == "brukner") c.scenario.source = SourceState::Brukner;
    else if (s == "singlet") c.scenario.source = SourceState::Singlet;
    else throw ContractError("unknown source state '" + s + "'");
  }
  if (object.contains("model")) c.model = object.at("model").get<std::string>();
  if (object.contains("seed")) c.seed = object.at("seed").get<std::uint64_t>();
  if (object.contains("check_assumptions")) c.check_assumptions = object.at("check_assumptions").get<bool>();
  if (object.contains("k")) c.k = object.at("k").get<double>();
  if (object.contains("threads")) c.threads = std::max(1u, object.at("threads").get<unsigned>());
  if (object.contains("lhv_weights")) c.model_options.lhv_weights = object.at("lhv_weights").get<std::vector<double>>();
  if (object.contains("theta_range")) c.model_options.theta_range = object.at("theta_range").get<double>();
  if (object.contains("fixed_settings")) {
    c.fixed_settings.clear();
    for (const auto& p : object.at("fixed_settings")) c.fixed_settings.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  }
  if (object.contains("out")) c.out_dir = object.at("out").get<std::string>();
  if (object.contains("format")) c.format = parse_output_format(object.at("format").get<std::string>());
  c.validate();
  return c;
}

std::vector<CampaignConfig> comparison_from_json(const json& document) {
  if (!document.is_object() || !document.contains("campaigns") || !document.at("campaigns").is_array())
    throw ContractError("comparison file needs a \"campaigns\" array");
  CampaignConfig defaults;
  if (document.contains("defaults")) {
    json d = document.at("defaults");
    defaults = campaign_from_json(d, defaults);
  }
  std::vector<CampaignConfig> out;
  for (const auto& entry : document.at("campaigns")) out.push_back(campaign_from_json(entry, defaults));
  return out;
}

std::vector<RunRecord> run_trials(const CampaignConfig& config) {
  config.validate();
  const auto model = make_model(config.model, config.scenario, config.model_options);
  const SettingsSampler sampler = config.fixed_settings.empty() ? SettingsSampler::uniform(config.seed)
                                                                : SettingsSampler::fixed(config.fixed_settings);
  const std::uint64_t n = config.scenario.trials;
  std::vector<RunRecord> records(n);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto [x, y] = sample_settings(config.scenario, sampler, i);
      Rng rng(config.seed, model->name(), i);
      records[i] = model->run_trial(i, x, y, rng);
    }
  };
  const unsigned threads = static_cast<unsigned>(std::clamp<std::uint64_t>(config.threads, 1, n));
  if (threads == 1) {
    work(0, n);
    return records;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = std::min(n, t * chunk), end = std::min(n, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  CampaignResult result;
  result.records = run_trials(config);
  result.table = tabulate(result.records);
  result.inequality = evaluate_inequality(result.table, config.k);
  if (config.check_assumptions) {
    result.assumptions = check_assumptions(result.records, {config.k, 100});
    const bool friends = std::all_of(result.records.begin(), result.records.end(),
                                     [](const RunRecord& r) { return r.c && r.d; });
    bool coverage = true;
    for (int x = 1; x <= 2; ++x)
      for (int y = 1; y <= 2; ++y) coverage = coverage && result.table.trials(x, y) > 0;
    if (friends && coverage) result.derivation = verify_derivation_chain(result.records, config.k);
  }
  return result;
}

std::string records_csv(std::span<const RunRecord> records) {
  std::string out = "trial,X,Y,A,B,C,D,lambda_tag\n";
  out.reserve(records.size() * 48);
  auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("NA"); };
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',' + std::to_string(r.x) + ',' + std::to_string(r.y) + ',' + std::to_string(r.a) + ',' +
           std::to_string(r.b) + ',' + opt(r.c) + ',' + opt(r.d) + ',' + r.lambda.tag + '\n';
  }
  return out;
}

json report_json(const CampaignConfig& config, const CampaignResult& result) {
  const auto& spec = config.scenario;
  json echo = {{"scenario", std::string(to_string(spec.kind))},
               {"model", config.model},
               {"trials", spec.trials},
               {"seed", config.seed},
               {"k", config.k},
               {"check_assumptions", config.check_assumptions},
               {"settings", {{"alice", settings_json(spec.alice, spec.kind)}, {"bob", settings_json(spec.bob, spec.kind)}}},
               {"settings_sampler", config.fixed_settings.empty() ? "uniform-iid" : "fixed-sequence"}};
  if (spec.kind == ScenarioKind::BruknerEWFS) echo["source"] = std::string(to_string(spec.source));
  if (config.model == "lhv") echo["lhv_weights"] = checked_strategy_weights(config.model_options.lhv_weights);
  if (config.model == "toy-theta") echo["theta_range"] = config.model_options.theta_range;

  json counts = json::object(), expectations_out = json::object();
  const auto e = expectations(result.table);
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) {
      json cell = {{"total", result.table.trials(x, y)}};
      for (int a : {1, -1})
        for (int b : {1, -1}) cell[outcome_key(a, b)] = result.table.count(x, y, a, b);
      counts[cell_key(x, y)] = cell;
      expectations_out[cell_key(x, y)] = {{"E", e(x, y)}, {"SE", e.se[x - 1][y - 1]}};
    }

  const auto& ineq = result.inequality;
  const auto& m = ineq.membership;
  json report = {{"config_echo", echo},
                 {"per_setting_counts", counts},
                 {"expectations", expectations_out},
                 {"S", ineq.s},
                 {"SE", ineq.se},
                 {"S_variant", ineq.variant},
                 {"S_canonical", ineq.canonical_s},
                 {"bound", ineq.bound},
                 {"verdict", ineq.violated ? "violated" : "not-violated"},
                 {"certificate",
                  {{"member", m.member},
                   {"cause", std::string(to_string(m.cause))},
                   {"weights", m.weights},
                   {"residual_l1", m.residual_l1},
                   {"tolerance", m.tolerance},
                   {"max_signaling", m.max_signaling}}}};
  if (result.assumptions) {
    json a = json::object();
    for (const auto& c : result.assumptions->checks) a[c.name] = check_json(c);
    report["assumptions"] = a;
  } else {
    report["assumptions"] = nullptr;
  }
  if (result.derivation) {
    json steps = json::array();
    for (const auto& s : result.derivation->steps)
      steps.push_back({{"identity", s.label},
                       {"assumption", s.assumption},
                       {"lhs", s.lhs},
                       {"rhs", s.rhs},
                       {"delta", s.delta},
                       {"SE", s.se},
                       {"holds", s.holds}});
    report["derivation_chain"] = {{"steps", steps},
                                  {"four_party_chsh", result.derivation->four_party_chsh},
                                  {"four_party_SE", result.derivation->four_party_se},
                                  {"all_hold", result.derivation->all_hold}};
  }
  return report;
}

void write_campaign(const CampaignConfig& config, const CampaignResult& result) {
  if (config.format == OutputFormat::None) return;
  const std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw OutputError("cannot create output directory " + dir.string());
  if (config.format == OutputFormat::Csv || config.format == OutputFormat::Both)
    write_file(dir / (config.label() + "-runs.csv"), records_csv(result.records));
  if (config.format == OutputFormat::Json || config.format == OutputFormat::Both)
    write_file(dir / (config.label() + "-report.json"), report_json(config, result).dump(2) + "\n");
}

ComparisonRow comparison_row(const CampaignConfig& config, const CampaignResult& result) {
  ComparisonRow row;
  row.model = config.model;
  row.scenario = std::string(to_string(config.scenario.kind));
  row.s = result.inequality.s;
  row.se = result.inequality.se;
  row.violated = result.inequality.violated;
  if (result.assumptions) {
    auto v = [&](const char* name) {
      const auto* c = result.assumptions->find(name);
      return c ? c->verdict : Verdict::Inconclusive;
    };
    row.aoe_i = v("AOE-i");
    row.aoe_ii = v("AOE-ii");
    row.aoe_iii = v("AOE-iii");
    row.nsd = v("NSD");
    row.locality = v("L");
  }
  return row;
}

std::vector<ComparisonRow> compare_models(std::span<const CampaignConfig> configs, bool write) {
  if (configs.size() < 2) throw ContractError("a comparison needs at least two campaigns");
  std::vector<ComparisonRow> rows;
  for (CampaignConfig c : configs) {
    c.check_assumptions = true;
    const auto result = run_campaign(c);
    if (write) write_campaign(c, result);
    rows.push_back(comparison_row(c, result));
  }
  return rows;
}

std::string format_comparison(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-11s %-9s %9s %8s  %-12s %-12s %-12s %-12s %-12s %-12s\n", "model", "scenario",
                "S", "SE", "verdict", "AOE-i", "AOE-ii", "AOE-iii", "NSD", "L");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-11s %-9s %9.5f %8.5f  %-12s %-12s %-12s %-12s %-12s %-12s\n", r.model.c_str(),
                  r.scenario.c_str(), r.s, r.se, r.violated ? "violated" : "satisfied",
                  std::string(to_string(r.aoe_i)).c_str(), std::string(to_string(r.aoe_ii)).c_str(),
                  std::string(to_string(r.aoe_iii)).c_str(), std::string(to_string(r.nsd)).c_str(),
                  std::string(to_string(r.locality)).c_str());
    out << line;
  }
  return out.str();
}

json comparison_json(std::span<const ComparisonRow> rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"model", r.model},
                   {"scenario", r.scenario},
                   {"S", r.s},
                   {"SE", r.se},
                   {"verdict", r.violated ? "violated" : "not-violated"},
                   {"AOE-i", std::string(to_string(r.aoe_i))},
                   {"AOE-ii", std::string(to_string(r.aoe_ii))},
                   {"AOE-iii", std::string(to_string(r.aoe_iii))},
                   {"NSD", std::string(to_string(r.nsd))},
                   {"L", std::string(to_string(r.locality))}});
  return out;
}

}  // namespace wfs

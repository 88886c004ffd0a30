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

#include "wfs/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wfs/error.hpp"
#include "wfs/rng.hpp"

namespace wfs {
namespace {

constexpr double kPi = std::numbers::pi;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ContractError("bad number in angle spec: '" + std::string(s) + "'");
  return value;
}

// [sign][coef][pi][/den]
double parse_angle(std::string_view term) {
  term = trim(term);
  if (term.empty()) throw ContractError("empty angle in angle spec");
  double sign = 1.0;
  if (term.front() == '-' || term.front() == '+') {
    if (term.front() == '-') sign = -1.0;
    term.remove_prefix(1);
  }
  double den = 1.0;
  if (auto slash = term.find('/'); slash != std::string_view::npos) {
    den = parse_number(trim(term.substr(slash + 1)));
    if (den == 0.0) throw ContractError("zero denominator in angle spec");
    term = trim(term.substr(0, slash));
  }
  double value = 1.0;
  if (auto p = term.find("pi"); p != std::string_view::npos) {
    if (p + 2 != term.size()) throw ContractError("'pi' must end the numerator in angle spec");
    auto coef = trim(term.substr(0, p));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    value = (coef.empty() ? 1.0 : parse_number(coef)) * kPi;
  } else {
    value = parse_number(term);
  }
  return sign * value / den;
}

std::array<double, 2> parse_party(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
    throw ContractError("each party needs exactly two angles: '" + std::string(text) + "'");
  return {parse_angle(text.substr(0, comma)), parse_angle(text.substr(comma + 1))};
}

}  // namespace

AnglePair chsh_angles() { return {{0.0, kPi / 2}, {kPi / 4, 3 * kPi / 4}}; }
AnglePair aligned_angles() { return {{0.0, kPi / 2}, {0.0, kPi / 2}}; }

AnglePair parse_angle_spec(std::string_view text) {
  text = trim(text);
  if (text == "chsh") return chsh_angles();
  if (text == "aligned") return aligned_angles();
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) throw ContractError("angle spec needs 'a1,a2;b1,b2'");
  return {parse_party(text.substr(0, semi)), parse_party(text.substr(semi + 1))};
}

ScenarioSpec ScenarioSpec::standard_bell(std::uint64_t trials) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::StandardBell;
  spec.alice = {Setting{}, Setting{}};
  spec.bob = {Setting{}, Setting{}};
  spec.trials = trials;
  spec.source = SourceState::Singlet;
  spec.set_angles(chsh_angles());
  return spec;
}

ScenarioSpec ScenarioSpec::ewfs(std::uint64_t trials) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::BruknerEWFS;
  spec.alice = {Setting{LabBasis::Z, 0.0}, Setting{LabBasis::X, 0.0}};
  spec.bob = {Setting{LabBasis::Z, 0.0}, Setting{LabBasis::X, 0.0}};
  spec.trials = trials;
  spec.source = SourceState::Brukner;
  spec.set_angles(chsh_angles());
  return spec;
}

void ScenarioSpec::set_angles(const AnglePair& angles) {
  if (alice.size() != 2 || bob.size() != 2) throw ContractError("angle presets need two settings per party");
  for (int i = 0; i < 2; ++i) {
    alice[i].angle = angles.alice[i];
    bob[i].angle = angles.bob[i];
  }
}

void ScenarioSpec::validate() const {
  if (trials < 1) throw ContractError("trials must be positive");
  if (alice.size() < 2 || bob.size() < 2) throw ContractError("each party needs at least two settings");
  if (alice.size() > 2 || bob.size() > 2) throw ContractError("only two settings per party are supported");
  if (kind == ScenarioKind::BruknerEWFS) {
    if (alice[0].basis != LabBasis::Z || bob[0].basis != LabBasis::Z)
      throw ContractError("EWFS setting 1 must be the Z lab measurement");
  }
  for (const auto* party : {&alice, &bob})
    for (const auto& s : *party)
      if (!std::isfinite(s.angle)) throw ContractError("setting angle must be finite");
}

std::string_view to_string(ScenarioKind kind) {
  return kind == ScenarioKind::StandardBell ? "bell" : "ewfs";
}

std::string_view to_string(SourceState source) {
  return source == SourceState::Brukner ? "brukner" : "singlet";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "bell") return ScenarioKind::StandardBell;
  if (text == "ewfs") return ScenarioKind::BruknerEWFS;
  throw ContractError("unknown scenario '" + std::string(text) + "' (expected bell or ewfs)");
}

SettingPair sample_settings(const ScenarioSpec& spec, const SettingsSampler& sampler, std::uint64_t trial_index) {
  if (trial_index >= spec.trials) throw std::out_of_range("trial index out of range");
  if (sampler.mode == SettingsSampler::Mode::FixedSequence) {
    if (sampler.sequence.empty()) throw ContractError("fixed-sequence sampler has no entries");
    const auto& p = sampler.sequence[trial_index % sampler.sequence.size()];
    if (p.x < 1 || p.x > static_cast<int>(spec.alice.size()) || p.y < 1 || p.y > static_cast<int>(spec.bob.size()))
      throw ContractError("fixed-sequence setting out of range");
    return p;
  }
  Rng rng(sampler.seed, "settings", trial_index);
  const auto nx = spec.alice.size(), ny = spec.bob.size();
  const auto draw = rng() % (nx * ny);  // bias ~2^-62, irrelevant at these sizes
  return {static_cast<int>(draw / ny) + 1, static_cast<int>(draw % ny) + 1};
}

}  // namespace wfs

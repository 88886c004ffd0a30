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

#ifndef WFS_SCENARIO_HPP_
#define WFS_SCENARIO_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfs/qcore.hpp"

namespace wfs {

enum class ScenarioKind { StandardBell, BruknerEWFS };

/// Two-particle state fed into the labs in an EWFS run.
enum class SourceState { Brukner, Singlet };

/// One measurement choice of a party. In a standard Bell run only `angle`
/// is used (spin axis in the x-z plane, radians from z). In an EWFS run,
/// `basis` selects the lab measurement and `angle` is the spin axis used by
/// models whose superobservers act like spin measurements on the particle.
struct Setting {
  LabBasis basis = LabBasis::Z;
  double angle = 0.0;
};

struct AnglePair {
  std::array<double, 2> alice;
  std::array<double, 2> bob;
};

/// Alice {0, pi/2}, Bob {pi/4, 3pi/4}.
AnglePair chsh_angles();
/// Alice {0, pi/2}, Bob {0, pi/2}: setting 1 is the friend's z axis on both sides.
AnglePair aligned_angles();

/// Parses "a1,a2;b1,b2" with terms like 0, 0.5, pi, pi/4, 3pi/4, -pi/8, or
/// one of the preset names "chsh" and "aligned".
AnglePair parse_angle_spec(std::string_view text);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::BruknerEWFS;
  std::vector<Setting> alice;
  std::vector<Setting> bob;
  std::uint64_t trials = 1;
  SourceState source = SourceState::Brukner;

  static ScenarioSpec standard_bell(std::uint64_t trials);
  static ScenarioSpec ewfs(std::uint64_t trials);

  void set_angles(const AnglePair& angles);

  /// Throws ContractError when an invariant does not hold.
  void validate() const;
};

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(SourceState source);
ScenarioKind parse_scenario_kind(std::string_view text);

struct SettingPair {
  int x;
  int y;
  bool operator==(const SettingPair&) const = default;
};

struct SettingsSampler {
  enum class Mode { UniformIid, FixedSequence };
  Mode mode = Mode::UniformIid;
  std::uint64_t seed = 0;
  /// Cycled by trial index in FixedSequence mode.
  std::vector<SettingPair> sequence;

  static SettingsSampler uniform(std::uint64_t seed) { return {Mode::UniformIid, seed, {}}; }
  static SettingsSampler fixed(std::vector<SettingPair> sequence) {
    return {Mode::FixedSequence, 0, std::move(sequence)};
  }
};

/// Settings of one trial. Drawn from the ("settings", trial_index) stream,
/// disjoint from every model stream.
SettingPair sample_settings(const ScenarioSpec& spec, const SettingsSampler& sampler, std::uint64_t trial_index);

}  // namespace wfs

#endif  // WFS_SCENARIO_HPP_

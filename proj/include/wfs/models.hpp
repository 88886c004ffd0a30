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

#ifndef WFS_MODELS_HPP_
#define WFS_MODELS_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfs/rng.hpp"
#include "wfs/scenario.hpp"

namespace wfs {

/// Model-specific hidden state of a trial. `bin` is the model's declared
/// discretization for settings-independence checks; -1 means no payload.
struct Lambda {
  std::string tag;
  int bin = -1;
};

struct RunRecord {
  std::uint64_t trial = 0;
  ScenarioKind scenario = ScenarioKind::BruknerEWFS;
  int x = 1;
  int y = 1;
  int a = 1;
  int b = 1;
  std::optional<int> c;
  std::optional<int> d;
  Lambda lambda;
};

/// Deterministic local strategy (A1, A2, B1, B2). Id bits 0..3 hold A1, A2,
/// B1, B2 with a clear bit meaning +1.
struct Strategy {
  std::array<int, 2> alice;
  std::array<int, 2> bob;

  static Strategy from_id(int id);
  int id() const;
  int a(int x) const { return alice[x - 1]; }
  int b(int y) const { return bob[y - 1]; }
};

inline constexpr int kStrategyCount = 16;

/// Angles of the toy hidden-variable model.
struct ToyHiddenState {
  double theta1;
  double theta2;

  /// Both angles uniform on [0, range).
  static ToyHiddenState prepare(Rng& rng, double range);
};

/// Outcome +1 with probability cos^2(theta), -1 otherwise; theta is then
/// set to 0 (+1) or pi/2 (-1) so an immediate repeat gives the same result.
int measure_toy_angle(double& theta, Rng& rng);

struct ModelOptions {
  /// Weights over the 16 strategies (lhv only). Empty means uniform.
  std::vector<double> lhv_weights;
  /// Toy model angle prior is uniform on [0, theta_range).
  double theta_range = 3.14159265358979323846;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual std::string_view name() const = 0;
  /// Produces one record. `rng` is the trial's model stream.
  virtual RunRecord run_trial(std::uint64_t trial, int x, int y, Rng& rng) const = 0;
};

inline constexpr std::array<std::string_view, 4> kModelNames = {"unitary-qm", "collapse", "toy-theta", "lhv"};

/// Throws ContractError for unknown names, UnsupportedScenarioError when the
/// model cannot run `spec`.
std::unique_ptr<Model> make_model(std::string_view name, const ScenarioSpec& spec, const ModelOptions& options = {});

RunRecord run_trial_unitary_qm(const ScenarioSpec& spec, int x, int y, Rng& rng);
RunRecord run_trial_collapse(const ScenarioSpec& spec, int x, int y, Rng& rng);
RunRecord run_trial_toy(const ScenarioSpec& spec, int x, int y, Rng& rng, const ModelOptions& options = {});
RunRecord run_trial_lhv(const ScenarioSpec& spec, int x, int y, Rng& rng, std::span<const double> weights);

/// Uniform weights when `weights` is empty; throws if they do not sum to 1
/// within 1e-9 or contain a negative entry.
std::vector<double> checked_strategy_weights(std::span<const double> weights);

}  // namespace wfs

#endif  // WFS_MODELS_HPP_

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

#include "wfs/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wfs/error.hpp"
#include "wfs/qcore.hpp"

namespace wfs {
namespace {

using Proj = Projector<double>;
using ProjSet = std::vector<Proj>;

int outcome_value(int index) {
  if (index == 0) return +1;
  if (index == 1) return -1;
  throw std::logic_error("measurement landed in the inconsistent-lab subspace");
}

StateVector<double> source_state(const ScenarioSpec& spec) {
  return spec.source == SourceState::Brukner ? brukner_state() : singlet();
}

ProjSet on_first(const ProjSet& local) {
  ProjSet out;
  for (const auto& p : local) out.push_back(tensor(p, Proj::identity(2)));
  return out;
}

ProjSet on_second(const ProjSet& local) {
  ProjSet out;
  for (const auto& p : local) out.push_back(tensor(Proj::identity(2), p));
  return out;
}

class UnitaryQmModel final : public Model {
 public:
  explicit UnitaryQmModel(const ScenarioSpec& spec) : kind_(spec.kind) {
    if (spec.kind != ScenarioKind::BruknerEWFS)
      throw UnsupportedScenarioError("unitary-qm models friends and only runs the ewfs scenario");
    const auto labs = entangled_labs(source_state(spec));
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        joint_[x][y] = joint_probabilities(labs, lab_measurement<double>(1, spec.alice[x].basis),
                                           lab_measurement<double>(2, spec.bob[y].basis));
  }

  std::string_view name() const override { return "unitary-qm"; }

  RunRecord run_trial(std::uint64_t trial, int x, int y, Rng& rng) const override {
    const auto& probs = joint_[x - 1][y - 1];
    const int i = sample_index<double>(probs, rng.uniform());
    RunRecord r{trial, kind_, x, y, outcome_value(i / 3), outcome_value(i % 3), {}, {}, {}};
    if (x == 1) r.c = r.a;
    if (y == 1) r.d = r.b;
    return r;
  }

 private:
  ScenarioKind kind_;
  std::array<std::array<std::vector<double>, 2>, 2> joint_;
};

class CollapseModel final : public Model {
 public:
  explicit CollapseModel(const ScenarioSpec& spec) : kind_(spec.kind), state_(source_state(spec)) {
    if (kind_ == ScenarioKind::BruknerEWFS) {
      charlie_ = on_first(z_basis());
      debbie_ = on_second(z_basis());
      for (int i = 0; i < 2; ++i) {
        alice_[i] = lab_measurement_basis<double>(1, spec.alice[i].basis);
        bob_[i] = lab_measurement_basis<double>(2, spec.bob[i].basis);
      }
    } else {
      for (int i = 0; i < 2; ++i) {
        alice_[i] = on_first(spin_basis(spec.alice[i].angle));
        bob_[i] = on_second(spin_basis(spec.bob[i].angle));
      }
    }
  }

  std::string_view name() const override { return "collapse"; }

  RunRecord run_trial(std::uint64_t trial, int x, int y, Rng& rng) const override {
    RunRecord r{trial, kind_, x, y, 1, 1, {}, {}, {}};
    if (kind_ == ScenarioKind::StandardBell) {
      const auto first = project_and_collapse<double>(state_, alice_[x - 1], rng);
      const auto second = project_and_collapse<double>(first.state, bob_[y - 1], rng);
      r.a = outcome_value(first.outcome);
      r.b = outcome_value(second.outcome);
      return r;
    }
    // Each friend's z measurement collapses the pair; the labs then hold
    // definite records |Z_C> and |Z_D>.
    const auto charlie = project_and_collapse<double>(state_, charlie_, rng);
    const auto debbie = project_and_collapse<double>(charlie.state, debbie_, rng);
    r.c = outcome_value(charlie.outcome);
    r.d = outcome_value(debbie.outcome);
    const auto lab1 = StateVector<double>::basis({2, 2}, *r.c == 1 ? 0 : 3);
    const auto lab2 = StateVector<double>::basis({2, 2}, *r.d == 1 ? 0 : 3);
    r.a = outcome_value(project_and_collapse<double>(lab1, alice_[x - 1], rng).outcome);
    r.b = outcome_value(project_and_collapse<double>(lab2, bob_[y - 1], rng).outcome);
    return r;
  }

 private:
  ScenarioKind kind_;
  StateVector<double> state_;
  ProjSet charlie_, debbie_;
  std::array<ProjSet, 2> alice_, bob_;
};

class ToyModel final : public Model {
 public:
  ToyModel(const ScenarioSpec& spec, const ModelOptions& options)
      : kind_(spec.kind), range_(options.theta_range) {
    if (!(range_ > 0.0) || !std::isfinite(range_)) throw ContractError("theta_range must be positive");
    if (kind_ == ScenarioKind::BruknerEWFS) {
      const auto pair = singlet();
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          superobservers_[x][y] = joint_probabilities(pair, spin_measurement(spec.alice[x].angle),
                                                      spin_measurement(spec.bob[y].angle));
    }
  }

  std::string_view name() const override { return "toy-theta"; }

  RunRecord run_trial(std::uint64_t trial, int x, int y, Rng& rng) const override {
    ToyHiddenState h = ToyHiddenState::prepare(rng, range_);
    RunRecord r{trial, kind_, x, y, 1, 1, {}, {}, {}};
    char tag[64];
    std::snprintf(tag, sizeof tag, "theta=%.9f;%.9f", h.theta1, h.theta2);
    r.lambda = {tag, quadrant(h.theta1) * 4 + quadrant(h.theta2)};
    if (kind_ == ScenarioKind::StandardBell) {
      r.a = measure_toy_angle(h.theta1, rng);
      r.b = measure_toy_angle(h.theta2, rng);
      return r;
    }
    r.c = measure_toy_angle(h.theta1, rng);
    r.d = measure_toy_angle(h.theta2, rng);
    // Superobservers see collapse-model statistics of the singlet,
    // independent of the friends' results.
    const int i = sample_index<double>(superobservers_[x - 1][y - 1], rng.uniform());
    r.a = outcome_value(i / 2);
    r.b = outcome_value(i % 2);
    return r;
  }

 private:
  int quadrant(double theta) const {
    return std::clamp(static_cast<int>(std::floor(4.0 * theta / range_)), 0, 3);
  }

  ScenarioKind kind_;
  double range_;
  std::array<std::array<std::vector<double>, 2>, 2> superobservers_;
};

class LhvModel final : public Model {
 public:
  LhvModel(const ScenarioSpec& spec, std::span<const double> weights)
      : kind_(spec.kind), weights_(checked_strategy_weights(weights)) {}

  std::string_view name() const override { return "lhv"; }

  RunRecord run_trial(std::uint64_t trial, int x, int y, Rng& rng) const override {
    const int id = sample_index<double>(weights_, rng.uniform());
    const Strategy s = Strategy::from_id(id);
    RunRecord r{trial, kind_, x, y, s.a(x), s.b(y), {}, {}, {"s=" + std::to_string(id), id}};
    if (kind_ == ScenarioKind::BruknerEWFS) {
      r.c = s.a(1);
      r.d = s.b(1);
    }
    return r;
  }

 private:
  ScenarioKind kind_;
  std::vector<double> weights_;
};

}  // namespace

Strategy Strategy::from_id(int id) {
  if (id < 0 || id >= kStrategyCount) throw ContractError("strategy id out of range");
  auto bit = [id](int k) { return ((id >> k) & 1) ? -1 : +1; };
  return {{bit(0), bit(1)}, {bit(2), bit(3)}};
}

int Strategy::id() const {
  auto bit = [](int v) { return v == -1 ? 1 : 0; };
  return bit(alice[0]) | bit(alice[1]) << 1 | bit(bob[0]) << 2 | bit(bob[1]) << 3;
}

ToyHiddenState ToyHiddenState::prepare(Rng& rng, double range) {
  const double t1 = rng.uniform() * range;
  const double t2 = rng.uniform() * range;
  return {t1, t2};
}

int measure_toy_angle(double& theta, Rng& rng) {
  const double c = std::cos(theta);
  const int outcome = rng.uniform() < c * c ? +1 : -1;
  theta = outcome == +1 ? 0.0 : std::numbers::pi / 2;
  return outcome;
}

std::vector<double> checked_strategy_weights(std::span<const double> weights) {
  if (weights.empty()) return std::vector<double>(kStrategyCount, 1.0 / kStrategyCount);
  if (weights.size() != kStrategyCount) throw ContractError("lhv weights need 16 entries");
  if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0); }))
    throw ContractError("lhv weights must be nonnegative");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw ContractError("lhv weights must sum to 1 within 1e-9");
  return {weights.begin(), weights.end()};
}

std::unique_ptr<Model> make_model(std::string_view name, const ScenarioSpec& spec, const ModelOptions& options) {
  spec.validate();
  if (name == "unitary-qm") return std::make_unique<UnitaryQmModel>(spec);
  if (name == "collapse") return std::make_unique<CollapseModel>(spec);
  if (name == "toy-theta") return std::make_unique<ToyModel>(spec, options);
  if (name == "lhv") return std::make_unique<LhvModel>(spec, options.lhv_weights);
  throw ContractError("unknown model '" + std::string(name) + "'");
}

RunRecord run_trial_unitary_qm(const ScenarioSpec& spec, int x, int y, Rng& rng) {
  return UnitaryQmModel(spec).run_trial(0, x, y, rng);
}

RunRecord run_trial_collapse(const ScenarioSpec& spec, int x, int y, Rng& rng) {
  return CollapseModel(spec).run_trial(0, x, y, rng);
}

RunRecord run_trial_toy(const ScenarioSpec& spec, int x, int y, Rng& rng, const ModelOptions& options) {
  return ToyModel(spec, options).run_trial(0, x, y, rng);
}

RunRecord run_trial_lhv(const ScenarioSpec& spec, int x, int y, Rng& rng, std::span<const double> weights) {
  return LhvModel(spec, weights).run_trial(0, x, y, rng);
}

}  // namespace wfs

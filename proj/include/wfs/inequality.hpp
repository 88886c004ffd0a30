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

#ifndef WFS_INEQUALITY_HPP_
#define WFS_INEQUALITY_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wfs/models.hpp"
#include "wfs/qcore.hpp"

namespace wfs {

/// P(a,b|x,y) for two binary settings and outcomes +-1 on each side.
/// Built either by counting a run log or directly from exact probabilities.
class BehaviorTable {
 public:
  static constexpr int kCells = 16;

  BehaviorTable() = default;

  static BehaviorTable from_counts(const std::array<std::uint64_t, kCells>& counts);
  static BehaviorTable from_probabilities(const std::array<double, kCells>& probs);
  /// Exact behavior of a mixture of deterministic strategies.
  static BehaviorTable from_strategy_weights(std::span<const double> weights);

  /// Flat index; outcome +1 maps to slot 0.
  static int index(int x, int y, int a, int b);

  double prob(int x, int y, int a, int b) const { return probs_[index(x, y, a, b)]; }
  std::uint64_t count(int x, int y, int a, int b) const { return counts_[index(x, y, a, b)]; }
  std::uint64_t trials(int x, int y) const { return trials_[(x - 1) * 2 + (y - 1)]; }
  bool exact() const { return exact_; }
  /// True for a counted cell with no trials.
  bool empty(int x, int y) const { return !exact_ && trials(x, y) == 0; }
  bool fully_populated() const;

  const std::array<double, kCells>& probabilities() const { return probs_; }

  /// Marginal P(A=a | x, y) and P(B=b | x, y).
  double alice_marginal(int x, int y, int a) const { return prob(x, y, a, +1) + prob(x, y, a, -1); }
  double bob_marginal(int x, int y, int b) const { return prob(x, y, +1, b) + prob(x, y, -1, b); }

 private:
  std::array<double, kCells> probs_{};
  std::array<std::uint64_t, kCells> counts_{};
  std::array<std::uint64_t, 4> trials_{};
  bool exact_ = false;
};

struct ExpectationMatrix {
  std::array<std::array<double, 2>, 2> e{};
  std::array<std::array<double, 2>, 2> se{};
  std::array<std::array<bool, 2>, 2> populated{{{true, true}, {true, true}}};

  double operator()(int x, int y) const { return e[x - 1][y - 1]; }

  static ExpectationMatrix exact(const std::array<std::array<double, 2>, 2>& values);
};

ExpectationMatrix expectations(const BehaviorTable& table);

BehaviorTable tabulate(std::span<const RunRecord> records);

struct ChshValue {
  double s;
  double se;
  /// 2*k + (global sign negative), k = index of the negated term in
  /// (E11, E12, E21, E22). The canonical form is variant 6.
  int variant;
};

inline constexpr int kCanonicalChshVariant = 6;
inline constexpr double kChshBound = 2.0;

/// E11 + E12 + E21 - E22 with its standard error.
ChshValue chsh_value(const ExpectationMatrix& e);
ChshValue chsh_variant(const ExpectationMatrix& e, int variant);
/// Largest of the eight CHSH facets.
ChshValue chsh_max_variant(const ExpectationMatrix& e);

struct MembershipOptions {
  double tolerance = 1e-7;
  double signaling_tolerance = 1e-6;
  /// When positive, tolerances come from the table's sampling errors:
  /// L1 tolerance = k * sum of cell standard errors, and each marginal
  /// comparison uses k two-sample binomial standard errors.
  double statistical_k = 0.0;
};

struct MembershipVerdict {
  enum class Cause { None, Infeasible, Signaling, Empty };
  bool member = false;
  Cause cause = Cause::Empty;
  /// Strategy weights of the closest local behavior (L1 distance).
  std::array<double, kStrategyCount> weights{};
  double residual_l1 = 0.0;
  double tolerance = 0.0;
  double max_signaling = 0.0;
};

std::string_view to_string(MembershipVerdict::Cause cause);

/// Does a probability vector over the 16 deterministic strategies reproduce
/// the table? Solved as an LP minimizing the L1 residual.
MembershipVerdict local_polytope_feasible(const BehaviorTable& table, const MembershipOptions& options = {});

/// Exact correlators of product measurements on a bipartite state whose
/// first half of subsystems belongs to Alice.
ExpectationMatrix analytic_expectations(const StateVector<double>& state,
                                        const std::array<Measurement<double>, 2>& alice,
                                        const std::array<Measurement<double>, 2>& bob);

/// Largest CHSH facet value of the exact correlators, no sampling.
double analytic_quantum_S(const StateVector<double>& state, const std::array<Measurement<double>, 2>& alice,
                          const std::array<Measurement<double>, 2>& bob);

/// Measurements of a scenario: spin measurements at the setting angles for a
/// standard Bell run, lab measurements for an EWFS run.
std::array<Measurement<double>, 2> alice_measurements(const ScenarioSpec& spec);
std::array<Measurement<double>, 2> bob_measurements(const ScenarioSpec& spec);

struct InequalityReport {
  double s = 0.0;
  int variant = kCanonicalChshVariant;
  double canonical_s = 0.0;
  double se = 0.0;
  double bound = kChshBound;
  double k = 3.0;
  bool violated = false;
  MembershipVerdict membership;
};

InequalityReport evaluate_inequality(const BehaviorTable& table, double k = 3.0);

struct IdentityCheck {
  std::string label;
  std::string assumption;
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 0.0;
  double se = 0.0;
  bool holds = false;
};

struct DerivationReport {
  std::vector<IdentityCheck> steps;
  /// <CD> + <CB> + <AD> - <AB> on the X=Y=2 runs.
  double four_party_chsh = 0.0;
  double four_party_se = 0.0;
  bool all_hold = false;
};

/// Audits the chain that turns the four-party CHSH expression on X=Y=2 runs
/// into the superobservers' CHSH expression.
DerivationReport verify_derivation_chain(std::span<const RunRecord> records, double k = 3.0);

}  // namespace wfs

#endif  // WFS_INEQUALITY_HPP_

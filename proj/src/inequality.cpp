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

#include "wfs/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "wfs/error.hpp"
#include "wfs/simplex.hpp"

namespace wfs {
namespace {

int slot(int v) {
  if (v == 1) return 0;
  if (v == -1) return 1;
  throw ContractError("outcome must be +1 or -1");
}

int setting_slot(int s) {
  if (s != 1 && s != 2) throw ContractError("setting index must be 1 or 2");
  return s - 1;
}

constexpr std::array<int, 2> kOutcomes = {+1, -1};
constexpr std::array<int, 2> kSettings = {1, 2};

}  // namespace

int BehaviorTable::index(int x, int y, int a, int b) {
  return setting_slot(x) * 8 + setting_slot(y) * 4 + slot(a) * 2 + slot(b);
}

BehaviorTable BehaviorTable::from_counts(const std::array<std::uint64_t, kCells>& counts) {
  BehaviorTable t;
  t.counts_ = counts;
  for (int cell = 0; cell < 4; ++cell) {
    const auto n = counts[cell * 4] + counts[cell * 4 + 1] + counts[cell * 4 + 2] + counts[cell * 4 + 3];
    t.trials_[cell] = n;
    for (int o = 0; o < 4; ++o)
      t.probs_[cell * 4 + o] = n == 0 ? 0.0 : static_cast<double>(counts[cell * 4 + o]) / static_cast<double>(n);
  }
  return t;
}

BehaviorTable BehaviorTable::from_probabilities(const std::array<double, kCells>& probs) {
  BehaviorTable t;
  for (int cell = 0; cell < 4; ++cell) {
    double total = 0.0;
    for (int o = 0; o < 4; ++o) {
      const double p = probs[cell * 4 + o];
      if (!(p >= -1e-12) || !(p <= 1.0 + 1e-12)) throw ContractError("probability outside [0, 1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ContractError("behavior cell does not sum to 1 within 1e-9");
  }
  t.probs_ = probs;
  t.exact_ = true;
  return t;
}

BehaviorTable BehaviorTable::from_strategy_weights(std::span<const double> weights) {
  const auto w = checked_strategy_weights(weights);
  std::array<double, kCells> probs{};
  for (int id = 0; id < kStrategyCount; ++id) {
    const Strategy s = Strategy::from_id(id);
    for (int x : kSettings)
      for (int y : kSettings) probs[index(x, y, s.a(x), s.b(y))] += w[id];
  }
  return from_probabilities(probs);
}

bool BehaviorTable::fully_populated() const {
  return std::none_of(kSettings.begin(), kSettings.end(), [this](int x) {
    return empty(x, 1) || empty(x, 2);
  });
}

ExpectationMatrix ExpectationMatrix::exact(const std::array<std::array<double, 2>, 2>& values) {
  ExpectationMatrix m;
  m.e = values;
  return m;
}

ExpectationMatrix expectations(const BehaviorTable& table) {
  ExpectationMatrix m;
  for (int x : kSettings)
    for (int y : kSettings) {
      auto& e = m.e[x - 1][y - 1];
      e = 0.0;
      for (int a : kOutcomes)
        for (int b : kOutcomes) e += a * b * table.prob(x, y, a, b);
      e = std::clamp(e, -1.0, 1.0);
      if (table.exact()) continue;
      const auto n = table.trials(x, y);
      m.populated[x - 1][y - 1] = n > 0;
      m.se[x - 1][y - 1] = n > 0 ? std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n)) : 0.0;
    }
  return m;
}

BehaviorTable tabulate(std::span<const RunRecord> records) {
  std::array<std::uint64_t, BehaviorTable::kCells> counts{};
  for (const auto& r : records) {
    if (r.scenario != records.front().scenario) throw ContractError("log mixes scenarios");
    ++counts[BehaviorTable::index(r.x, r.y, r.a, r.b)];
  }
  return BehaviorTable::from_counts(counts);
}

ChshValue chsh_variant(const ExpectationMatrix& m, int variant) {
  if (variant < 0 || variant >= 8) throw ContractError("CHSH variant id must be in [0, 8)");
  double total = 0.0, var = 0.0;
  std::array<double, 4> terms{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (!m.populated[x][y]) throw ContractError("CHSH needs all four setting pairs populated");
      terms[x * 2 + y] = m.e[x][y];
      total += m.e[x][y];
      var += m.se[x][y] * m.se[x][y];
    }
  const double sum = total - 2.0 * terms[variant / 2];
  return {variant % 2 == 1 ? -sum : sum, std::sqrt(var), variant};
}

ChshValue chsh_value(const ExpectationMatrix& m) { return chsh_variant(m, kCanonicalChshVariant); }

ChshValue chsh_max_variant(const ExpectationMatrix& m) {
  ChshValue best = chsh_variant(m, 0);
  for (int v = 1; v < 8; ++v) {
    const ChshValue c = chsh_variant(m, v);
    if (c.s > best.s) best = c;
  }
  return best;
}

std::string_view to_string(MembershipVerdict::Cause cause) {
  switch (cause) {
    case MembershipVerdict::Cause::None: return "none";
    case MembershipVerdict::Cause::Infeasible: return "infeasible";
    case MembershipVerdict::Cause::Signaling: return "signaling";
    case MembershipVerdict::Cause::Empty: return "empty";
  }
  return "unknown";
}

MembershipVerdict local_polytope_feasible(const BehaviorTable& table, const MembershipOptions& options) {
  MembershipVerdict verdict;
  if (!table.fully_populated()) return verdict;

  const bool statistical = options.statistical_k > 0.0 && !table.exact();
  const double k = options.statistical_k;

  // No-signaling: marginals of one wing must not depend on the other's setting.
  bool signaling = false;
  auto compare = [&](double p1, double p2, std::uint64_t n1, std::uint64_t n2) {
    const double diff = std::abs(p1 - p2);
    verdict.max_signaling = std::max(verdict.max_signaling, diff);
    double tol = options.signaling_tolerance;
    if (statistical) {
      const double p = (p1 * n1 + p2 * n2) / static_cast<double>(n1 + n2);
      tol = k * std::sqrt(p * (1.0 - p) * (1.0 / n1 + 1.0 / n2));
    }
    if (diff > tol) signaling = true;
  };
  for (int s : kSettings) {
    compare(table.alice_marginal(s, 1, +1), table.alice_marginal(s, 2, +1), table.trials(s, 1), table.trials(s, 2));
    compare(table.bob_marginal(1, s, +1), table.bob_marginal(2, s, +1), table.trials(1, s), table.trials(2, s));
  }

  // Rows: 16 cells + normalization. Columns: w (16), u (16), v (16) with
  // M w + u - v = p and sum(w) = 1; minimize sum(u + v).
  constexpr int kS = kStrategyCount, kC = BehaviorTable::kCells;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(kC + 1, kS + 2 * kC);
  Eigen::VectorXd b(kC + 1), c = Eigen::VectorXd::Zero(kS + 2 * kC);
  for (int id = 0; id < kS; ++id) {
    const Strategy s = Strategy::from_id(id);
    for (int x : kSettings)
      for (int y : kSettings) a(BehaviorTable::index(x, y, s.a(x), s.b(y)), id) = 1.0;
    a(kC, id) = 1.0;
  }
  for (int i = 0; i < kC; ++i) {
    a(i, kS + i) = 1.0;
    a(i, kS + kC + i) = -1.0;
    b(i) = table.probabilities()[i];
  }
  b(kC) = 1.0;
  c.tail(2 * kC).setOnes();

  const auto solution = DenseSimplex<double>().solve(a, b, c);
  if (solution.status != LpStatus::Optimal) throw std::logic_error("local polytope LP has no optimum");
  for (int id = 0; id < kS; ++id) verdict.weights[id] = std::max(0.0, solution.z(id));
  verdict.residual_l1 = std::max(0.0, solution.objective);

  verdict.tolerance = options.tolerance;
  if (statistical) {
    double sum_se = 0.0;
    for (int x : kSettings)
      for (int y : kSettings)
        for (int o : kOutcomes)
          for (int q : kOutcomes) {
            const double p = table.prob(x, y, o, q);
            sum_se += std::sqrt(p * (1.0 - p) / static_cast<double>(table.trials(x, y)));
          }
    verdict.tolerance = std::max(options.tolerance, k * sum_se);
  }

  if (signaling) {
    verdict.cause = MembershipVerdict::Cause::Signaling;
  } else if (verdict.residual_l1 <= verdict.tolerance) {
    verdict.member = true;
    verdict.cause = MembershipVerdict::Cause::None;
  } else {
    verdict.cause = MembershipVerdict::Cause::Infeasible;
  }
  return verdict;
}

ExpectationMatrix analytic_expectations(const StateVector<double>& state,
                                        const std::array<Measurement<double>, 2>& alice,
                                        const std::array<Measurement<double>, 2>& bob) {
  std::array<std::array<double, 2>, 2> e{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const auto probs = joint_probabilities(state, alice[x], bob[y]);
      const auto nb = bob[y].values.size();
      double v = 0.0;
      for (std::size_t i = 0; i < alice[x].values.size(); ++i)
        for (std::size_t j = 0; j < nb; ++j) v += alice[x].values[i] * bob[y].values[j] * probs[i * nb + j];
      e[x][y] = v;
    }
  return ExpectationMatrix::exact(e);
}

double analytic_quantum_S(const StateVector<double>& state, const std::array<Measurement<double>, 2>& alice,
                          const std::array<Measurement<double>, 2>& bob) {
  return chsh_max_variant(analytic_expectations(state, alice, bob)).s;
}

namespace {

std::array<Measurement<double>, 2> party_measurements(const ScenarioSpec& spec, const std::vector<Setting>& party,
                                                      int side) {
  std::array<Measurement<double>, 2> out;
  for (int i = 0; i < 2; ++i)
    out[i] = spec.kind == ScenarioKind::StandardBell ? spin_measurement(party.at(i).angle)
                                                     : lab_measurement<double>(side, party.at(i).basis);
  return out;
}

}  // namespace

std::array<Measurement<double>, 2> alice_measurements(const ScenarioSpec& spec) {
  return party_measurements(spec, spec.alice, 1);
}

std::array<Measurement<double>, 2> bob_measurements(const ScenarioSpec& spec) {
  return party_measurements(spec, spec.bob, 2);
}

InequalityReport evaluate_inequality(const BehaviorTable& table, double k) {
  InequalityReport report;
  report.k = k;
  const auto e = expectations(table);
  const auto best = chsh_max_variant(e);
  report.s = best.s;
  report.variant = best.variant;
  report.se = best.se;
  report.canonical_s = chsh_value(e).s;
  report.violated = report.s > report.bound + k * report.se;
  MembershipOptions options;
  options.statistical_k = k;
  report.membership = local_polytope_feasible(table, options);
  return report;
}

namespace {

// Role of a party's outcome in a correlator: superobserver or friend.
enum class Role { Super, Friend };

int value_of(const RunRecord& r, bool alice_side, Role role) {
  if (role == Role::Super) return alice_side ? r.a : r.b;
  const auto& v = alice_side ? r.c : r.d;
  if (!v) throw ContractError("derivation chain needs friend outcomes on every record");
  return *v;
}

struct Correlator {
  double mean = 0.0;
  double se = 0.0;
};

struct Term {
  Role left;
  Role right;
  int x;
  int y;
};

std::string term_label(const Term& t) {
  std::string s = "<";
  s += t.left == Role::Super ? "A" : "C";
  s += t.right == Role::Super ? "B" : "D";
  s += "|" + std::to_string(t.x) + std::to_string(t.y) + ">";
  return s;
}

}  // namespace

DerivationReport verify_derivation_chain(std::span<const RunRecord> records, double k) {
  std::array<std::vector<const RunRecord*>, 4> cells;
  for (const auto& r : records) cells[setting_slot(r.x) * 2 + setting_slot(r.y)].push_back(&r);
  for (const auto& cell : cells)
    if (cell.empty()) throw ContractError("derivation chain needs records for every setting pair");

  auto product = [](const RunRecord& r, const Term& t) {
    return value_of(r, true, t.left) * value_of(r, false, t.right);
  };
  auto correlator = [&](const Term& t) {
    const auto& cell = cells[(t.x - 1) * 2 + (t.y - 1)];
    double sum = 0.0;
    for (const auto* r : cell) sum += product(*r, t);
    const double n = static_cast<double>(cell.size());
    const double mean = sum / n;
    return Correlator{mean, std::sqrt(std::max(0.0, 1.0 - mean * mean) / n)};
  };
  // Same-cell comparisons are paired; their SE comes from the per-record
  // difference rather than from quadrature.
  auto paired_se = [&](const Term& l, const Term& r) {
    const auto& cell = cells[(l.x - 1) * 2 + (l.y - 1)];
    double sum = 0.0, sum_sq = 0.0;
    for (const auto* rec : cell) {
      const double d = product(*rec, l) - product(*rec, r);
      sum += d;
      sum_sq += d * d;
    }
    const double n = static_cast<double>(cell.size());
    const double var = std::max(0.0, sum_sq / n - (sum / n) * (sum / n));
    return std::sqrt(var / n);
  };

  const Role S = Role::Super, F = Role::Friend;
  struct Step {
    Term lhs, rhs;
    const char* assumption;
  };
  const std::array<Step, 6> steps = {{
      {{F, F, 2, 2}, {F, F, 1, 1}, "NSD"},
      {{F, F, 1, 1}, {S, S, 1, 1}, "AOE"},
      {{F, S, 2, 2}, {F, S, 1, 2}, "L,NSD"},
      {{F, S, 1, 2}, {S, S, 1, 2}, "AOE"},
      {{S, F, 2, 2}, {S, F, 2, 1}, "L,NSD"},
      {{S, F, 2, 1}, {S, S, 2, 1}, "AOE"},
  }};

  DerivationReport report;
  report.all_hold = true;
  for (const auto& step : steps) {
    const auto l = correlator(step.lhs), r = correlator(step.rhs);
    IdentityCheck check;
    check.label = term_label(step.lhs) + " = " + term_label(step.rhs);
    check.assumption = step.assumption;
    check.lhs = l.mean;
    check.rhs = r.mean;
    check.delta = l.mean - r.mean;
    const bool same_cell = step.lhs.x == step.rhs.x && step.lhs.y == step.rhs.y;
    check.se = same_cell ? paired_se(step.lhs, step.rhs) : std::hypot(l.se, r.se);
    check.holds = std::abs(check.delta) <= k * check.se + 1e-12;
    report.all_hold = report.all_hold && check.holds;
    report.steps.push_back(std::move(check));
  }

  const auto cd = correlator({F, F, 2, 2}), cb = correlator({F, S, 2, 2});
  const auto ad = correlator({S, F, 2, 2}), ab = correlator({S, S, 2, 2});
  report.four_party_chsh = cd.mean + cb.mean + ad.mean - ab.mean;
  report.four_party_se = std::sqrt(cd.se * cd.se + cb.se * cb.se + ad.se * ad.se + ab.se * ab.se);
  return report;
}

}  // namespace wfs

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

#include "wfs/assumptions.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace wfs {
namespace {

constexpr int kCellCount = 4;

int cell_of(const RunRecord& r) { return (r.x - 1) * 2 + (r.y - 1); }

std::string cell_label(int cell) { return "x=" + std::to_string(cell / 2 + 1) + ",y=" + std::to_string(cell % 2 + 1); }

// Shared verdict rule: fail if any conclusive cell exceeds its threshold,
// pass if every conclusive cell is within it, inconclusive with none.
void settle(AssumptionCheck& check) {
  bool any = false, fail = false;
  double worst = -1.0;
  for (const auto& c : check.cells) {
    if (c.sparse) continue;
    any = true;
    if (c.statistic > c.threshold + 1e-12) fail = true;
    if (c.statistic > worst) {
      worst = c.statistic;
      check.statistic = c.statistic;
      check.tolerance = c.threshold;
    }
  }
  if (!any) {
    check.verdict = Verdict::Inconclusive;
    if (check.note.empty()) check.note = "no cell reaches the minimum sample size";
    return;
  }
  check.verdict = fail ? Verdict::Fail : Verdict::Pass;
}

// Total-variation distance of each setting cell's distribution of `category`
// from the pooled distribution.
template <typename Category>
AssumptionCheck distribution_check(std::string name, std::span<const RunRecord> records, int categories,
                                   Category category, const CheckOptions& options) {
  AssumptionCheck check;
  check.name = std::move(name);
  std::vector<std::array<std::uint64_t, kCellCount>> counts(categories);
  std::array<std::uint64_t, kCellCount> n{};
  for (const auto& r : records) {
    ++counts[category(r)][cell_of(r)];
    ++n[cell_of(r)];
  }
  const double total = static_cast<double>(records.size());
  std::vector<double> pooled(categories, 0.0);
  for (int j = 0; j < categories; ++j) {
    for (auto v : counts[j]) pooled[j] += static_cast<double>(v);
    pooled[j] /= total;
  }
  const auto conclusive = std::count_if(n.begin(), n.end(), [&](auto v) { return v >= options.min_cell; });
  const double k = family_wise_k(options.k, std::max<std::size_t>(1, conclusive));
  for (int cell = 0; cell < kCellCount; ++cell) {
    CellStatistic cs;
    cs.label = cell_label(cell);
    cs.n = n[cell];
    cs.sparse = n[cell] < options.min_cell;
    if (!cs.sparse) {
      const double nc = static_cast<double>(n[cell]);
      double tv = 0.0, se_sum = 0.0;
      for (int j = 0; j < categories; ++j) {
        tv += std::abs(static_cast<double>(counts[j][cell]) / nc - pooled[j]);
        se_sum += std::sqrt(pooled[j] * (1.0 - pooled[j]) / nc);
      }
      cs.statistic = 0.5 * tv;
      cs.threshold = k * 0.5 * se_sum;
    }
    check.cells.push_back(std::move(cs));
  }
  settle(check);
  return check;
}

bool friends_defined(std::span<const RunRecord> records) {
  return std::all_of(records.begin(), records.end(), [](const RunRecord& r) { return r.c && r.d; });
}

AssumptionCheck agreement(std::string name, std::span<const RunRecord> records, bool alice_side,
                          const CheckOptions& options) {
  AssumptionCheck check;
  check.name = std::move(name);
  std::uint64_t n = 0, agree = 0;
  for (const auto& r : records) {
    const int setting = alice_side ? r.x : r.y;
    const auto& friend_value = alice_side ? r.c : r.d;
    if (setting != 1 || !friend_value) continue;
    ++n;
    if ((alice_side ? r.a : r.b) == *friend_value) ++agree;
  }
  check.tolerance = 0.0;
  check.cells.push_back({alice_side ? "x=1" : "y=1", n, 0.0, 0.0, n < options.min_cell});
  if (n == 0) {
    check.verdict = Verdict::Inconclusive;
    check.note = "no conditioned records with a defined friend outcome";
    return check;
  }
  check.statistic = static_cast<double>(agree) / static_cast<double>(n);
  check.cells.back().statistic = check.statistic;
  if (n < options.min_cell) {
    check.verdict = Verdict::Inconclusive;
    check.note = "fewer conditioned records than the minimum sample size";
    return check;
  }
  check.verdict = agree == n ? Verdict::Pass : Verdict::Fail;
  if (agree != n) check.note = std::to_string(n - agree) + " counterexamples";
  return check;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

const AssumptionCheck* AssumptionReport::find(std::string_view name) const {
  auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

bool AssumptionReport::all_pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.verdict == Verdict::Pass; });
}

double family_wise_k(double k, std::size_t m) {
  if (m <= 1) return k;
  const boost::math::normal_distribution<double> normal;
  const double tail = boost::math::cdf(boost::math::complement(normal, k));
  return boost::math::quantile(boost::math::complement(normal, tail / static_cast<double>(m)));
}

std::vector<AssumptionCheck> check_aoe(std::span<const RunRecord> records, const CheckOptions& options) {
  AssumptionCheck defined;
  defined.name = "AOE-i";
  defined.tolerance = 0.0;
  if (records.empty()) {
    defined.verdict = Verdict::Inconclusive;
    defined.note = "empty log";
  } else {
    const auto n = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.c && r.d; });
    defined.statistic = static_cast<double>(n) / static_cast<double>(records.size());
    defined.verdict = n == static_cast<std::ptrdiff_t>(records.size()) ? Verdict::Pass : Verdict::Fail;
    if (defined.verdict == Verdict::Fail)
      defined.note = std::to_string(records.size() - n) + " records without friend outcomes";
  }
  return {defined, agreement("AOE-ii", records, true, options), agreement("AOE-iii", records, false, options)};
}

AssumptionCheck check_nsd(std::span<const RunRecord> records, const CheckOptions& options) {
  if (records.empty() || !friends_defined(records)) {
    AssumptionCheck check;
    check.name = "NSD";
    check.note = "friend outcomes are not defined on every record";
    return check;
  }
  return distribution_check(
      "NSD", records, 4, [](const RunRecord& r) { return (*r.c == 1 ? 0 : 2) + (*r.d == 1 ? 0 : 1); }, options);
}

AssumptionCheck check_settings_independence(std::span<const RunRecord> records, const CheckOptions& options) {
  const bool payload = !records.empty() && std::all_of(records.begin(), records.end(),
                                                       [](const RunRecord& r) { return r.lambda.bin >= 0; });
  if (!payload) {
    AssumptionCheck check;
    check.name = "SI";
    check.verdict = Verdict::NotApplicable;
    check.note = "records carry no binned hidden-state payload";
    return check;
  }
  int bins = 0;
  for (const auto& r : records) bins = std::max(bins, r.lambda.bin + 1);
  return distribution_check("SI", records, bins, [](const RunRecord& r) { return r.lambda.bin; }, options);
}

AssumptionCheck check_locality(std::span<const RunRecord> records, const CheckOptions& options) {
  AssumptionCheck check;
  check.name = "L";
  if (records.empty() || !friends_defined(records)) {
    check.note = "friend outcomes are not defined on every record";
    return check;
  }
  // Key: (side, c, d, own setting). Value: [distant setting][outcome slot].
  struct Tally {
    std::array<std::array<std::uint64_t, 2>, 2> n{};
  };
  std::map<std::array<int, 4>, Tally> tallies;
  for (const auto& r : records) {
    tallies[{0, *r.c, *r.d, r.x}].n[r.y - 1][r.a == 1 ? 0 : 1]++;
    tallies[{1, *r.c, *r.d, r.y}].n[r.x - 1][r.b == 1 ? 0 : 1]++;
  }
  std::size_t conclusive = 0;
  for (const auto& [key, t] : tallies) {
    const auto n1 = t.n[0][0] + t.n[0][1], n2 = t.n[1][0] + t.n[1][1];
    if (std::min(n1, n2) >= options.min_cell) ++conclusive;
  }
  const double k = family_wise_k(options.k, std::max<std::size_t>(1, conclusive));
  for (const auto& [key, t] : tallies) {
    CellStatistic cs;
    cs.label = std::string(key[0] == 0 ? "A" : "B") + "|c=" + std::to_string(key[1]) + ",d=" + std::to_string(key[2]) +
               (key[0] == 0 ? ",x=" : ",y=") + std::to_string(key[3]);
    const auto n1 = t.n[0][0] + t.n[0][1], n2 = t.n[1][0] + t.n[1][1];
    cs.n = n1 + n2;
    cs.sparse = std::min(n1, n2) < options.min_cell;
    if (!cs.sparse) {
      const double p1 = static_cast<double>(t.n[0][0]) / n1, p2 = static_cast<double>(t.n[1][0]) / n2;
      const double p = static_cast<double>(t.n[0][0] + t.n[1][0]) / static_cast<double>(n1 + n2);
      cs.statistic = std::abs(p1 - p2);
      cs.threshold = k * std::sqrt(p * (1.0 - p) * (1.0 / n1 + 1.0 / n2));
    }
    check.cells.push_back(std::move(cs));
  }
  settle(check);
  return check;
}

AssumptionReport check_assumptions(std::span<const RunRecord> records, const CheckOptions& options) {
  AssumptionReport report;
  report.checks = check_aoe(records, options);
  report.checks.push_back(check_nsd(records, options));
  report.checks.push_back(check_locality(records, options));
  report.checks.push_back(check_settings_independence(records, options));
  return report;
}

}  // namespace wfs

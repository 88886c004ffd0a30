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

#ifndef WFS_ASSUMPTIONS_HPP_
#define WFS_ASSUMPTIONS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfs/models.hpp"

namespace wfs {

enum class Verdict { Pass, Fail, Inconclusive, NotApplicable };

std::string_view to_string(Verdict v);

/// One compared conditioning cell of a statistical check.
struct CellStatistic {
  std::string label;
  std::uint64_t n = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  /// Below the minimum sample size; excluded from the verdict.
  bool sparse = false;
};

struct AssumptionCheck {
  std::string name;
  /// Agreement frequency (AOE ii/iii), fraction of defined records (AOE i),
  /// or the largest total-variation distance over compared cells.
  double statistic = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<CellStatistic> cells;
  std::string note;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  /// nullptr when no check has that name.
  const AssumptionCheck* find(std::string_view name) const;
  bool all_pass() const;
};

struct CheckOptions {
  /// Standard-error multiplier for the family of cells in one check.
  double k = 3.0;
  std::uint64_t min_cell = 100;
};

/// Per-cell multiplier so that m two-sided comparisons at this level have
/// the same family-wise false alarm rate as one comparison at k.
double family_wise_k(double k, std::size_t m);

/// AOE-i, AOE-ii and AOE-iii, in that order.
std::vector<AssumptionCheck> check_aoe(std::span<const RunRecord> records, const CheckOptions& options = {});
AssumptionCheck check_nsd(std::span<const RunRecord> records, const CheckOptions& options = {});
AssumptionCheck check_locality(std::span<const RunRecord> records, const CheckOptions& options = {});
AssumptionCheck check_settings_independence(std::span<const RunRecord> records, const CheckOptions& options = {});

/// Every check above, in the order AOE-i, AOE-ii, AOE-iii, NSD, L, SI.
AssumptionReport check_assumptions(std::span<const RunRecord> records, const CheckOptions& options = {});

}  // namespace wfs

#endif  // WFS_ASSUMPTIONS_HPP_

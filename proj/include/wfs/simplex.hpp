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

// Dense two-phase simplex for small linear programs in standard form:
//   minimize c'z  subject to  A z = b,  z >= 0.
// Bland's rule throughout, so it terminates on degenerate problems.

#ifndef WFS_SIMPLEX_HPP_
#define WFS_SIMPLEX_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wfs/error.hpp"

namespace wfs {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar = double>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z;
  Scalar objective = std::numeric_limits<Scalar>::infinity();
};

template <typename Scalar = double>
class DenseSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit DenseSimplex(Scalar eps = Scalar(1e-12)) : eps_(eps) {}

  LpSolution<Scalar> solve(const Matrix& a, const Vector& b, const Vector& c) {
    if (a.rows() != b.size() || a.cols() != c.size()) throw ContractError("LP dimensions do not match");
    m_ = static_cast<int>(a.rows());
    n_ = static_cast<int>(a.cols());

    // Tableau columns: n structural, m artificial, then the right-hand side.
    t_ = Matrix::Zero(m_, n_ + m_ + 1);
    for (int i = 0; i < m_; ++i) {
      const Scalar s = b(i) < 0 ? Scalar(-1) : Scalar(1);
      t_.row(i).head(n_) = s * a.row(i);
      t_(i, n_ + i) = Scalar(1);
      t_(i, n_ + m_) = s * b(i);
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;

    // Phase I: minimize the sum of artificials.
    Vector phase1 = Vector::Zero(n_ + m_);
    phase1.tail(m_).setOnes();
    if (!iterate(phase1, n_ + m_)) throw std::logic_error("phase I cannot be unbounded");
    LpSolution<Scalar> out;
    const Scalar infeasibility = t_.col(n_ + m_).dot(basic_costs(phase1));
    if (infeasibility > feasibility_tol(b)) return out;

    drive_out_artificials();

    Vector cost = Vector::Zero(n_ + m_);
    cost.head(n_) = c;
    if (!iterate(cost, n_)) {
      out.status = LpStatus::Unbounded;
      return out;
    }
    out.status = LpStatus::Optimal;
    out.z = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.z(basis_[i]) = t_(i, n_ + m_);
    out.objective = c.dot(out.z);
    return out;
  }

 private:
  Scalar feasibility_tol(const Vector& b) const {
    return Scalar(1e-9) * std::max(Scalar(1), b.cwiseAbs().sum());
  }

  Vector basic_costs(const Vector& cost) const {
    Vector cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
    return cb;
  }

  // Runs simplex pivots over columns [0, allowed). Returns false if unbounded.
  bool iterate(const Vector& cost, int allowed) {
    for (;;) {
      const Vector cb = basic_costs(cost);
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        const Scalar reduced = cost(j) - cb.dot(t_.col(j));
        if (reduced < -eps_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (t_(i, enter) <= eps_) continue;
        const Scalar ratio = t_(i, n_ + m_) / t_(i, enter);
        if (ratio < best - eps_ || (leave >= 0 && std::abs(ratio - best) <= eps_ && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < m_; ++i)
      if (i != row && t_(i, col) != Scalar(0)) t_.row(i) -= t_(i, col) * t_.row(row);
    basis_[row] = col;
  }

  // Artificials still basic at level zero are swapped for structural columns;
  // rows where that is impossible are redundant and get zeroed out.
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int col = -1;
      for (int j = 0; j < n_; ++j)
        if (std::abs(t_(i, j)) > Scalar(1e-9)) {
          col = j;
          break;
        }
      if (col >= 0) {
        pivot(i, col);
      } else {
        t_.row(i).setZero();
        t_(i, basis_[i]) = Scalar(1);
      }
    }
  }

  Scalar eps_;
  int m_ = 0, n_ = 0;
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace wfs

#endif  // WFS_SIMPLEX_HPP_

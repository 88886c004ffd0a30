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

// Exact finite-dimensional state engine: pure states on small composite
// Hilbert spaces, projective measurement and unitary evolution.

#ifndef WFS_QCORE_HPP_
#define WFS_QCORE_HPP_

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wfs/error.hpp"

namespace wfs {

inline constexpr int kMaxDimension = 16;

template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Tolerances {
  static constexpr Scalar structural = Scalar(1e-10);
  static constexpr Scalar normalization = Scalar(1e-12);
  static constexpr Scalar degenerate = Scalar(1e-15);
};

/// Pure state over a composite space. `dims` lists the subsystem
/// dimensions; the flat index is row-major with the first subsystem most
/// significant.
template <typename Scalar = double>
class StateVector {
 public:
  StateVector(CVector<Scalar> amplitudes, std::vector<int> dims)
      : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    long product = 1;
    for (int d : dims_) {
      if (d < 1) throw ContractError("subsystem dimension must be positive");
      product *= d;
    }
    if (product != amplitudes_.size())
      throw ContractError("amplitude count " + std::to_string(amplitudes_.size()) +
                          " does not match product of dims " + std::to_string(product));
    if (product > kMaxDimension)
      throw ContractError("state dimension exceeds " + std::to_string(kMaxDimension));
  }

  /// Single-subsystem state.
  explicit StateVector(CVector<Scalar> amplitudes)
      : StateVector(amplitudes, {static_cast<int>(amplitudes.size())}) {}

  static StateVector basis(std::vector<int> dims, int index) {
    const int n = std::reduce(dims.begin(), dims.end(), 1, std::multiplies<>());
    if (index < 0 || index >= n) throw ContractError("basis index out of range");
    CVector<Scalar> v = CVector<Scalar>::Zero(n);
    v(index) = Scalar(1);
    return StateVector(std::move(v), std::move(dims));
  }

  const CVector<Scalar>& amplitudes() const { return amplitudes_; }
  std::complex<Scalar> amplitude(int i) const { return amplitudes_(i); }
  const std::vector<int>& dims() const { return dims_; }
  int dimension() const { return static_cast<int>(amplitudes_.size()); }
  Scalar norm() const { return amplitudes_.norm(); }

  bool is_normalized(Scalar tol = Tolerances<Scalar>::normalization) const {
    return std::abs(amplitudes_.squaredNorm() - Scalar(1)) <= tol;
  }

  StateVector normalized() const {
    const Scalar n = norm();
    if (n <= Tolerances<Scalar>::degenerate) throw NumericalDegeneracyError("cannot normalize a zero vector");
    return StateVector(amplitudes_ / n, dims_);
  }

 private:
  CVector<Scalar> amplitudes_;
  std::vector<int> dims_;
};

template <typename Scalar = double>
class Projector {
 public:
  explicit Projector(CMatrix<Scalar> matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw ContractError("projector must be square");
    const Scalar tol = Tolerances<Scalar>::structural;
    if (!(matrix_ - matrix_.adjoint()).isZero(tol)) throw ContractError("projector is not Hermitian");
    if (!(matrix_ * matrix_ - matrix_).isZero(tol)) throw ContractError("projector is not idempotent");
  }

  /// |v><v| for the normalized direction of v.
  static Projector rank_one(const CVector<Scalar>& v) {
    const CVector<Scalar> u = v.normalized();
    return Projector(u * u.adjoint());
  }

  static Projector identity(int dim) { return Projector(CMatrix<Scalar>::Identity(dim, dim)); }

  const CMatrix<Scalar>& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  CMatrix<Scalar> matrix_;
};

template <typename Scalar = double>
class Unitary {
 public:
  explicit Unitary(CMatrix<Scalar> matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw ContractError("unitary must be square");
    const auto n = matrix_.rows();
    if (!(matrix_.adjoint() * matrix_ - CMatrix<Scalar>::Identity(n, n)).isZero(Tolerances<Scalar>::structural))
      throw ContractError("matrix is not unitary");
  }

  const CMatrix<Scalar>& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  StateVector<Scalar> apply(const StateVector<Scalar>& s) const {
    if (s.dimension() != dim()) throw ContractError("unitary and state dimensions differ");
    return StateVector<Scalar>(matrix_ * s.amplitudes(), s.dims());
  }

 private:
  CMatrix<Scalar> matrix_;
};

template <typename Scalar>
StateVector<Scalar> tensor(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  CVector<Scalar> amps = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return StateVector<Scalar>(std::move(amps), std::move(dims)).normalized();
}

template <typename Scalar>
Projector<Scalar> tensor(const Projector<Scalar>& a, const Projector<Scalar>& b) {
  return Projector<Scalar>(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

template <typename Scalar>
Unitary<Scalar> tensor(const Unitary<Scalar>& a, const Unitary<Scalar>& b) {
  return Unitary<Scalar>(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

/// Reorders subsystems: subsystem k of the result is subsystem order[k] of s.
template <typename Scalar>
StateVector<Scalar> permute(const StateVector<Scalar>& s, std::span<const int> order) {
  const auto& dims = s.dims();
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(order.size()) != n) throw ContractError("permutation length mismatch");
  std::vector<int> new_dims(n);
  std::vector<bool> seen(n, false);
  for (int k = 0; k < n; ++k) {
    if (order[k] < 0 || order[k] >= n || seen[order[k]]) throw ContractError("invalid permutation");
    seen[order[k]] = true;
    new_dims[k] = dims[order[k]];
  }
  std::vector<int> old_stride(n, 1);
  for (int k = n - 2; k >= 0; --k) old_stride[k] = old_stride[k + 1] * dims[k + 1];

  CVector<Scalar> out(s.dimension());
  std::vector<int> digit(n, 0);  // multi-index in the new ordering
  for (int flat = 0; flat < s.dimension(); ++flat) {
    int old_flat = 0;
    for (int k = 0; k < n; ++k) old_flat += digit[k] * old_stride[order[k]];
    out(flat) = s.amplitude(old_flat);
    for (int k = n - 1; k >= 0; --k) {
      if (++digit[k] < new_dims[k]) break;
      digit[k] = 0;
    }
  }
  return StateVector<Scalar>(std::move(out), std::move(new_dims));
}

namespace detail {

template <typename Scalar>
void require_complete_set(std::span<const Projector<Scalar>> projectors, int dim) {
  if (projectors.empty()) throw ContractError("empty projector set");
  const Scalar tol = Tolerances<Scalar>::structural;
  CMatrix<Scalar> sum = CMatrix<Scalar>::Zero(dim, dim);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    if (projectors[i].dim() != dim) throw ContractError("projector dimension does not match state");
    sum += projectors[i].matrix();
    for (std::size_t j = i + 1; j < projectors.size(); ++j)
      if (!(projectors[i].matrix() * projectors[j].matrix()).isZero(tol))
        throw ContractError("projectors are not mutually orthogonal");
  }
  if (!(sum - CMatrix<Scalar>::Identity(dim, dim)).isZero(tol))
    throw ContractError("projectors do not sum to the identity");
}

}  // namespace detail

template <typename Scalar>
std::vector<Scalar> born_probabilities(const StateVector<Scalar>& s,
                                       std::span<const Projector<Scalar>> projectors) {
  detail::require_complete_set(projectors, s.dimension());
  std::vector<Scalar> probs;
  probs.reserve(projectors.size());
  for (const auto& p : projectors) {
    const std::complex<Scalar> v = s.amplitudes().dot(p.matrix() * s.amplitudes());
    probs.push_back(std::max(Scalar(0), v.real()));
  }
  return probs;
}

template <typename Scalar>
struct CollapseResult {
  int outcome;
  StateVector<Scalar> state;
};

/// Index sampled from `probs` using one uniform draw u in [0,1).
template <typename Scalar>
int sample_index(std::span<const Scalar> probs, Scalar u) {
  const Scalar total = std::accumulate(probs.begin(), probs.end(), Scalar(0));
  Scalar target = u * total;
  int last_nonzero = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= Scalar(0)) continue;
    last_nonzero = static_cast<int>(i);
    if (target < probs[i]) return last_nonzero;
    target -= probs[i];
  }
  return last_nonzero;
}

/// Samples an outcome with Born probability and returns the post-measurement
/// state. `rng.uniform()` must return a double in [0, 1).
template <typename Scalar, typename UniformSource>
CollapseResult<Scalar> project_and_collapse(const StateVector<Scalar>& s,
                                            std::span<const Projector<Scalar>> projectors,
                                            UniformSource& rng) {
  const std::vector<Scalar> probs = born_probabilities(s, projectors);
  const bool degenerate = std::all_of(probs.begin(), probs.end(),
                                      [](Scalar p) { return p < Tolerances<Scalar>::degenerate; });
  if (degenerate) throw NumericalDegeneracyError("all outcome probabilities are below 1e-15");
  const int i = sample_index<Scalar>(probs, static_cast<Scalar>(rng.uniform()));
  CVector<Scalar> post = projectors[i].matrix() * s.amplitudes();
  return {i, StateVector<Scalar>(post / post.norm(), s.dims())};
}

// ---------------------------------------------------------------------------
// Named states and bases. Qubit convention: index 0 = |+z>, index 1 = |-z>.

template <typename Scalar = double>
StateVector<Scalar> qubit(std::complex<Scalar> up, std::complex<Scalar> down) {
  CVector<Scalar> v(2);
  v << up, down;
  return StateVector<Scalar>(v).normalized();
}

/// Coefficients of the two-lab entangled state exactly as written, in the
/// (++, +-, -+, --) z product basis; their norm is 1/sqrt(2).
template <typename Scalar = double>
CVector<Scalar> brukner_raw_coefficients() {
  const Scalar s = std::sin(std::numbers::pi_v<Scalar> / 8);
  const Scalar c = std::cos(std::numbers::pi_v<Scalar> / 8);
  CVector<Scalar> v(4);
  v << s / 2, c / 2, -c / 2, s / 2;
  return v;
}

template <typename Scalar = double>
StateVector<Scalar> brukner_state() {
  return StateVector<Scalar>(brukner_raw_coefficients<Scalar>(), {2, 2}).normalized();
}

template <typename Scalar = double>
StateVector<Scalar> singlet() {
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  CVector<Scalar> v(4);
  v << Scalar(0), r, -r, Scalar(0);
  return StateVector<Scalar>(v, {2, 2});
}

/// Spin eigenbasis along an axis at `angle` from z in the x-z plane:
/// {|+angle>, |-angle>}.
template <typename Scalar = double>
std::vector<Projector<Scalar>> spin_basis(Scalar angle) {
  const Scalar c = std::cos(angle / 2), s = std::sin(angle / 2);
  CVector<Scalar> up(2), down(2);
  up << c, s;
  down << -s, c;
  return {Projector<Scalar>::rank_one(up), Projector<Scalar>::rank_one(down)};
}

template <typename Scalar = double>
std::vector<Projector<Scalar>> z_basis() { return spin_basis<Scalar>(Scalar(0)); }

template <typename Scalar = double>
std::vector<Projector<Scalar>> x_basis() { return spin_basis<Scalar>(std::numbers::pi_v<Scalar> / 2); }

/// Entangling evolution of a friend's measurement on (particle ⊗ memory):
/// |±z>|m0> -> |±z>|m±>, with |m0> = |m+>. A CNOT controlled by the particle.
template <typename Scalar = double>
Unitary<Scalar> friend_unitary() {
  CMatrix<Scalar> u = CMatrix<Scalar>::Zero(4, 4);
  u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = Scalar(1);
  return Unitary<Scalar>(u);
}

/// Both labs after their friends measure along z: particles prepared in
/// `particles` (two qubits), memories in |m0>, subsystems reordered to
/// (particle 1, memory 1, particle 2, memory 2) so each lab is contiguous.
template <typename Scalar>
StateVector<Scalar> entangled_labs(const StateVector<Scalar>& particles) {
  if (particles.dims() != std::vector<int>{2, 2}) throw ContractError("expected a two-qubit particle state");
  const auto memories = StateVector<Scalar>::basis({2, 2}, 0);
  const std::vector<int> order{0, 2, 1, 3};
  const auto labs = permute(tensor(particles, memories), std::span<const int>(order));
  const auto u = friend_unitary<Scalar>();
  return tensor(u, u).apply(labs);
}

enum class LabBasis { Z, X };

/// Superobserver measurement on a lab (particle ⊗ memory). Returns
/// {P(+), P(-), complement}, where the complement covers the states in which
/// the memory disagrees with the particle.
template <typename Scalar = double>
std::vector<Projector<Scalar>> lab_measurement_basis(int side, LabBasis kind) {
  if (side != 1 && side != 2) throw ContractError("lab side must be 1 or 2");
  CVector<Scalar> z_plus = CVector<Scalar>::Zero(4), z_minus = CVector<Scalar>::Zero(4);
  z_plus(0) = Scalar(1);   // |+z>|m+>
  z_minus(3) = Scalar(1);  // |-z>|m->
  CMatrix<Scalar> complement = CMatrix<Scalar>::Zero(4, 4);
  complement(1, 1) = complement(2, 2) = Scalar(1);
  if (kind == LabBasis::Z)
    return {Projector<Scalar>::rank_one(z_plus), Projector<Scalar>::rank_one(z_minus), Projector<Scalar>(complement)};
  return {Projector<Scalar>::rank_one(z_plus + z_minus), Projector<Scalar>::rank_one(z_plus - z_minus),
          Projector<Scalar>(complement)};
}

/// Dichotomic measurement: a complete projector set with outcome values
/// (+1, -1, or 0 for a branch that carries no outcome).
template <typename Scalar = double>
struct Measurement {
  std::vector<Projector<Scalar>> projectors;
  std::vector<int> values;
};

template <typename Scalar = double>
Measurement<Scalar> spin_measurement(Scalar angle) {
  return {spin_basis<Scalar>(angle), {+1, -1}};
}

template <typename Scalar = double>
Measurement<Scalar> lab_measurement(int side, LabBasis kind) {
  return {lab_measurement_basis<Scalar>(side, kind), {+1, -1, 0}};
}

/// Joint outcome distribution of a product measurement on a bipartite state,
/// indexed [i * nb + j] for Alice's projector i and Bob's projector j.
template <typename Scalar>
std::vector<Scalar> joint_probabilities(const StateVector<Scalar>& s, const Measurement<Scalar>& alice,
                                        const Measurement<Scalar>& bob) {
  std::vector<Projector<Scalar>> joint;
  joint.reserve(alice.projectors.size() * bob.projectors.size());
  for (const auto& pa : alice.projectors)
    for (const auto& pb : bob.projectors) joint.push_back(tensor(pa, pb));
  return born_probabilities<Scalar>(s, joint);
}

}  // namespace wfs

#endif  // WFS_QCORE_HPP_

// Copyright 2026 The Uniqueness Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense complex linear algebra on small Hilbert spaces: operators, pure
 * states, density matrices, POVMs, tensor products and the swap-based
 * symmetric/antisymmetric projectors.
 *
 * Joint indices follow the left-factor-major convention everywhere:
 * (j_A, j_B) maps to j_A * dim_B + j_B.
 */
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uniqueness/error.hpp"

namespace uniqueness {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Tolerance for identities that hold in exact algebra.
inline constexpr double kExactTol = 1e-12;
/// Tolerance for quantities carrying accumulated rounding.
inline constexpr double kNumericTol = 1e-10;
/// Slack allowed below zero on eigenvalues of positive operators.
inline constexpr double kPsdSlack = 1e-10;

/// Square complex matrix of a declared dimension.
class ComplexOperator {
 public:
  explicit ComplexOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      std::ostringstream os;
      os << "operator must be square and non-empty, got " << m_.rows() << "x"
         << m_.cols();
      throw InvalidValue(os.str());
    }
  }

  static ComplexOperator identity(int dim) {
    return ComplexOperator(Matrix::Identity(dim, dim));
  }
  static ComplexOperator zero(int dim) {
    return ComplexOperator(Matrix::Zero(dim, dim));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  /// max_{jk} |M[j][k] - conj(M[k][j])|.
  double hermiticity_defect() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  }
  bool is_hermitian(double tol = kExactTol) const {
    return hermiticity_defect() <= tol;
  }

  Complex trace() const { return m_.trace(); }

  /// Ascending eigenvalues of the Hermitian part.
  RealVector eigenvalues() const {
    const Matrix herm = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }

  /// Largest entrywise modulus of (this - other).
  double max_abs_diff(const ComplexOperator& other) const {
    require_same_dim(other);
    return (m_ - other.m_).cwiseAbs().maxCoeff();
  }

  ComplexOperator adjoint() const { return ComplexOperator(m_.adjoint()); }

  friend ComplexOperator operator+(const ComplexOperator& a,
                                   const ComplexOperator& b) {
    a.require_same_dim(b);
    return ComplexOperator(a.m_ + b.m_);
  }
  friend ComplexOperator operator-(const ComplexOperator& a,
                                   const ComplexOperator& b) {
    a.require_same_dim(b);
    return ComplexOperator(a.m_ - b.m_);
  }
  friend ComplexOperator operator*(const ComplexOperator& a,
                                   const ComplexOperator& b) {
    a.require_same_dim(b);
    return ComplexOperator(a.m_ * b.m_);
  }
  friend ComplexOperator operator*(Complex s, const ComplexOperator& a) {
    return ComplexOperator(s * a.m_);
  }
  friend ComplexOperator operator*(double s, const ComplexOperator& a) {
    return ComplexOperator(s * a.m_);
  }

 private:
  void require_same_dim(const ComplexOperator& other) const {
    if (dim() != other.dim()) {
      std::ostringstream os;
      os << "operator dimensions differ: " << dim() << " vs " << other.dim();
      throw DimensionMismatch(os.str());
    }
  }

  Matrix m_;
};

/**
 * Normalized state vector with a canonical global phase: the first
 * amplitude whose modulus exceeds kExactTol is real and non-negative.
 */
class PureState {
 public:
  /// Validates unit norm, then canonicalizes the phase.
  explicit PureState(Vector amplitudes) : a_(std::move(amplitudes)) {
    if (a_.size() == 0) throw InvalidValue("state must have dimension >= 1");
    const double norm = a_.norm();
    if (std::abs(norm - 1.0) > kExactTol) {
      std::ostringstream os;
      os << "state norm " << norm << " deviates from 1";
      throw InvalidValue(os.str());
    }
    canonicalize();
  }

  /// Rescales an arbitrary non-zero vector to unit norm.
  static PureState normalized(const Vector& v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw InvalidValue("cannot normalize a zero or non-finite vector");
    return PureState(v / norm);
  }

  static PureState basis(int dim, int index) {
    if (index < 0 || index >= dim)
      throw InvalidValue("basis index out of range");
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
  }

  int dim() const { return static_cast<int>(a_.size()); }
  const Vector& amplitudes() const { return a_; }
  Complex operator[](int k) const { return a_(k); }

  /// |psi><psi|.
  ComplexOperator projector() const {
    return ComplexOperator(a_ * a_.adjoint());
  }

  /// |<this|other>|^2.
  double fidelity(const PureState& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("state dimensions differ");
    return std::norm(a_.dot(other.a_));
  }

 private:
  void canonicalize() {
    for (Eigen::Index k = 0; k < a_.size(); ++k) {
      const double mod = std::abs(a_(k));
      if (mod > kExactTol) {
        const Complex phase = std::conj(a_(k)) / mod;
        a_ *= phase;
        a_(k) = Complex(mod, 0.0);
        return;
      }
    }
  }

  Vector a_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexOperator op) : op_(std::move(op)) {
    const double herm = op_.hermiticity_defect();
    if (herm > kExactTol) {
      std::ostringstream os;
      os << "density matrix not Hermitian (defect " << herm << ")";
      throw InvalidValue(os.str());
    }
    const Complex tr = op_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kExactTol) {
      std::ostringstream os;
      os << "density matrix trace " << tr.real() << " deviates from 1";
      throw InvalidValue(os.str());
    }
    const double min_eig = op_.eigenvalues().minCoeff();
    if (min_eig < -kPsdSlack) {
      std::ostringstream os;
      os << "density matrix has negative eigenvalue " << min_eig;
      throw InvalidValue(os.str());
    }
  }

  static DensityMatrix pure(const PureState& psi) {
    return DensityMatrix(psi.projector());
  }
  static DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix((1.0 / dim) * ComplexOperator::identity(dim));
  }
  /// Convex combination sum_k w_k |psi_k><psi_k|; weights are renormalized.
  static DensityMatrix mixture(const std::vector<PureState>& states,
                               const std::vector<double>& weights) {
    if (states.empty() || states.size() != weights.size())
      throw DimensionMismatch("mixture needs one weight per state");
    const int dim = states.front().dim();
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw InvalidValue("mixture weights must be >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidValue("mixture weights sum to zero");
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (states[k].dim() != dim)
        throw DimensionMismatch("mixture states differ in dimension");
      const Vector& a = states[k].amplitudes();
      m += (weights[k] / total) * (a * a.adjoint());
    }
    // Symmetrize away the rounding in the outer products.
    m = 0.5 * (m + m.adjoint()).eval();
    m /= m.trace().real();
    return DensityMatrix(ComplexOperator(std::move(m)));
  }

  int dim() const { return op_.dim(); }
  const ComplexOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }

 private:
  ComplexOperator op_;
};

/// Finite POVM: positive effects summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<ComplexOperator> effects)
      : effects_(std::move(effects)) {
    if (effects_.empty()) throw InvalidValue("POVM needs at least one effect");
    const int dim = effects_.front().dim();
    Matrix total = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < effects_.size(); ++i) {
      const auto& e = effects_[i];
      if (e.dim() != dim)
        throw DimensionMismatch("POVM effects differ in dimension");
      if (!e.is_hermitian(kNumericTol)) {
        std::ostringstream os;
        os << "POVM effect " << i << " is not Hermitian";
        throw InvalidValue(os.str());
      }
      const double min_eig = e.eigenvalues().minCoeff();
      if (min_eig < -kPsdSlack) {
        std::ostringstream os;
        os << "POVM effect " << i << " has negative eigenvalue " << min_eig;
        throw InvalidValue(os.str());
      }
      total += e.matrix();
    }
    const double defect =
        (total - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (defect > kNumericTol) {
      std::ostringstream os;
      os << "POVM effects do not sum to identity (max deviation " << defect
         << ")";
      throw InvalidValue(os.str());
    }
  }

  /// Projective measurement onto an orthonormal basis.
  static Povm from_basis(const std::vector<PureState>& basis) {
    std::vector<ComplexOperator> effects;
    effects.reserve(basis.size());
    for (const auto& v : basis) effects.push_back(v.projector());
    return Povm(std::move(effects));
  }

  static Povm computational(int dim) {
    std::vector<PureState> basis;
    for (int k = 0; k < dim; ++k) basis.push_back(PureState::basis(dim, k));
    return from_basis(basis);
  }

  int dim() const { return effects_.front().dim(); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<ComplexOperator>& effects() const { return effects_; }
  const ComplexOperator& operator[](std::size_t i) const { return effects_[i]; }

 private:
  std::vector<ComplexOperator> effects_;
};

/// Kronecker product a ⊗ b, left factor major.
inline ComplexOperator tensor(const ComplexOperator& a,
                              const ComplexOperator& b) {
  return ComplexOperator(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

inline PureState tensor(const PureState& a, const PureState& b) {
  return PureState::normalized(
      Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval());
}

namespace detail {
inline void require_joint_dim(int d) {
  if (d < 2) {
    std::ostringstream os;
    os << "local dimension must be >= 2, got " << d;
    throw InvalidDimension(os.str());
  }
}
}  // namespace detail

/// SWAP|j>|k> = |k>|j> on C^d ⊗ C^d.
inline ComplexOperator swap_operator(int d) {
  detail::require_joint_dim(d);
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) m(k * d + j, j * d + k) = 1.0;
  return ComplexOperator(std::move(m));
}

/// P+ = (I + SWAP) / 2.
inline ComplexOperator sym_projector(int d) {
  detail::require_joint_dim(d);
  return 0.5 * (ComplexOperator::identity(d * d) + swap_operator(d));
}

/// P- = (I - SWAP) / 2.
inline ComplexOperator antisym_projector(int d) {
  detail::require_joint_dim(d);
  return 0.5 * (ComplexOperator::identity(d * d) - swap_operator(d));
}

/// Tr[rho * op]; the imaginary part must vanish to kNumericTol.
inline double expectation(const DensityMatrix& rho, const ComplexOperator& op) {
  if (rho.dim() != op.dim()) {
    std::ostringstream os;
    os << "expectation: state dimension " << rho.dim()
       << " does not match operator dimension " << op.dim();
    throw DimensionMismatch(os.str());
  }
  // Tr[AB] = sum_jk A_jk B_kj
  const Complex value = (rho.matrix().cwiseProduct(op.matrix().transpose())).sum();
  if (std::abs(value.imag()) > kNumericTol) {
    std::ostringstream os;
    os << "expectation has imaginary part " << value.imag();
    throw NumericalInconsistency(os.str());
  }
  return value.real();
}

/// Born-rule probability Tr[effect * rho] clamped into [0, 1].
inline double born_probability(const DensityMatrix& rho,
                               const ComplexOperator& effect) {
  return std::clamp(expectation(rho, effect), 0.0, 1.0);
}

}  // namespace uniqueness

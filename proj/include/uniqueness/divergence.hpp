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
 * The divergence operator
 *
 *   C = 1/2 sum_i (E_A(i) ⊗ 1 - 1 ⊗ E_B(i))^2
 *
 * for finite POVMs, its isotropic continuous version (Monte Carlo over the
 * Haar measure and closed form), its mean value on joint states, and the
 * remapped variant where B's outcome is paired with A's through a
 * correlation map f.
 *
 * The closed form is ((d-1)/(d+1)) P+ + P-: symmetric states sit at the
 * floor (d-1)/(d+1), antisymmetric states at 1.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "uniqueness/error.hpp"
#include "uniqueness/haar.hpp"
#include "uniqueness/hilbert.hpp"
#include "uniqueness/streams.hpp"

namespace uniqueness {

enum class Provenance { discrete, monte_carlo, closed_form };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::discrete: return "discrete";
    case Provenance::monte_carlo: return "monte_carlo";
    case Provenance::closed_form: return "closed_form";
  }
  return "unknown";
}

struct McMeta {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::angles;
};

/// Lower spectral bound (d-1)/(d+1) of the isotropic divergence.
inline double divergence_floor(int d) {
  return static_cast<double>(d - 1) / static_cast<double>(d + 1);
}

/// Divergence operator on C^d ⊗ C^d with a record of how it was built.
class DivergenceOperator {
 public:
  static constexpr double kSpectrumSlack = 1e-9;

  DivergenceOperator(int dim_local, ComplexOperator op, Provenance provenance,
                     std::optional<McMeta> mc_meta = std::nullopt)
      : dim_local_(dim_local),
        op_(std::move(op)),
        provenance_(provenance),
        mc_meta_(mc_meta) {
    detail::require_joint_dim(dim_local_);
    if (op_.dim() != dim_local_ * dim_local_)
      throw DimensionMismatch("divergence operator must act on d^2 dimensions");
    const double herm = op_.hermiticity_defect();
    if (herm > kNumericTol) {
      std::ostringstream os;
      os << "divergence operator not Hermitian (defect " << herm << ")";
      throw NumericalInconsistency(os.str());
    }
    if (provenance_ != Provenance::monte_carlo) {
      const RealVector eig = op_.eigenvalues();
      if (eig.minCoeff() < -kSpectrumSlack ||
          eig.maxCoeff() > 1.0 + kSpectrumSlack) {
        std::ostringstream os;
        os << "divergence spectrum [" << eig.minCoeff() << ", "
           << eig.maxCoeff() << "] escapes [0, 1]";
        throw InternalConsistency(os.str());
      }
    }
  }

  int dim_local() const { return dim_local_; }
  const ComplexOperator& op() const { return op_; }
  Provenance provenance() const { return provenance_; }
  const std::optional<McMeta>& mc_meta() const { return mc_meta_; }

 private:
  int dim_local_;
  ComplexOperator op_;
  Provenance provenance_;
  std::optional<McMeta> mc_meta_;
};

/// 1/2 sum_i (E_A(i) ⊗ 1 - 1 ⊗ E_B(i))^2, outcomes paired by index.
inline DivergenceOperator divergence_discrete(const Povm& povm_a,
                                              const Povm& povm_b) {
  if (povm_a.dim() != povm_b.dim() || povm_a.size() != povm_b.size()) {
    std::ostringstream os;
    os << "cannot pair POVMs: dims " << povm_a.dim() << "/" << povm_b.dim()
       << ", outcome counts " << povm_a.size() << "/" << povm_b.size();
    throw PairingError(os.str());
  }
  const int d = povm_a.dim();
  const auto id = ComplexOperator::identity(d);
  Matrix sum = Matrix::Zero(d * d, d * d);
  for (std::size_t i = 0; i < povm_a.size(); ++i) {
    const Matrix x =
        (tensor(povm_a[i], id) - tensor(id, povm_b[i])).matrix();
    sum.noalias() += x * x;
  }
  return DivergenceOperator(d, ComplexOperator(0.5 * sum), Provenance::discrete);
}

/**
 * Monte Carlo estimate of the isotropic divergence from a Haar batch:
 * d * mean over states of 1/2 (E ⊗ 1 - 1 ⊗ E)^2 with E = |phi><phi|. The
 * factor d converts the probability measure back to the volume element.
 *
 * Partial sums are formed per block of kBlockSize states and added in block
 * order, so the result does not depend on `shards`.
 */
inline DivergenceOperator divergence_from_batch(const SampleBatch& batch,
                                                unsigned shards = 1) {
  if (batch.states.empty()) throw EmptyBatch("divergence from empty batch");
  const int d = batch.dim;
  const std::size_t n = batch.states.size();
  const Matrix id = Matrix::Identity(d, d);
  std::vector<Matrix> partial(block_count(n), Matrix::Zero(d * d, d * d));
  for_each_block(n, shards, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Matrix& acc = partial[b];
    Matrix x(d * d, d * d);
    for (std::size_t i = begin; i < end; ++i) {
      const Vector& a = batch.states[i].amplitudes();
      const Matrix e = a * a.adjoint();
      x = Eigen::kroneckerProduct(e, id).eval() -
          Eigen::kroneckerProduct(id, e).eval();
      acc.noalias() += x * x;
    }
  });
  Matrix total = Matrix::Zero(d * d, d * d);
  for (const auto& p : partial) total += p;
  total *= 0.5 * d / static_cast<double>(n);
  // Exact Hermitian symmetry; the estimator is Hermitian term by term.
  total = 0.5 * (total + total.adjoint()).eval();
  return DivergenceOperator(d, ComplexOperator(std::move(total)),
                            Provenance::monte_carlo,
                            McMeta{n, batch.seed, batch.sampler});
}

inline DivergenceOperator divergence_isotropic_mc(int d, std::size_t n,
                                                  std::uint64_t seed,
                                                  Sampler sampler = Sampler::angles,
                                                  unsigned shards = 1) {
  return divergence_from_batch(sample_haar(sampler, d, n, seed, shards), shards);
}

/// ((d-1)/(d+1)) P+ + P-.
inline DivergenceOperator divergence_isotropic_closed(int d) {
  detail::require_joint_dim(d);
  ComplexOperator op =
      divergence_floor(d) * sym_projector(d) + antisym_projector(d);
  return DivergenceOperator(d, std::move(op), Provenance::closed_form);
}

/// Tr[rho C]. For a closed-form source the value must lie in
/// [(d-1)/(d+1), 1] up to 1e-9.
inline double mean_divergence(const DensityMatrix& rho,
                              const DivergenceOperator& source) {
  const double value = expectation(rho, source.op());
  if (source.provenance() == Provenance::closed_form) {
    constexpr double tol = DivergenceOperator::kSpectrumSlack;
    const double lo = divergence_floor(source.dim_local());
    if (value < lo - tol || value > 1.0 + tol) {
      std::ostringstream os;
      os << "mean divergence " << value << " outside [" << lo << ", 1]";
      throw InternalConsistency(os.str());
    }
  }
  return value;
}

/**
 * Correlation map f on pure states of C^d, built from a kernel K with
 * K^dagger K proportional to the identity:
 *   antiunitary: f(phi) = K conj(phi), normalized
 *   unitary:     f(phi) = K phi, normalized
 * Either kind maps the Haar measure to itself.
 */
class Remap {
 public:
  enum class Kind { unitary, antiunitary };

  Remap(ComplexOperator kernel, Kind kind)
      : kernel_(std::move(kernel)), kind_(kind) {
    const int d = kernel_.dim();
    const Matrix gram = kernel_.matrix().adjoint() * kernel_.matrix();
    scale_ = gram.trace().real() / d;
    if (!(scale_ > 0.0))
      throw InvalidValue("remap kernel must be non-zero");
    const double defect =
        (gram - scale_ * Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (defect > kNumericTol * std::max(1.0, scale_)) {
      std::ostringstream os;
      os << "remap kernel is not proportional to a unitary (defect " << defect
         << ")";
      throw InvalidValue(os.str());
    }
  }

  /// f(phi) = phi; the remapped divergence reduces to the isotropic one.
  static Remap identity(int d) {
    return Remap(ComplexOperator::identity(d), Kind::unitary);
  }
  /// f(phi) = conj(phi); the matched map of (|00> + |11>)/sqrt 2.
  static Remap conjugation(int d) {
    return Remap(ComplexOperator::identity(d), Kind::antiunitary);
  }
  /// Qubit inversion (a, b) -> (conj b, -conj a): the orthogonal state.
  static Remap inversion() {
    Matrix k(2, 2);
    k << 0.0, 1.0, -1.0, 0.0;
    return Remap(ComplexOperator(std::move(k)), Kind::antiunitary);
  }

  int dim() const { return kernel_.dim(); }
  const ComplexOperator& kernel() const { return kernel_; }
  Kind kind() const { return kind_; }

  PureState operator()(const PureState& phi) const {
    require_dim(phi.dim());
    const Vector& a = phi.amplitudes();
    const Vector image =
        kind_ == Kind::antiunitary ? Vector(kernel_.matrix() * a.conjugate())
                                   : Vector(kernel_.matrix() * a);
    return PureState::normalized(image);
  }

  /// Image of an effect: K conj(E) K^dagger / s or K E K^dagger / s.
  ComplexOperator apply(const ComplexOperator& effect) const {
    require_dim(effect.dim());
    const Matrix& k = kernel_.matrix();
    const Matrix e = kind_ == Kind::antiunitary ? Matrix(effect.matrix().conjugate())
                                                : effect.matrix();
    Matrix out = k * e * k.adjoint() / scale_;
    out = 0.5 * (out + out.adjoint()).eval();
    return ComplexOperator(std::move(out));
  }

  Povm apply(const Povm& povm) const {
    std::vector<ComplexOperator> effects;
    effects.reserve(povm.size());
    for (const auto& e : povm.effects()) effects.push_back(apply(e));
    return Povm(std::move(effects));
  }

 private:
  void require_dim(int d) const {
    if (d != dim()) {
      std::ostringstream os;
      os << "remap acts on dimension " << dim() << ", got " << d;
      throw DimensionMismatch(os.str());
    }
  }

  ComplexOperator kernel_;
  Kind kind_;
  double scale_ = 1.0;
};

/// Singular values of sqrt(d) M may differ from 1 by at most this.
inline constexpr double kMaxEntangledTol = 1e-8;

/// Local dimension d of a joint state of dimension d^2.
inline int local_dim_of_joint(int joint_dim) {
  const int d = static_cast<int>(std::lround(std::sqrt(joint_dim)));
  if (d * d != joint_dim || d < 2) {
    std::ostringstream os;
    os << "joint dimension " << joint_dim << " is not d^2 with d >= 2";
    throw InvalidDimension(os.str());
  }
  return d;
}

/**
 * Matched remap of a maximally entangled joint state psi. With M[j][k] the
 * amplitude of |j>_A|k>_B and U = sqrt(d) M unitary, f(phi) = U^T conj(phi)
 * is the B state maximizing |(<phi| ⊗ <f|) psi|^2, which then equals 1/d
 * for every phi.
 */
inline Remap correlation_remap(const PureState& psi) {
  const int d = local_dim_of_joint(psi.dim());
  Matrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) m(j, k) = psi[j * d + k];
  const Matrix u = std::sqrt(static_cast<double>(d)) * m;
  Eigen::JacobiSVD<Matrix> svd(u);
  const RealVector sv = svd.singularValues();
  if ((sv.array() - 1.0).abs().maxCoeff() > kMaxEntangledTol) {
    std::ostringstream os;
    os << "state is not maximally entangled; singular values of sqrt(d) M:";
    for (Eigen::Index i = 0; i < sv.size(); ++i) os << ' ' << sv(i);
    throw NotMaximallyEntangled(os.str());
  }
  return Remap(ComplexOperator(u.transpose()), Remap::Kind::antiunitary);
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/**
 * Monte Carlo mean of d * Tr[rho (E(phi) ⊗ 1 - 1 ⊗ E(f(phi)))^2] / 2 over
 * Haar-distributed phi, with its standard error.
 */
inline McEstimate divergence_remapped_estimate(const DensityMatrix& rho,
                                               const Remap& remap,
                                               std::size_t n, std::uint64_t seed,
                                               Sampler sampler = Sampler::angles,
                                               unsigned shards = 1) {
  const int d = remap.dim();
  if (rho.dim() != d * d) {
    std::ostringstream os;
    os << "remapped divergence: state dimension " << rho.dim()
       << " does not match remap dimension " << d << "^2";
    throw DimensionMismatch(os.str());
  }
  const SampleBatch batch = sample_haar(sampler, d, n, seed, shards);
  const Matrix id = Matrix::Identity(d, d);
  const Matrix rho_t = rho.matrix().transpose();
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<Partial> partial(block_count(n));
  for_each_block(n, shards, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Matrix x(d * d, d * d);
    for (std::size_t i = begin; i < end; ++i) {
      const PureState& phi = batch.states[i];
      const Vector& a = phi.amplitudes();
      const PureState image = remap(phi);
      const Vector& c = image.amplitudes();
      const Matrix e = a * a.adjoint();
      const Matrix f = c * c.adjoint();
      x = Eigen::kroneckerProduct(e, id).eval() -
          Eigen::kroneckerProduct(id, f).eval();
      const Matrix x2 = x * x;
      const double g = 0.5 * d * x2.cwiseProduct(rho_t).sum().real();
      partial[b].sum += g;
      partial[b].sum_sq += g * g;
    }
  });
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& p : partial) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = n > 1 ? std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0)) : 0.0;
  return McEstimate{mean, std::sqrt(var / nn), n};
}

inline double divergence_remapped_mc(const DensityMatrix& rho, const Remap& remap,
                                     std::size_t n, std::uint64_t seed,
                                     Sampler sampler = Sampler::angles,
                                     unsigned shards = 1) {
  return divergence_remapped_estimate(rho, remap, n, seed, sampler, shards).value;
}

/**
 * Exact remapped divergence operator I - d * E[E(phi) ⊗ E(f(phi))] with the
 * expectation taken from the second Haar moment (I + SWAP)/(d(d+1)). For an
 * antiunitary remap the B factor is transposed, turning SWAP into
 * sum_jk |jj><kk|.
 */
inline ComplexOperator remapped_divergence_operator(const Remap& remap) {
  const int d = remap.dim();
  const int dd = d * d;
  Matrix twirl = Matrix::Identity(dd, dd);
  if (remap.kind() == Remap::Kind::unitary) {
    twirl += swap_operator(d).matrix();
  } else {
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) twirl(j * d + j, k * d + k) += 1.0;
  }
  const Matrix& k = remap.kernel().matrix();
  const double scale = (k.adjoint() * k).trace().real() / d;
  const Matrix local = Eigen::kroneckerProduct(Matrix::Identity(d, d), k).eval();
  Matrix cross = local * twirl * local.adjoint() / (scale * d * (d + 1));
  Matrix op = Matrix::Identity(dd, dd) - d * cross;
  op = 0.5 * (op + op.adjoint()).eval();
  return ComplexOperator(std::move(op));
}

}  // namespace uniqueness

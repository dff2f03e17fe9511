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
 * Canonical joint states and measurement scenarios: Born-rule sampling of
 * joint outcomes, the singlet on a ±45° beamsplitter, the product-form
 * check of joint probabilities, pure-state random bit generation and the
 * prediction game.
 *
 * Polarization labels: H -> index 0, V -> index 1. Beamsplitter outcome 0 is
 * "transmit" (|+45°>), outcome 1 is "reflect" (|-45°>).
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "uniqueness/divergence.hpp"
#include "uniqueness/error.hpp"
#include "uniqueness/haar.hpp"
#include "uniqueness/hilbert.hpp"
#include "uniqueness/streams.hpp"

namespace uniqueness {

namespace states {

inline PureState horizontal() { return PureState::basis(2, 0); }
inline PureState vertical() { return PureState::basis(2, 1); }

inline PureState plus45() {
  Vector v(2);
  v << 1.0, 1.0;
  return PureState::normalized(v);
}
inline PureState minus45() {
  Vector v(2);
  v << 1.0, -1.0;
  return PureState::normalized(v);
}

/// sum_j |j> / sqrt(d).
inline PureState uniform_superposition(int d) {
  return PureState::normalized(Vector::Ones(d));
}

namespace detail {
inline PureState two_qubit(double a00, double a01, double a10, double a11) {
  Vector v(4);
  v << a00, a01, a10, a11;
  return PureState::normalized(v);
}
}  // namespace detail

inline PureState bell_phi_plus() { return detail::two_qubit(1, 0, 0, 1); }
inline PureState bell_phi_minus() { return detail::two_qubit(1, 0, 0, -1); }
inline PureState bell_psi_plus() { return detail::two_qubit(0, 1, 1, 0); }
/// (|HV> - |VH>)/sqrt 2.
inline PureState bell_psi_minus() { return detail::two_qubit(0, 1, -1, 0); }

/// (1 ⊗ U) sum_j |jj> / sqrt(d); U must be unitary.
inline PureState max_entangled(const ComplexOperator& unitary) {
  const int d = unitary.dim();
  Vector v = Vector::Zero(d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) v(j * d + k) = unitary(k, j);
  v /= std::sqrt(static_cast<double>(d));
  if (std::abs(v.norm() - 1.0) > kNumericTol)
    throw InvalidValue("max_entangled needs a unitary");
  return PureState::normalized(v);
}

}  // namespace states

inline Povm hv_povm() {
  return Povm::from_basis({states::horizontal(), states::vertical()});
}

/// {|+45°><+45°|, |-45°><-45°|}: transmit, reflect.
inline Povm diagonal_povm() {
  return Povm::from_basis({states::plus45(), states::minus45()});
}

enum class Bell { phi_plus, phi_minus, psi_plus, psi_minus };

struct ProductSpec {
  PureState a;
  PureState b;
};
struct MaxEntangledSpec {
  ComplexOperator unitary;
};
struct CustomSpec {
  DensityMatrix rho;
};

struct JointStateSpec {
  std::variant<Bell, ProductSpec, MaxEntangledSpec, CustomSpec> kind;
  int dim_local = 2;
};

/// The joint pure state a spec describes, if it is pure by construction.
inline std::optional<PureState> joint_pure_state(const JointStateSpec& spec) {
  return std::visit(
      [&](const auto& k) -> std::optional<PureState> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Bell>) {
          if (spec.dim_local != 2)
            throw InvalidDimension("Bell states require local dimension 2");
          switch (k) {
            case Bell::phi_plus: return states::bell_phi_plus();
            case Bell::phi_minus: return states::bell_phi_minus();
            case Bell::psi_plus: return states::bell_psi_plus();
            case Bell::psi_minus: return states::bell_psi_minus();
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ProductSpec>) {
          if (k.a.dim() != spec.dim_local || k.b.dim() != spec.dim_local)
            throw DimensionMismatch("product factors must have the local dimension");
          return tensor(k.a, k.b);
        } else if constexpr (std::is_same_v<T, MaxEntangledSpec>) {
          if (k.unitary.dim() != spec.dim_local)
            throw DimensionMismatch("unitary must have the local dimension");
          return states::max_entangled(k.unitary);
        } else {
          return std::nullopt;
        }
      },
      spec.kind);
}

inline DensityMatrix resolve(const JointStateSpec& spec) {
  if (const auto* custom = std::get_if<CustomSpec>(&spec.kind)) {
    if (custom->rho.dim() != spec.dim_local * spec.dim_local)
      throw DimensionMismatch("custom joint state must act on d^2 dimensions");
    return custom->rho;
  }
  return DensityMatrix::pure(*joint_pure_state(spec));
}

struct BellBasisReport {
  double sym_deviation = 0.0;      ///< max |P+ - sum of symmetric Bell projectors|
  double antisym_deviation = 0.0;  ///< max |P- - |Psi-><Psi-||
  double max_idempotency_defect = 0.0;
  double sym_trace = 0.0;
  double antisym_trace = 0.0;
  bool passed = false;
};

/// P+ = |Phi+><Phi+| + |Phi-><Phi-| + |Psi+><Psi+| and P- = |Psi-><Psi-|.
inline BellBasisReport bell_basis_check() {
  const std::array<ComplexOperator, 4> proj = {
      states::bell_phi_plus().projector(), states::bell_phi_minus().projector(),
      states::bell_psi_plus().projector(), states::bell_psi_minus().projector()};
  BellBasisReport r;
  const ComplexOperator sym_sum = proj[0] + proj[1] + proj[2];
  r.sym_deviation = sym_sum.max_abs_diff(sym_projector(2));
  r.antisym_deviation = proj[3].max_abs_diff(antisym_projector(2));
  for (const auto& p : proj)
    r.max_idempotency_defect =
        std::max(r.max_idempotency_defect, (p * p).max_abs_diff(p));
  r.sym_trace = sym_sum.trace().real();
  r.antisym_trace = proj[3].trace().real();
  r.passed = r.sym_deviation <= kExactTol && r.antisym_deviation <= kExactTol &&
             r.max_idempotency_defect <= kExactTol;
  return r;
}

struct TrialRecord {
  int outcome_a = 0;
  int outcome_b = 0;
  std::size_t trial = 0;
};

/// Probabilities below this are treated as exact zeros before sampling.
inline constexpr double kZeroProbability = 1e-15;

/// P(i, j) = Tr[(E_A(i) ⊗ E_B(j)) rho]; rows index A, columns index B.
inline Eigen::MatrixXd joint_probabilities(const DensityMatrix& rho,
                                           const Povm& povm_a,
                                           const Povm& povm_b) {
  if (rho.dim() != povm_a.dim() * povm_b.dim()) {
    std::ostringstream os;
    os << "joint state dimension " << rho.dim() << " does not match POVMs "
       << povm_a.dim() << " x " << povm_b.dim();
    throw DimensionMismatch(os.str());
  }
  Eigen::MatrixXd p(povm_a.size(), povm_b.size());
  for (std::size_t i = 0; i < povm_a.size(); ++i)
    for (std::size_t j = 0; j < povm_b.size(); ++j)
      p(i, j) = expectation(rho, tensor(povm_a[i], povm_b[j]));
  const double total = p.sum();
  if (std::abs(total - 1.0) > kNumericTol) {
    std::ostringstream os;
    os << "joint probabilities sum to " << total;
    throw NumericalInconsistency(os.str());
  }
  if (p.minCoeff() < -kNumericTol) {
    std::ostringstream os;
    os << "negative joint probability " << p.minCoeff();
    throw NumericalInconsistency(os.str());
  }
  p = p.unaryExpr([](double v) { return v < kZeroProbability ? 0.0 : v; });
  return p / p.sum();
}

namespace detail {
/// Index of the first cell whose cumulative weight exceeds u, skipping
/// zero-weight cells even at the rounding edge.
inline std::size_t inverse_cdf(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it != cumulative.end()) return static_cast<std::size_t>(it - cumulative.begin());
  // u beyond the rounded total: take the last cell with positive weight.
  std::size_t k = cumulative.size() - 1;
  while (k > 0 && cumulative[k] == cumulative[k - 1]) --k;
  return k;
}
}  // namespace detail

/// Samples n joint outcomes from the Born-rule distribution.
inline std::vector<TrialRecord> measure_joint(const DensityMatrix& rho,
                                              const Povm& povm_a,
                                              const Povm& povm_b, std::size_t n,
                                              std::uint64_t seed,
                                              unsigned shards = 1) {
  const Eigen::MatrixXd p = joint_probabilities(rho, povm_a, povm_b);
  const auto cols = static_cast<std::size_t>(p.cols());
  std::vector<double> cumulative;
  cumulative.reserve(p.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) cumulative.push_back(acc += p(i, j));
  std::vector<TrialRecord> records(n);
  for_each_block(n, shards, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, b);
    for (std::size_t t = begin; t < end; ++t) {
      const std::size_t cell = detail::inverse_cdf(cumulative, uniform01(eng));
      records[t] = TrialRecord{static_cast<int>(cell / cols),
                               static_cast<int>(cell % cols), t};
    }
  });
  return records;
}

struct BeamsplitterReport {
  std::size_t trials = 0;
  std::size_t same_outcome = 0;
  std::size_t different_outcome = 0;
  double transmit_frequency_a = 0.0;
  double transmit_frequency_b = 0.0;
  bool anticorrelated = false;  ///< outcome_b == 1 - outcome_a in every record
};

/// Singlet pair sent through identically oriented ±45° beamsplitters.
inline BeamsplitterReport singlet_beamsplitter(std::size_t n, std::uint64_t seed,
                                               unsigned shards = 1) {
  if (n == 0) throw EmptyBatch("beamsplitter needs at least one trial");
  const Povm bs = diagonal_povm();
  const auto records = measure_joint(DensityMatrix::pure(states::bell_psi_minus()),
                                     bs, bs, n, seed, shards);
  BeamsplitterReport r;
  r.trials = n;
  std::size_t transmit_a = 0, transmit_b = 0;
  r.anticorrelated = true;
  for (const auto& rec : records) {
    if (rec.outcome_a == rec.outcome_b) ++r.same_outcome;
    if (rec.outcome_b != 1 - rec.outcome_a) r.anticorrelated = false;
    transmit_a += rec.outcome_a == 0;
    transmit_b += rec.outcome_b == 0;
  }
  r.different_outcome = n - r.same_outcome;
  r.transmit_frequency_a = static_cast<double>(transmit_a) / n;
  r.transmit_frequency_b = static_cast<double>(transmit_b) / n;
  return r;
}

struct ProbabilityTriple {
  double joint = 0.0;     ///< P_AB(phi, f(phi))
  double marginal_a = 0.0;
  double marginal_b = 0.0;
  double deviation() const { return std::abs(joint - marginal_a * marginal_b); }
};

/// Born-rule probabilities of detecting phi on A and f(phi) on B.
inline ProbabilityTriple joint_vs_product(const DensityMatrix& rho_ab,
                                          const PureState& phi,
                                          const Remap& remap) {
  const int d = remap.dim();
  const auto e = phi.projector();
  const auto f = remap(phi).projector();
  const auto id = ComplexOperator::identity(d);
  return ProbabilityTriple{expectation(rho_ab, tensor(e, f)),
                           expectation(rho_ab, tensor(e, id)),
                           expectation(rho_ab, tensor(id, f))};
}

struct FactorizationResult {
  double max_deviation = 0.0;
  std::size_t argmax = 0;  ///< index of the sampled state attaining it
};

/**
 * Max over n Haar-sampled phi of |P_AB(phi, f(phi)) - P_A(phi) P_B(f(phi))|
 * for an arbitrary joint state; marginals come from rho_ab itself.
 */
inline FactorizationResult factorization_check_joint(const DensityMatrix& rho_ab,
                                                     const Remap& remap,
                                                     std::size_t n_states,
                                                     std::uint64_t seed) {
  const int d = remap.dim();
  if (rho_ab.dim() != d * d)
    throw DimensionMismatch("joint state and remap dimensions disagree");
  const auto batch = sample_haar_gaussian(d, n_states, seed);
  FactorizationResult r;
  for (std::size_t i = 0; i < batch.states.size(); ++i) {
    const double dev = joint_vs_product(rho_ab, batch.states[i], remap).deviation();
    if (dev > r.max_deviation) {
      r.max_deviation = dev;
      r.argmax = i;
    }
  }
  return r;
}

/**
 * Product-form check for rho_a ⊗ rho_b: the joint probability is evaluated
 * on the tensor product, the marginals on the local states.
 */
inline double factorization_check(const DensityMatrix& rho_a,
                                  const DensityMatrix& rho_b, const Remap& remap,
                                  std::size_t n_states, std::uint64_t seed) {
  const int d = remap.dim();
  if (rho_a.dim() != d || rho_b.dim() != d)
    throw DimensionMismatch("local states and remap dimensions disagree");
  const DensityMatrix joint(tensor(rho_a.op(), rho_b.op()));
  const auto batch = sample_haar_gaussian(d, n_states, seed);
  double worst = 0.0;
  for (const auto& phi : batch.states) {
    const auto e = phi.projector();
    const auto f = remap(phi).projector();
    const double p_ab = expectation(joint, tensor(e, f));
    const double p_a = expectation(rho_a, e);
    const double p_b = expectation(rho_b, f);
    worst = std::max(worst, std::abs(p_ab - p_a * p_b));
  }
  return worst;
}

struct QrngResult {
  std::vector<std::uint8_t> bits;
  double p_one = 0.0;  ///< Born probability of outcome 1
  double ones_frequency = 0.0;
  std::size_t longest_run = 0;

  /// Bits packed MSB first into bytes, zero padded, as lowercase hex.
  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t byte = 0; byte * 8 < bits.size(); ++byte) {
      unsigned v = 0;
      for (std::size_t k = 0; k < 8; ++k) {
        const std::size_t i = byte * 8 + k;
        v = (v << 1) | (i < bits.size() ? bits[i] : 0u);
      }
      out.push_back(kDigits[v >> 4]);
      out.push_back(kDigits[v & 0xF]);
    }
    return out;
  }
};

inline std::size_t longest_run(const std::vector<std::uint8_t>& bits) {
  std::size_t best = 0, run = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    run = (i > 0 && bits[i] == bits[i - 1]) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

/// n Born-rule bits from measuring a pure state with a two-outcome POVM.
inline QrngResult qrng_generate(const PureState& state, const Povm& povm,
                                std::size_t n, std::uint64_t seed,
                                unsigned shards = 1) {
  if (povm.size() != 2) {
    std::ostringstream os;
    os << "bit generation needs a two-outcome POVM, got " << povm.size();
    throw UnsupportedOutcomeCount(os.str());
  }
  if (state.dim() != povm.dim())
    throw DimensionMismatch("state and POVM dimensions disagree");
  if (n == 0) throw EmptyBatch("bit generation needs n >= 1");
  const DensityMatrix rho = DensityMatrix::pure(state);
  double p1 = born_probability(rho, povm[1]);
  if (p1 < kZeroProbability) p1 = 0.0;
  if (p1 > 1.0 - kZeroProbability) p1 = 1.0;
  QrngResult r;
  r.p_one = p1;
  r.bits.assign(n, 0);
  for_each_block(n, shards, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, b);
    for (std::size_t i = begin; i < end; ++i)
      r.bits[i] = uniform01(eng) < p1 ? 1 : 0;
  });
  std::size_t ones = 0;
  for (auto bit : r.bits) ones += bit;
  r.ones_frequency = static_cast<double>(ones) / n;
  r.longest_run = longest_run(r.bits);
  return r;
}

struct PredictionResult {
  double success_rate = 0.0;
  double expected_success = 0.0;  ///< sum_k P(A = k, B = k)
  std::size_t trials = 0;
};

/**
 * The holder of B measures {f(E(k))} (or A's own POVM when no remap is
 * given) and announces its outcome index as the guess for A's outcome.
 */
inline PredictionResult prediction_game(const JointStateSpec& spec,
                                        const std::optional<Remap>& remap,
                                        const Povm& povm, std::size_t n,
                                        std::uint64_t seed, unsigned shards = 1) {
  if (povm.size() != 2) {
    std::ostringstream os;
    os << "prediction game needs a two-outcome POVM, got " << povm.size();
    throw UnsupportedOutcomeCount(os.str());
  }
  if (spec.dim_local != 2 || povm.dim() != 2)
    throw InvalidDimension("prediction game is defined for qubits");
  if (n == 0) throw EmptyBatch("prediction game needs n >= 1");
  const DensityMatrix rho = resolve(spec);
  const Povm adversary = remap ? remap->apply(povm) : povm;
  const Eigen::MatrixXd p = joint_probabilities(rho, povm, adversary);
  const auto records = measure_joint(rho, povm, adversary, n, seed, shards);
  std::size_t hits = 0;
  for (const auto& rec : records) hits += rec.outcome_a == rec.outcome_b;
  return PredictionResult{static_cast<double>(hits) / n, p.trace(), n};
}

}  // namespace uniqueness

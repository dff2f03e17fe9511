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

#include "uniqueness/divergence.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "uniqueness/scenarios.hpp"

namespace uniqueness {
namespace {

using testing::random_density;
using testing::random_pure;
using testing::random_remap;
using testing::random_unitary;

DensityMatrix singlet() { return DensityMatrix::pure(states::bell_psi_minus()); }

/// Angle-grid quadrature of  ∮ g(phi) dnu  over qubit states (midpoint rule).
Matrix qubit_grid_integral(const std::function<Matrix(const PureState&)>& g,
                           int rows, int m_theta = 400, int m_phi = 64) {
  const double ht = kHalfPi / m_theta, hp = kTwoPi / m_phi;
  Matrix acc = Matrix::Zero(rows, rows);
  for (int i = 0; i < m_theta; ++i)
    for (int j = 0; j < m_phi; ++j) {
      const HypersphericalCoords xi({(i + 0.5) * ht}, {(j + 0.5) * hp});
      acc += volume_density(xi, 2) * ht * hp * g(coords_to_state(xi));
    }
  return acc;
}

Matrix squared_difference(const Matrix& e, const Matrix& f) {
  const int d = static_cast<int>(e.rows());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix x = Eigen::kroneckerProduct(e, id).eval() - Eigen::kroneckerProduct(id, f).eval();
  return 0.5 * x * x;
}

/// Random n-outcome POVM: G_i = A_i^dagger A_i conjugated by S^{-1/2}.
Povm random_povm(int d, int outcomes, std::mt19937_64& rng) {
  std::vector<Matrix> g;
  Matrix s = Matrix::Zero(d, d);
  for (int i = 0; i < outcomes; ++i) {
    const Matrix a = testing::random_gaussian_matrix(d, rng);
    g.push_back(a.adjoint() * a);
    s += g.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Matrix s_inv_half = es.operatorInverseSqrt();
  std::vector<ComplexOperator> effects;
  for (const auto& gi : g) {
    Matrix e = s_inv_half * gi * s_inv_half;
    effects.emplace_back(0.5 * (e + e.adjoint()));
  }
  return Povm(std::move(effects));
}

// ---------------------------------------------------------------------------
// discrete

TEST(Discrete, TrivialPovmGivesZero) {
  const auto half = 0.5 * ComplexOperator::identity(2);
  const Povm trivial({half, half});
  const auto c = divergence_discrete(trivial, trivial);
  EXPECT_EQ(c.op().max_abs_diff(ComplexOperator::zero(4)), 0.0);
  EXPECT_EQ(c.provenance(), Provenance::discrete);
}

TEST(Discrete, OrthogonalOutcomesCanCoincide) {
  const auto comp = Povm::computational(2);
  const auto c = divergence_discrete(comp, comp);
  EXPECT_NEAR(mean_divergence(DensityMatrix::pure(PureState::basis(4, 0)), c), 0.0, 1e-15);
}

TEST(Discrete, SingletIsMaximallyDifferentInAnyBasis) {
  std::mt19937_64 rng(8);
  EXPECT_NEAR(mean_divergence(singlet(), divergence_discrete(hv_povm(), hv_povm())), 1.0, 1e-12);
  EXPECT_NEAR(mean_divergence(singlet(), divergence_discrete(diagonal_povm(), diagonal_povm())),
              1.0, 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix u = random_unitary(2, rng);
    const auto basis = Povm::from_basis({PureState::normalized(u.col(0)),
                                         PureState::normalized(u.col(1))});
    EXPECT_NEAR(mean_divergence(singlet(), divergence_discrete(basis, basis)), 1.0, 1e-12);
  }
}

TEST(Discrete, PairingErrors) {
  EXPECT_THROW(divergence_discrete(Povm::computational(2), Povm::computational(3)), PairingError);
  const auto third = (1.0 / 3.0) * ComplexOperator::identity(2);
  EXPECT_THROW(divergence_discrete(Povm::computational(2), Povm({third, third, third})),
               PairingError);
}

TEST(Discrete, SpectrumWithinUnitIntervalForRandomPovms) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 3;
    const auto a = random_povm(d, 2 + trial % 4, rng);
    const auto b = random_povm(d, a.size(), rng);
    const auto c = divergence_discrete(a, b);  // constructor enforces [0, 1]
    const RealVector eig = c.op().eigenvalues();
    EXPECT_GE(eig.minCoeff(), -1e-12);
    EXPECT_LE(eig.maxCoeff(), 1.0 + 1e-12);
  }
}

// ---------------------------------------------------------------------------
// closed form

TEST(ClosedForm, Spectrum) {
  for (int d : {2, 3, 4}) {
    const RealVector eig = divergence_isotropic_closed(d).op().eigenvalues();
    const int sym = d * (d + 1) / 2;
    for (int i = 0; i < d * d; ++i) {
      const double expected = i < sym ? (d - 1.0) / (d + 1.0) : 1.0;
      EXPECT_NEAR(eig(i), expected, 1e-12) << "d=" << d << " i=" << i;
    }
  }
  EXPECT_THROW(divergence_isotropic_closed(1), InvalidDimension);
}

TEST(ClosedForm, CommutesWithSwap) {
  for (int d = 2; d <= 6; ++d) {
    const auto c = divergence_isotropic_closed(d).op();
    const auto s = swap_operator(d);
    EXPECT_EQ((c * s).max_abs_diff(s * c), 0.0);
  }
}

TEST(ClosedForm, SymmetricAndAntisymmetricBasisVectors) {
  for (int d = 2; d <= 6; ++d) {
    const auto c = divergence_isotropic_closed(d);
    const double floor = (d - 1.0) / (d + 1.0);
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k) {
        Vector sym = Vector::Zero(d * d), anti = Vector::Zero(d * d);
        sym(j * d + k) += 1.0;
        sym(k * d + j) += 1.0;
        EXPECT_NEAR(mean_divergence(DensityMatrix::pure(PureState::normalized(sym)), c),
                    floor, 1e-12);
        if (j == k) continue;
        anti(j * d + k) = 1.0;
        anti(k * d + j) = -1.0;
        EXPECT_NEAR(mean_divergence(DensityMatrix::pure(PureState::normalized(anti)), c),
                    1.0, 1e-12);
      }
  }
}

// Deterministic quadrature of the isotropic integral at d = 2: no sampling
// and no projector algebra. It must reproduce (1/3) P+ + P-, not the
// transposed P+ + (1/3) P-.
TEST(ClosedForm, MatchesAngleGridQuadrature) {
  const Matrix integral = qubit_grid_integral(
      [](const PureState& phi) {
        const Matrix e = phi.projector().matrix();
        return squared_difference(e, e);
      },
      4);
  const auto closed = divergence_isotropic_closed(2).op();
  EXPECT_LT((integral - closed.matrix()).cwiseAbs().maxCoeff(), 1e-5);
  const Matrix transposed =
      sym_projector(2).matrix() + (1.0 / 3.0) * antisym_projector(2).matrix();
  EXPECT_GT((integral - transposed).cwiseAbs().maxCoeff(), 0.3);
}

// ---------------------------------------------------------------------------
// Monte Carlo

TEST(MonteCarlo, AgreesWithClosedFormAndFixesOrientation) {
  for (Sampler s : {Sampler::angles, Sampler::gaussian}) {
    const auto mc = divergence_isotropic_mc(2, 200000, 7, s);
    EXPECT_EQ(mc.provenance(), Provenance::monte_carlo);
    ASSERT_TRUE(mc.mc_meta().has_value());
    EXPECT_EQ(mc.mc_meta()->samples, 200000u);
    EXPECT_LT(mc.op().max_abs_diff(divergence_isotropic_closed(2).op()), 0.01);
    EXPECT_NEAR(mean_divergence(singlet(), mc), 1.0, 0.01);
    EXPECT_NEAR(mean_divergence(DensityMatrix::pure(PureState::basis(4, 0)), mc), 1.0 / 3.0,
                0.01);
  }
}

TEST(MonteCarlo, DeterministicAcrossRunsAndShards) {
  const auto a = divergence_isotropic_mc(3, 20000, 5, Sampler::angles, 1);
  const auto b = divergence_isotropic_mc(3, 20000, 5, Sampler::angles, 1);
  const auto c = divergence_isotropic_mc(3, 20000, 5, Sampler::angles, 4);
  EXPECT_EQ(a.op().matrix(), b.op().matrix());
  EXPECT_EQ(a.op().matrix(), c.op().matrix());
}

double rms_error(const ComplexOperator& a, const ComplexOperator& b) {
  return std::sqrt((a.matrix() - b.matrix()).cwiseAbs2().mean());
}

TEST(MonteCarlo, DiscretizationErrorDecaysWithSampleCount) {
  const auto closed = divergence_isotropic_closed(2).op();
  double previous = 1e9;
  for (std::size_t k : {1000u, 10000u, 100000u}) {
    const double err = rms_error(divergence_from_batch(sample_haar_gaussian(2, k, 31)).op(), closed);
    EXPECT_LT(err, previous) << k;
    previous = err;
  }
}

// A finite POVM built from K Haar states, (d/K)|phi_k><phi_k| made exactly
// complete by S^{-1/2}. Its discrete divergence carries each effect squared,
// so it is (d/K) times a K-sample estimate of the continuous operator.
TEST(MonteCarlo, RankOnePovmDiscretizationConverges) {
  const int d = 2;
  const auto closed = divergence_isotropic_closed(d).op();
  double previous = 1e9;
  for (std::size_t k : {1000u, 10000u, 100000u}) {
    const auto batch = sample_haar_gaussian(d, k, 32);
    Matrix s = Matrix::Zero(d, d);
    for (const auto& phi : batch.states) s += phi.projector().matrix();
    s *= static_cast<double>(d) / k;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Matrix w = es.operatorInverseSqrt();
    std::vector<ComplexOperator> effects;
    for (const auto& phi : batch.states) {
      Matrix e = (static_cast<double>(d) / k) * w * phi.projector().matrix() * w;
      effects.emplace_back(0.5 * (e + e.adjoint()));
    }
    const Povm povm(std::move(effects));
    const auto discrete = divergence_discrete(povm, povm);
    const double err = rms_error((static_cast<double>(k) / d) * discrete.op(), closed);
    EXPECT_LT(err, previous) << k;
    previous = err;
  }
  EXPECT_LT(previous, 0.01);
}

// ---------------------------------------------------------------------------
// mean divergence

TEST(MeanDivergence, Extremes) {
  std::mt19937_64 rng(12);
  EXPECT_NEAR(mean_divergence(singlet(), divergence_isotropic_closed(2)), 1.0, 1e-12);
  for (int d = 2; d <= 5; ++d) {
    const auto c = divergence_isotropic_closed(d);
    const auto phi = random_pure(d, rng);
    EXPECT_NEAR(mean_divergence(DensityMatrix::pure(tensor(phi, phi)), c), (d - 1.0) / (d + 1.0),
                1e-12);
    EXPECT_NEAR(mean_divergence(DensityMatrix::maximally_mixed(d * d), c), (d - 1.0) / d, 1e-12);
  }
}

TEST(MeanDivergence, BoundsOnRandomStates) {
  std::mt19937_64 rng(13);
  for (int d : {2, 3}) {
    const auto c = divergence_isotropic_closed(d);
    for (int trial = 0; trial < 300; ++trial) {
      const double v = mean_divergence(random_density(d * d, rng), c);
      EXPECT_GE(v, (d - 1.0) / (d + 1.0) - 1e-9);
      EXPECT_LE(v, 1.0 + 1e-9);
    }
  }
}

TEST(MeanDivergence, BrokenClosedFormIsReported) {
  const DivergenceOperator broken(2, ComplexOperator::zero(4), Provenance::closed_form);
  EXPECT_THROW(mean_divergence(singlet(), broken), InternalConsistency);
  EXPECT_THROW(mean_divergence(DensityMatrix::maximally_mixed(9), divergence_isotropic_closed(2)),
               DimensionMismatch);
}

TEST(DivergenceOperator, Invariants) {
  EXPECT_THROW(DivergenceOperator(2, 2.0 * ComplexOperator::identity(4), Provenance::closed_form),
               InternalConsistency);
  EXPECT_NO_THROW(
      DivergenceOperator(2, 2.0 * ComplexOperator::identity(4), Provenance::monte_carlo));
  Matrix m = Matrix::Zero(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(DivergenceOperator(2, ComplexOperator(m), Provenance::monte_carlo),
               NumericalInconsistency);
  EXPECT_THROW(DivergenceOperator(2, ComplexOperator::identity(3), Provenance::discrete),
               DimensionMismatch);
}

// ---------------------------------------------------------------------------
// remaps

TEST(Remap, SingletMatchedRemapIsInversion) {
  std::mt19937_64 rng(14);
  const auto matched = correlation_remap(states::bell_psi_minus());
  const auto inv = Remap::inversion();
  EXPECT_EQ(matched.kind(), Remap::Kind::antiunitary);
  for (int trial = 0; trial < 100; ++trial) {
    const auto phi = random_pure(2, rng);
    const auto f = matched(phi);
    EXPECT_LE((f.amplitudes() - inv(phi).amplitudes()).norm(), 1e-12);
    Vector expected(2);
    expected << std::conj(phi[1]), -std::conj(phi[0]);
    EXPECT_LE((f.amplitudes() - PureState::normalized(expected).amplitudes()).norm(), 1e-12);
    EXPECT_NEAR(f.fidelity(phi), 0.0, 1e-12);
    EXPECT_LE((matched(f).amplitudes() - phi.amplitudes()).norm(), 1e-12);
  }
}

TEST(Remap, PhiPlusMatchedRemapIsConjugation) {
  const auto r = correlation_remap(states::bell_phi_plus());
  EXPECT_LE(r.kernel().max_abs_diff(ComplexOperator::identity(2)), 1e-15);
  EXPECT_EQ(r.kind(), Remap::Kind::antiunitary);
}

// For a generic maximally entangled state (1 ⊗ U) sum|jj>/sqrt d the matched
// remap reaches joint probability 1/d at every phi.
TEST(Remap, MatchedRemapAttainsInverseDimension) {
  std::mt19937_64 rng(15);
  for (int d = 2; d <= 4; ++d)
    for (int trial = 0; trial < 10; ++trial) {
      const auto psi = states::max_entangled(ComplexOperator(random_unitary(d, rng)));
      const auto rho = DensityMatrix::pure(psi);
      const auto r = correlation_remap(psi);
      for (int k = 0; k < 20; ++k) {
        const auto phi = random_pure(d, rng);
        const auto p = joint_vs_product(rho, phi, r);
        EXPECT_NEAR(p.joint, 1.0 / d, 1e-12);
      }
    }
}

TEST(Remap, RejectsNonMaximallyEntangled) {
  EXPECT_THROW(correlation_remap(PureState::basis(4, 0)), NotMaximallyEntangled);
  Vector v(4);
  v << 0.9, 0.0, 0.0, std::sqrt(1 - 0.81);
  EXPECT_THROW(correlation_remap(PureState(v)), NotMaximallyEntangled);
  EXPECT_THROW(correlation_remap(PureState::basis(3, 0)), InvalidDimension);
}

TEST(Remap, KernelMustBeProportionalToUnitary) {
  Matrix k(2, 2);
  k << 1.0, 0.0, 0.0, 2.0;
  EXPECT_THROW(Remap(ComplexOperator(k), Remap::Kind::unitary), InvalidValue);
  EXPECT_NO_THROW(Remap(3.0 * ComplexOperator::identity(2), Remap::Kind::unitary));
}

TEST(Remap, PreservesHaarFirstMoment) {
  std::mt19937_64 rng(16);
  for (int d : {2, 3}) {
    const auto r = random_remap(d, rng);
    const auto batch = sample_haar_angles(d, 100000, 17);
    Matrix first = Matrix::Zero(d, d);
    for (const auto& phi : batch.states) first += r(phi).projector().matrix();
    first /= static_cast<double>(batch.states.size());
    EXPECT_LT((first - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff(), 0.01);
  }
}

TEST(Remap, EffectImageMatchesStateImage) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = random_remap(3, rng);
    const auto phi = random_pure(3, rng);
    EXPECT_LE(r.apply(phi.projector()).max_abs_diff(r(phi).projector()), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// remapped divergence

TEST(Remapped, SingletWithInversionVanishes) {
  const auto est = divergence_remapped_estimate(singlet(), Remap::inversion(), 100000, 3);
  EXPECT_LT(std::abs(est.value), 0.01);
  EXPECT_LT(std::abs(divergence_remapped_mc(singlet(), correlation_remap(states::bell_psi_minus()),
                                            100000, 3)),
            0.01);
}

TEST(Remapped, IdentityRemapReducesToIsotropic) {
  const double v = divergence_remapped_mc(singlet(), Remap::identity(2), 100000, 4);
  EXPECT_NEAR(v, 1.0, 0.01);
  EXPECT_LE(remapped_divergence_operator(Remap::identity(3))
                .max_abs_diff(divergence_isotropic_closed(3).op()),
            1e-12);
}

TEST(Remapped, ClosedOperatorMatchesAngleGrid) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 4; ++trial) {
    const auto r = random_remap(2, rng);
    const Matrix integral = qubit_grid_integral(
        [&](const PureState& phi) {
          return squared_difference(phi.projector().matrix(), r(phi).projector().matrix());
        },
        4);
    EXPECT_LT((integral - remapped_divergence_operator(r).matrix()).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Remapped, ProductStatesStayAboveFloor) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 5; ++trial) {
    const auto r = random_remap(2, rng);
    const auto rho = DensityMatrix(tensor(random_density(2, rng).op(), random_density(2, rng).op()));
    // Exact value by angle-grid integration of the remapped integrand.
    const Matrix integral = qubit_grid_integral(
        [&](const PureState& phi) {
          return squared_difference(phi.projector().matrix(), r(phi).projector().matrix());
        },
        4);
    const double exact = (rho.matrix().transpose().cwiseProduct(integral)).sum().real();
    EXPECT_GE(exact, 1.0 / 3.0 - 1e-6);
    const auto est = divergence_remapped_estimate(rho, r, 50000, 21 + trial);
    EXPECT_GE(est.value, 1.0 / 3.0 - 3 * est.std_error - 1e-12);
    EXPECT_NEAR(est.value, exact, 4 * est.std_error + 1e-12);
  }
}

TEST(Remapped, MatchedRemapZeroForGenericMaximallyEntangled) {
  std::mt19937_64 rng(22);
  for (int d : {2, 3}) {
    const auto psi = states::max_entangled(ComplexOperator(random_unitary(d, rng)));
    const auto r = correlation_remap(psi);
    const auto rho = DensityMatrix::pure(psi);
    EXPECT_NEAR(expectation(rho, remapped_divergence_operator(r)), 0.0, 1e-12);
    EXPECT_NEAR(divergence_remapped_mc(rho, r, 20000, 23), 0.0, 1e-10);
  }
}

TEST(Remapped, DimensionMismatch) {
  EXPECT_THROW(divergence_remapped_mc(singlet(), Remap::identity(3), 10, 1), DimensionMismatch);
}

}  // namespace
}  // namespace uniqueness

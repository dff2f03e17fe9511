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

#include "uniqueness/hilbert.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "uniqueness/divergence.hpp"
#include "uniqueness/scenarios.hpp"

namespace uniqueness {
namespace {

using testing::random_density;
using testing::random_hermitian;

TEST(Tensor, IdentityTimesIdentity) {
  const auto i4 = tensor(ComplexOperator::identity(2), ComplexOperator::identity(2));
  EXPECT_EQ(i4.dim(), 4);
  EXPECT_EQ(i4.max_abs_diff(ComplexOperator::identity(4)), 0.0);
}

TEST(Tensor, LeftFactorMajorIndex) {
  const auto p0 = PureState::basis(2, 0).projector();
  const auto p1 = PureState::basis(2, 1).projector();
  const auto t = tensor(p0, p1);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      EXPECT_EQ(t(r, c), Complex(r == 1 && c == 1 ? 1.0 : 0.0)) << r << "," << c;
}

TEST(Tensor, Dimensions) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(tensor(random_hermitian(2, rng), random_hermitian(3, rng)).dim(), 6);
}

TEST(Tensor, Associative) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_hermitian(2, rng);
    const auto b = random_hermitian(3, rng);
    const auto c = random_hermitian(2, rng);
    EXPECT_LE(tensor(tensor(a, b), c).max_abs_diff(tensor(a, tensor(b, c))), 1e-13);
  }
}

TEST(Swap, QubitPermutation) {
  const auto s = swap_operator(2);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 1.0;
  expected(1, 2) = expected(2, 1) = 1.0;
  EXPECT_EQ((s.matrix() - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Swap, ExchangesFactors) {
  const int d = 3;
  const auto s = swap_operator(d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      const Vector in = tensor(PureState::basis(d, j), PureState::basis(d, k)).amplitudes();
      const Vector out = tensor(PureState::basis(d, k), PureState::basis(d, j)).amplitudes();
      EXPECT_LE((s.matrix() * in - out).norm(), 1e-15);
    }
}

TEST(Swap, InvolutionTraceHermitian) {
  for (int d = 2; d <= 6; ++d) {
    const auto s = swap_operator(d);
    EXPECT_EQ((s * s).max_abs_diff(ComplexOperator::identity(d * d)), 0.0);
    EXPECT_DOUBLE_EQ(s.trace().real(), d);
    EXPECT_TRUE(s.is_hermitian());
  }
}

TEST(Swap, RejectsSmallDimension) {
  EXPECT_THROW(swap_operator(1), InvalidDimension);
  EXPECT_THROW(sym_projector(0), InvalidDimension);
  EXPECT_THROW(antisym_projector(1), InvalidDimension);
}

TEST(Projectors, TracesAndCompleteness) {
  EXPECT_DOUBLE_EQ(sym_projector(2).trace().real(), 3.0);
  EXPECT_DOUBLE_EQ(antisym_projector(2).trace().real(), 1.0);
  EXPECT_DOUBLE_EQ(antisym_projector(3).trace().real(), 3.0);
  for (int d = 2; d <= 6; ++d) {
    const auto pp = sym_projector(d);
    const auto pm = antisym_projector(d);
    EXPECT_LE((pp + pm).max_abs_diff(ComplexOperator::identity(d * d)), 1e-14);
    EXPECT_LE((pp * pp).max_abs_diff(pp), 1e-12);
    EXPECT_LE((pm * pm).max_abs_diff(pm), 1e-12);
    EXPECT_LE((pp * pm).max_abs_diff(ComplexOperator::zero(d * d)), 1e-14);
    EXPECT_DOUBLE_EQ(pp.trace().real(), d * (d + 1) / 2.0);
    EXPECT_DOUBLE_EQ(pm.trace().real(), d * (d - 1) / 2.0);
  }
}

TEST(Expectation, IdentityGivesOne) {
  std::mt19937_64 rng(3);
  for (int d : {2, 4, 9}) {
    const auto rho = random_density(d, rng);
    EXPECT_NEAR(expectation(rho, ComplexOperator::identity(d)), 1.0, 1e-12);
  }
}

TEST(Expectation, SingletOnClosedForm) {
  const auto singlet = DensityMatrix::pure(states::bell_psi_minus());
  EXPECT_NEAR(expectation(singlet, divergence_isotropic_closed(2).op()), 1.0, 1e-12);
}

TEST(Expectation, SymmetricStateHasNoAntisymmetricWeight) {
  const auto zz = DensityMatrix::pure(PureState::basis(4, 0));
  EXPECT_EQ(expectation(zz, antisym_projector(2)), 0.0);
}

TEST(Expectation, LinearInOperator) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 4;
    const auto rho = random_density(d, rng);
    const auto a = random_hermitian(d, rng);
    const auto b = random_hermitian(d, rng);
    const double x = coef(rng), y = coef(rng);
    EXPECT_NEAR(expectation(rho, x * a + y * b),
                x * expectation(rho, a) + y * expectation(rho, b), 1e-12);
  }
}

TEST(Expectation, Errors) {
  const auto rho = DensityMatrix::maximally_mixed(2);
  EXPECT_THROW(expectation(rho, ComplexOperator::identity(3)), DimensionMismatch);
  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = Complex(0.0, 1.0);
  skew(1, 0) = Complex(0.0, 1.0);  // anti-Hermitian: Tr[rho skew] may be imaginary
  const auto pure = DensityMatrix::pure(PureState::normalized(Vector::Ones(2)));
  EXPECT_THROW(expectation(pure, ComplexOperator(skew)), NumericalInconsistency);
}

TEST(PureState, CanonicalPhase) {
  Vector v(3);
  v << Complex(0.0, 0.0), Complex(0.0, -0.6), Complex(0.8, 0.0);
  const PureState s(v);
  EXPECT_EQ(s[0], Complex(0.0));
  EXPECT_DOUBLE_EQ(s[1].real(), 0.6);
  EXPECT_EQ(s[1].imag(), 0.0);
  EXPECT_NEAR(std::abs(s[2] - Complex(0.0, 0.8)), 0.0, 1e-15);
}

TEST(PureState, RejectsUnnormalized) {
  EXPECT_THROW(PureState(Vector::Ones(2)), InvalidValue);
  EXPECT_THROW(PureState::normalized(Vector::Zero(2)), InvalidValue);
}

TEST(DensityMatrix, Invariants) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{ComplexOperator(m)}, InvalidValue);  // trace 2
  m << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityMatrix{ComplexOperator(m)}, InvalidValue);  // negative
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix{ComplexOperator(m)}, InvalidValue);  // not Hermitian
}

TEST(DensityMatrix, MixturesOfHaarStatesAreValid) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = random_density(4, rng, 6);
    EXPECT_EQ(rho.dim(), 4);
  }
}

TEST(Povm, CompletenessEnforced) {
  EXPECT_NO_THROW(Povm::computational(3));
  const auto half = 0.5 * ComplexOperator::identity(2);
  EXPECT_NO_THROW(Povm({half, half}));
  EXPECT_THROW(Povm({half}), InvalidValue);
  Matrix neg(2, 2);
  neg << 1.5, 0.0, 0.0, 1.0;
  Matrix comp(2, 2);
  comp << -0.5, 0.0, 0.0, 0.0;
  EXPECT_THROW(Povm({ComplexOperator(neg), ComplexOperator(comp)}), InvalidValue);
}

}  // namespace
}  // namespace uniqueness

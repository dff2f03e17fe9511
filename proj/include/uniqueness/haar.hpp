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
 * Hyperspherical coordinates of pure states, the unitarily invariant volume
 * element on them, and two independent samplers of that measure.
 *
 * The volume element integrates to D over the whole state space, so the
 * probability measure used for sampling is (volume element) / D.
 *
 * With theta_1 the outermost polar angle (component 0 is cos theta_1), the
 * Jacobian of the parametrization carries sin^{2(D-k)-1} on theta_k. The
 * exponent set {1, 3, ..., 2D-3} and hence the normalization are the same
 * as for the reversed pairing sin^{2k-1} theta_k, which coincides with it
 * only for D = 2; for D >= 3 the reversed pairing is not unitarily
 * invariant (its first moment is off from I/D by O(0.1)).
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string_view>
#include <vector>

#include "uniqueness/error.hpp"
#include "uniqueness/hilbert.hpp"
#include "uniqueness/streams.hpp"

namespace uniqueness {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Polar angles theta_1..theta_{D-1} in [0, pi/2) and azimuths
/// phi_1..phi_{D-1} in [0, 2 pi).
class HypersphericalCoords {
 public:
  HypersphericalCoords(std::vector<double> thetas, std::vector<double> phis)
      : thetas_(std::move(thetas)), phis_(std::move(phis)) {
    if (thetas_.empty() || thetas_.size() != phis_.size())
      throw InvalidValue(
          "hyperspherical coordinates need D-1 >= 1 polar and azimuthal angles");
    for (double t : thetas_)
      if (!(t >= 0.0 && t < kHalfPi)) {
        std::ostringstream os;
        os << "polar angle " << t << " outside [0, pi/2)";
        throw InvalidValue(os.str());
      }
    for (double p : phis_)
      if (!(p >= 0.0 && p < kTwoPi)) {
        std::ostringstream os;
        os << "azimuthal angle " << p << " outside [0, 2pi)";
        throw InvalidValue(os.str());
      }
  }

  int dim() const { return static_cast<int>(thetas_.size()) + 1; }
  const std::vector<double>& thetas() const { return thetas_; }
  const std::vector<double>& phis() const { return phis_; }

 private:
  std::vector<double> thetas_;
  std::vector<double> phis_;
};

/**
 * Component 0 is cos theta_1; component k (1 <= k <= D-2) is
 * e^{i phi_k} sin theta_1 ... sin theta_k cos theta_{k+1}; the last
 * component is e^{i phi_{D-1}} sin theta_1 ... sin theta_{D-1}.
 */
inline PureState coords_to_state(const HypersphericalCoords& xi) {
  const int d = xi.dim();
  const auto& th = xi.thetas();
  const auto& ph = xi.phis();
  Vector v(d);
  v(0) = std::cos(th[0]);
  double sin_prod = 1.0;
  for (int k = 1; k < d; ++k) {
    sin_prod *= std::sin(th[k - 1]);
    const double radial = (k < d - 1) ? sin_prod * std::cos(th[k]) : sin_prod;
    v(k) = std::polar(radial, ph[k - 1]);
  }
  // Rounding leaves the norm within a few ulps of 1.
  return PureState::normalized(v);
}

namespace detail {
inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Power of sin theta_k in the volume element.
constexpr int sin_exponent(int k, int d) { return 2 * (d - k) - 1; }

/// Volume density as a function of the polar angles only.
inline double volume_density_thetas(std::span<const double> thetas, int d) {
  double value = factorial(d) / std::pow(std::numbers::pi, d - 1);
  for (int k = 1; k < d; ++k) {
    const double t = thetas[k - 1];
    value *= std::cos(t) * std::pow(std::sin(t), sin_exponent(k, d));
  }
  return value;
}
}  // namespace detail

/// (d!/pi^{d-1}) prod_k cos theta_k sin^{2(d-k)-1} theta_k.
inline double volume_density(const HypersphericalCoords& xi, int d) {
  if (xi.dim() != d) {
    std::ostringstream os;
    os << "coordinates describe dimension " << xi.dim() << ", not " << d;
    throw DimensionMismatch(os.str());
  }
  return detail::volume_density_thetas(xi.thetas(), d);
}

/**
 * Integral of volume_density over the full angle domain by the composite
 * trapezoidal rule on a tensor grid of `points` nodes per polar angle. The
 * density does not depend on the azimuths, whose integral is (2 pi)^{d-1}.
 * Should return d.
 */
inline double volume_integral(int d, int points) {
  detail::require_joint_dim(d);
  if (points < 2) throw InvalidValue("quadrature needs at least 2 nodes");
  const int axes = d - 1;
  const double h = kHalfPi / (points - 1);
  std::vector<int> idx(axes, 0);
  std::vector<double> thetas(axes, 0.0);
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    for (int a = 0; a < axes; ++a) {
      thetas[a] = idx[a] * h;
      if (idx[a] == 0 || idx[a] == points - 1) weight *= 0.5;
    }
    sum += weight * detail::volume_density_thetas(thetas, d);
    int a = 0;
    while (a < axes && ++idx[a] == points) idx[a++] = 0;
    if (a == axes) break;
  }
  return sum * std::pow(h, axes) * std::pow(kTwoPi, axes);
}

enum class Sampler { angles, gaussian };

inline std::string_view to_string(Sampler s) {
  return s == Sampler::angles ? "angles" : "gaussian";
}

struct SampleBatch {
  int dim = 0;
  std::vector<PureState> states;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::angles;
  unsigned shards = 1;
  /// Source coordinates, present for the angles sampler only.
  std::optional<std::vector<HypersphericalCoords>> coords;
};

/**
 * Draws one point of the probability measure (volume element)/D. The polar
 * angles factorize; theta_k has density ∝ cos t sin^{2m-1} t with
 * m = d - k, CDF sin^{2m} t, so theta_k = asin(u^{1/(2m)}).
 */
inline HypersphericalCoords draw_haar_coords(int d, Engine& eng) {
  std::vector<double> thetas(d - 1), phis(d - 1);
  for (int k = 1; k < d; ++k) {
    const double m = d - k;
    double t;
    do {
      t = std::asin(std::pow(uniform01(eng), 1.0 / (2.0 * m)));
    } while (!(t < kHalfPi));
    thetas[k - 1] = t;
  }
  for (int k = 1; k < d; ++k) {
    double p;
    do {
      p = kTwoPi * uniform01(eng);
    } while (!(p < kTwoPi));
    phis[k - 1] = p;
  }
  return HypersphericalCoords(std::move(thetas), std::move(phis));
}

/// Normalized vector of i.i.d. standard complex Gaussian entries.
inline PureState draw_haar_gaussian(int d, Engine& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (int k = 0; k < d; ++k) {
    const double re = normal(eng);
    const double im = normal(eng);
    v(k) = Complex(re, im);
  }
  return PureState::normalized(v);
}

namespace detail {
inline void require_sampling_args(int d, std::size_t n) {
  require_joint_dim(d);
  if (n == 0) throw EmptyBatch("sample count must be >= 1");
}

inline std::vector<PureState> placeholder_states(int d, std::size_t n) {
  return std::vector<PureState>(n, PureState::basis(d, 0));
}
}  // namespace detail

inline SampleBatch sample_haar_angles(int d, std::size_t n, std::uint64_t seed,
                                      unsigned shards = 1) {
  detail::require_sampling_args(d, n);
  std::vector<HypersphericalCoords> coords(
      n, HypersphericalCoords(std::vector<double>(d - 1, 0.0),
                              std::vector<double>(d - 1, 0.0)));
  auto states = detail::placeholder_states(d, n);
  for_each_block(n, shards, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, b);
    for (std::size_t i = begin; i < end; ++i) {
      coords[i] = draw_haar_coords(d, eng);
      states[i] = coords_to_state(coords[i]);
    }
  });
  return SampleBatch{d, std::move(states), seed, Sampler::angles, shards,
                     std::move(coords)};
}

inline SampleBatch sample_haar_gaussian(int d, std::size_t n, std::uint64_t seed,
                                        unsigned shards = 1) {
  detail::require_sampling_args(d, n);
  auto states = detail::placeholder_states(d, n);
  for_each_block(n, shards, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, b);
    for (std::size_t i = begin; i < end; ++i)
      states[i] = draw_haar_gaussian(d, eng);
  });
  return SampleBatch{d, std::move(states), seed, Sampler::gaussian, shards,
                     std::nullopt};
}

inline SampleBatch sample_haar(Sampler sampler, int d, std::size_t n,
                               std::uint64_t seed, unsigned shards = 1) {
  return sampler == Sampler::angles ? sample_haar_angles(d, n, seed, shards)
                                    : sample_haar_gaussian(d, n, seed, shards);
}

struct Moments {
  ComplexOperator first;   ///< mean of |phi><phi|
  ComplexOperator second;  ///< mean of |phi><phi| ⊗ |phi><phi|
};

inline Moments moment_check(const SampleBatch& batch) {
  if (batch.states.empty()) throw EmptyBatch("moment_check on empty batch");
  const int d = batch.dim;
  Matrix first = Matrix::Zero(d, d);
  Matrix second = Matrix::Zero(d * d, d * d);
  for (const auto& s : batch.states) {
    const Vector& a = s.amplitudes();
    const Matrix p = a * a.adjoint();
    const Vector aa = Eigen::kroneckerProduct(a, a).eval();
    first += p;
    second.noalias() += aa * aa.adjoint();
  }
  const double n = static_cast<double>(batch.states.size());
  return Moments{ComplexOperator(first / n), ComplexOperator(second / n)};
}

}  // namespace uniqueness

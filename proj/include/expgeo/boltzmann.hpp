#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The expgeo Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

// Space-homogeneous Boltzmann collision operator on R^3 for densities in the
// maximal exponential model of the standard normal f0:
//
//   f = exp(u - K0(u)) f0,   u(v) = a.v + v'Bv + sum_k c_k tanh(d_k.v)
//
// with angular kernel B(z, x) = |x'z|. Only weak functionals of Q(f) are
// estimated, by Monte Carlo over (V, W) ~ f (x) f and X uniform on S^2:
//
//   <g, Q(f)/f>_f = E[ 1/2 (g(V_X) + g(W_X) - g(V) - g(W)) |X'(V - W)| ].

#include "expgeo/errors.hpp"
#include "expgeo/parallel.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace expgeo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// ---------------------------------------------------------------------------
// Collision geometry

/// Unit vector x in S^2 selecting the exchanged velocity component.
class CollisionFrame
{
public:
  explicit CollisionFrame(const Vec3& x, double tol = 1e-12) : x_(x)
  {
    if (!x.allFinite() || std::abs(x.norm() - 1.0) > tol)
      throw DomainError("collision frame must be a unit vector");
  }

  static CollisionFrame from_direction(const Vec3& d)
  {
    const double n = d.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw DomainError("collision direction must be nonzero and finite");
    return CollisionFrame(d / n);
  }

  const Vec3& direction() const { return x_; }
  CollisionFrame flipped() const { return CollisionFrame(-x_); }

private:
  Vec3 x_;
};

struct VelocityPair
{
  Vec3 v;
  Vec3 w;
};

/// Elastic collision: v_x = v - x x'(v - w), w_x = w + x x'(v - w).
inline VelocityPair collide(const Vec3& v, const Vec3& w, const CollisionFrame& frame)
{
  const Vec3& x = frame.direction();
  const Vec3 exchange = x * x.dot(v - w);
  return {v - exchange, w + exchange};
}

/// The 6x6 matrix A_x = [[I - xx', xx'], [xx', I - xx']] acting on (v, w).
inline Mat6 collision_matrix(const CollisionFrame& frame)
{
  const Vec3& x = frame.direction();
  const Mat3 proj = x * x.transpose();
  const Mat3 rest = Mat3::Identity() - proj;
  Mat6 a;
  a << rest, proj, proj, rest;
  return a;
}

/// Uniform direction on S^2 from a normalized Gaussian draw.
template <class Rng>
Vec3 uniform_on_sphere(Rng& rng)
{
  std::normal_distribution<double> normal;
  for (;;) {
    const Vec3 z(normal(rng), normal(rng), normal(rng));
    const double n = z.norm();
    if (n > 1e-12)
      return z / n;
  }
}

// ---------------------------------------------------------------------------
// Sphere quadrature

/// Weighted node set on S^2 approximating the uniform probability sigma.
class SphereQuadrature
{
public:
  SphereQuadrature(std::vector<Vec3> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights))
  {
    if (nodes_.empty() || nodes_.size() != weights_.size())
      throw DomainError("sphere quadrature needs matching nonempty nodes and weights");
  }

  /// Gauss-Legendre in cos(theta) times the uniform rule in phi. Exact for
  /// polynomials in x of degree < min(2 n_polar, n_azimuth).
  static SphereQuadrature gauss_product(int n_polar, int n_azimuth)
  {
    if (n_polar < 1 || n_azimuth < 1)
      throw DomainError("gauss_product needs positive node counts");
    const auto [z, wz] = gauss_legendre(n_polar);
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    for (int i = 0; i < n_polar; ++i) {
      const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
      for (int j = 0; j < n_azimuth; ++j) {
        const double phi = 2.0 * std::numbers::pi * (j + 0.5) / n_azimuth;
        nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), z[i]);
        // wz sums to 2 on [-1, 1]
        weights.push_back(0.5 * wz[i] / n_azimuth);
      }
    }
    return SphereQuadrature(std::move(nodes), std::move(weights));
  }

  /// n i.i.d. uniform directions with equal weights.
  static SphereQuadrature monte_carlo(std::size_t n, std::uint64_t seed)
  {
    if (n == 0)
      throw DomainError("monte_carlo quadrature needs at least one node");
    std::mt19937_64 rng(substream_seed(seed, 0));
    std::vector<Vec3> nodes;
    nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      nodes.push_back(uniform_on_sphere(rng));
    return SphereQuadrature(std::move(nodes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  /// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
  static std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
  {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) {
          p1 = z;
          p0 = 1.0;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16)
          break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
  }

private:
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
};

/// Integral of g(v_x, w_x) over x ~ sigma, uniform on the sphere. The
/// post-collision pairs sweep the sphere of radius |v - w|/2 around (v + w)/2,
/// but under uniform x their law still depends on the direction of v - w;
/// only the |x'(v - w)|-weighted average is a function of the invariants.
template <class PairFn>
double sphere_average(PairFn&& g, const Vec3& v, const Vec3& w, const SphereQuadrature& quad)
{
  double s = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const VelocityPair c = collide(v, w, CollisionFrame(quad.nodes()[k], 1e-9));
    s += quad.weights()[k] * g(c.v, c.w);
  }
  return s;
}

/// Default node set for conditioning: exact for pair polynomials of degree <= 7.
inline const SphereQuadrature& default_sphere_quadrature()
{
  static const SphereQuadrature quad = SphereQuadrature::gauss_product(8, 16);
  return quad;
}

/// Estimates E[(avg_x g(A_x(V,W)) - g(V,W)) h1(V+W) h2(|V|^2+|W|^2)] for
/// (V, W) ~ f0 (x) f0. Every A_x preserves both the law of (V, W) and the
/// invariants, so the expectation is 0 and the estimate is consistent with 0.
template <class PairFn, class H1, class H2>
MCEstimate conditioning_orthogonality_test(PairFn&& g, H1&& h1, H2&& h2, std::size_t n,
                                           std::uint64_t seed,
                                           const SphereQuadrature& quad = default_sphere_quadrature(),
                                           const MonteCarloOptions& opts = {})
{
  if (n == 0)
    throw DomainError("conditioning test needs n >= 1");
  const WeightedSums sums = run_blocks<WeightedSums>(
      n, seed, opts, [&](std::size_t, std::size_t begin, std::size_t end, std::mt19937_64& rng) {
        std::normal_distribution<double> normal;
        WeightedSums acc;
        for (std::size_t i = begin; i < end; ++i) {
          const Vec3 v(normal(rng), normal(rng), normal(rng));
          const Vec3 w(normal(rng), normal(rng), normal(rng));
          // sum_k w_k (g(A_k(v,w)) - g(v,w)); differencing first keeps the
          // rounding of the weight sum out of the estimate
          const double g0 = g(v, w);
          const double centered = sphere_average(
              [&](const Vec3& a, const Vec3& b) { return g(a, b) - g0; }, v, w, quad);
          const double y = centered * h1(Vec3(v + w)) * h2(v.squaredNorm() + w.squaredNorm());
          acc.add(1.0, y);
        }
        return acc;
      });
  return sums.estimate();
}

// ---------------------------------------------------------------------------
// Gibbs perturbations of the Maxwellian

/// Margin kept between the largest eigenvalue of B and 1/2.
inline constexpr double kSpectralMargin = 1e-6;

struct BoundedTerm
{
  double amplitude = 0.0;
  Vec3 direction = Vec3::Zero();
};

/// u(v) = a.v + v'Bv + sum_k c_k tanh(d_k.v). The spectral bound
/// lambda_max(B) < 1/2 makes exp(u) f0 integrable.
class GibbsSpec
{
public:
  GibbsSpec() : linear_(Vec3::Zero()), quadratic_(Mat3::Zero()) {}

  GibbsSpec(const Vec3& linear, const Mat3& quadratic, std::vector<BoundedTerm> bounded = {})
    : linear_(linear), quadratic_(quadratic), bounded_(std::move(bounded))
  {
    if (!linear_.allFinite() || !quadratic_.allFinite())
      throw DomainError("gibbs spec has non-finite coefficients");
    const double asym = (quadratic_ - quadratic_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, quadratic_.cwiseAbs().maxCoeff()))
      throw DomainError("gibbs spec: quadratic matrix must be symmetric");
    quadratic_ = 0.5 * (quadratic_ + quadratic_.transpose()).eval();
    for (const BoundedTerm& t : bounded_) {
      if (!std::isfinite(t.amplitude) || !t.direction.allFinite())
        throw DomainError("gibbs spec has a non-finite bounded term");
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(quadratic_, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    if (!(top < 0.5 - kSpectralMargin))
      throw DomainError("gibbs spec violates the spectral bound: max eigenvalue " +
                        std::to_string(top) + " is not below 1/2");
    precision_ = Mat3::Identity() - 2.0 * quadratic_;
    covariance_ = precision_.inverse();
    mean_ = covariance_ * linear_;
    chol_ = Eigen::LLT<Mat3>(covariance_).matrixL();
  }

  const Vec3& linear() const { return linear_; }
  const Mat3& quadratic() const { return quadratic_; }
  const std::vector<BoundedTerm>& bounded() const { return bounded_; }

  bool is_gaussian() const { return bounded_.empty(); }

  /// Mean and covariance of the Gaussian part exp(a.v + v'Bv) f0.
  const Vec3& gaussian_mean() const { return mean_; }
  const Mat3& gaussian_covariance() const { return covariance_; }
  const Mat3& gaussian_cholesky() const { return chol_; }

  double bounded_part(const Vec3& v) const
  {
    double s = 0.0;
    for (const BoundedTerm& t : bounded_)
      s += t.amplitude * std::tanh(t.direction.dot(v));
    return s;
  }

  double perturbation(const Vec3& v) const
  {
    return linear_.dot(v) + v.dot(quadratic_ * v) + bounded_part(v);
  }

  /// log of the Gaussian normalizer, log E_f0[exp(a.v + v'Bv)].
  double gaussian_log_normalizer() const
  {
    return 0.5 * linear_.dot(covariance_ * linear_) - 0.5 * std::log(precision_.determinant());
  }

  template <class Rng>
  Vec3 draw_gaussian(Rng& rng) const
  {
    std::normal_distribution<double> normal;
    const Vec3 z(normal(rng), normal(rng), normal(rng));
    return mean_ + chol_ * z;
  }

private:
  Vec3 linear_;
  Mat3 quadratic_;
  std::vector<BoundedTerm> bounded_;
  Mat3 precision_ = Mat3::Identity();
  Mat3 covariance_ = Mat3::Identity();
  Mat3 chol_ = Mat3::Identity();
  Vec3 mean_ = Vec3::Zero();
};

inline constexpr std::size_t kNormalizerSamples = std::size_t{1} << 18;

/// K0(u) = log E_f0[e^u]. Closed form without bounded terms (standard error 0,
/// n = 0); otherwise the Gaussian part in closed form times an importance
/// sampling estimate of E[exp(sum c tanh)] under the Gaussian part.
inline MCEstimate gibbs_normalizer(const GibbsSpec& spec, std::size_t n = kNormalizerSamples,
                                   std::uint64_t seed = 0, const MonteCarloOptions& opts = {})
{
  MCEstimate out;
  const double gaussian = spec.gaussian_log_normalizer();
  if (spec.is_gaussian()) {
    out.mean = gaussian;
    return out;
  }
  if (n == 0)
    throw DomainError("gibbs_normalizer needs n >= 1 for bounded terms");
  const WeightedSums sums = run_blocks<WeightedSums>(
      n, seed, opts, [&](std::size_t, std::size_t begin, std::size_t end, std::mt19937_64& rng) {
        WeightedSums acc;
        for (std::size_t i = begin; i < end; ++i)
          acc.add(1.0, std::exp(spec.bounded_part(spec.draw_gaussian(rng))));
        return acc;
      });
  const MCEstimate ratio = sums.estimate();
  out.mean = gaussian + std::log(ratio.mean);
  out.standard_error = ratio.standard_error / ratio.mean;
  out.n = ratio.n;
  return out;
}

/// Draws from f = exp(u - K0) f0: exact Gaussian draws for the quadratic part,
/// importance weights exp(sum c tanh(d.v)) rescaled to mean 1.
struct VelocitySample
{
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  GibbsSpec target;

  std::size_t size() const { return points.size(); }

  /// Self-normalized weighted mean of a scalar function.
  template <class Fn>
  double weighted_mean(Fn&& fn) const
  {
    double s = 0.0;
    double sw = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      s += weights[i] * fn(points[i]);
      sw += weights[i];
    }
    return s / sw;
  }
};

inline VelocitySample sample_velocities(const GibbsSpec& spec, std::size_t n, std::uint64_t seed)
{
  if (n == 0)
    throw DomainError("sample_velocities needs n >= 1");
  VelocitySample out;
  out.seed = seed;
  out.target = spec;
  out.points.reserve(n);
  out.weights.reserve(n);
  std::mt19937_64 rng(substream_seed(seed, 0));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 v = spec.draw_gaussian(rng);
    const double w = spec.is_gaussian() ? 1.0 : std::exp(spec.bounded_part(v));
    out.points.push_back(v);
    out.weights.push_back(w);
    total += w;
  }
  const double scale = static_cast<double>(n) / total;
  for (double& w : out.weights)
    w *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// Test functions and the weak form

/// Observable g : R^3 -> R together with its collision difference
///   delta(v, w, x) = g(v_x) + g(w_x) - g(v) - g(w).
///
/// Components spanned by the collision invariants 1, v, |v|^2 contribute an
/// exact zero to delta, not a rounding residue.
class Observable
{
public:
  using ValueFn = std::function<double(const Vec3&)>;
  using DeltaFn = std::function<double(const Vec3&, const Vec3&, const CollisionFrame&)>;

  Observable(ValueFn value, DeltaFn delta) : value_(std::move(value)), delta_(std::move(delta)) {}

  /// Generic g; delta by direct evaluation of the four terms.
  static Observable function(ValueFn g)
  {
    auto delta = [g](const Vec3& v, const Vec3& w, const CollisionFrame& x) {
      const VelocityPair c = collide(v, w, x);
      return g(c.v) + g(c.w) - g(v) - g(w);
    };
    return Observable(g, delta);
  }

  static Observable constant(double c)
  {
    return Observable([c](const Vec3&) { return c; },
                      [](const Vec3&, const Vec3&, const CollisionFrame&) { return 0.0; });
  }

  /// g(v) = c + a.v + v'Mv. The linear term and the isotropic part of M are
  /// collision invariant and dropped from delta; the anisotropic remainder
  /// gives delta = 2 s x'M(s x - (v - w)), s = x.(v - w).
  static Observable quadratic(double c, const Vec3& a, const Mat3& m)
  {
    const Mat3 sym = 0.5 * (m + m.transpose());
    Mat3 aniso = sym;
    const bool isotropic = sym(0, 1) == 0.0 && sym(0, 2) == 0.0 && sym(1, 2) == 0.0 &&
                           sym(0, 0) == sym(1, 1) && sym(1, 1) == sym(2, 2);
    if (isotropic)
      aniso.setZero();
    else
      aniso -= (sym.trace() / 3.0) * Mat3::Identity();
    const bool invariant = aniso.isZero(0.0);
    auto value = [c, a, sym](const Vec3& v) { return c + a.dot(v) + v.dot(sym * v); };
    auto delta = [aniso, invariant](const Vec3& v, const Vec3& w, const CollisionFrame& frame) {
      if (invariant)
        return 0.0;
      const Vec3& x = frame.direction();
      const Vec3 rel = v - w;
      const double s = x.dot(rel);
      return 2.0 * s * x.dot(aniso * (s * x - rel));
    };
    return Observable(value, delta);
  }

  /// ln f for f = exp(u - K0(u)) f0. Only the tanh terms and the anisotropic
  /// part of B survive in delta.
  static Observable log_density(const GibbsSpec& spec, double log_normalizer)
  {
    const Observable quad = quadratic(-log_normalizer - 1.5 * std::log(2.0 * std::numbers::pi),
                                      spec.linear(), spec.quadratic() - 0.5 * Mat3::Identity());
    if (spec.is_gaussian())
      return quad;
    const auto bounded = spec.bounded();
    const Observable tanh_part = function([bounded](const Vec3& v) {
      double s = 0.0;
      for (const BoundedTerm& t : bounded)
        s += t.amplitude * std::tanh(t.direction.dot(v));
      return s;
    });
    return quad + tanh_part;
  }

  static Observable log_density(const GibbsSpec& spec)
  {
    return log_density(spec, gibbs_normalizer(spec).mean);
  }

  double operator()(const Vec3& v) const { return value_(v); }
  double collision_delta(const Vec3& v, const Vec3& w, const CollisionFrame& x) const
  {
    return delta_(v, w, x);
  }

  friend Observable operator+(const Observable& a, const Observable& b)
  {
    return Observable([a, b](const Vec3& v) { return a(v) + b(v); },
                      [a, b](const Vec3& v, const Vec3& w, const CollisionFrame& x) {
                        return a.collision_delta(v, w, x) + b.collision_delta(v, w, x);
                      });
  }

  friend Observable operator*(double k, const Observable& a)
  {
    return Observable([k, a](const Vec3& v) { return k * a(v); },
                      [k, a](const Vec3& v, const Vec3& w, const CollisionFrame& x) {
                        return k * a.collision_delta(v, w, x);
                      });
  }

private:
  ValueFn value_;
  DeltaFn delta_;
};

/// c * v1^i v2^j v3^k.
struct Monomial
{
  double coefficient = 0.0;
  std::array<int, 3> powers{0, 0, 0};
};

/// Polynomial observable. Terms of degree <= 2 go through the exact quadratic
/// form; higher-degree terms use direct differences.
inline Observable polynomial_observable(const std::vector<Monomial>& terms)
{
  double c = 0.0;
  Vec3 a = Vec3::Zero();
  Mat3 m = Mat3::Zero();
  std::vector<Monomial> high;
  for (const Monomial& t : terms) {
    const auto& pw = t.powers;
    if (pw[0] < 0 || pw[1] < 0 || pw[2] < 0)
      throw DomainError("monomial powers must be nonnegative");
    const int degree = pw[0] + pw[1] + pw[2];
    if (degree == 0) {
      c += t.coefficient;
    } else if (degree == 1) {
      for (int i = 0; i < 3; ++i)
        a[i] += pw[i] * t.coefficient;
    } else if (degree == 2) {
      int idx[2];
      int k = 0;
      for (int i = 0; i < 3; ++i)
        for (int r = 0; r < pw[i]; ++r)
          idx[k++] = i;
      if (idx[0] == idx[1]) {
        m(idx[0], idx[0]) += t.coefficient;
      } else {
        m(idx[0], idx[1]) += 0.5 * t.coefficient;
        m(idx[1], idx[0]) += 0.5 * t.coefficient;
      }
    } else {
      high.push_back(t);
    }
  }
  Observable out = Observable::quadratic(c, a, m);
  if (!high.empty()) {
    out = out + Observable::function([high](const Vec3& v) {
      double s = 0.0;
      for (const Monomial& t : high)
        s += t.coefficient * std::pow(v[0], t.powers[0]) * std::pow(v[1], t.powers[1]) *
             std::pow(v[2], t.powers[2]);
      return s;
    });
  }
  return out;
}

/// Monte Carlo estimate of <g, Q(f)/f>_f = integral of g Q(f), kernel |x'(v-w)|.
/// Bounded terms are handled by self-normalized importance weights
/// exp(b(V) + b(W)) over Gaussian draws.
inline MCEstimate weak_boltzmann(const GibbsSpec& spec, const Observable& g, std::size_t n,
                                 std::uint64_t seed, const MonteCarloOptions& opts = {})
{
  if (n == 0)
    throw DomainError("weak_boltzmann needs n >= 1");
  const WeightedSums sums = run_blocks<WeightedSums>(
      n, seed, opts, [&](std::size_t, std::size_t begin, std::size_t end, std::mt19937_64& rng) {
        WeightedSums acc;
        for (std::size_t i = begin; i < end; ++i) {
          const Vec3 v = spec.draw_gaussian(rng);
          const Vec3 w = spec.draw_gaussian(rng);
          const CollisionFrame x(uniform_on_sphere(rng), 1e-9);
          const double weight =
              spec.is_gaussian() ? 1.0 : std::exp(spec.bounded_part(v) + spec.bounded_part(w));
          const double delta = g.collision_delta(v, w, x);
          const double y = delta == 0.0 ? 0.0 : 0.5 * delta * std::abs(x.direction().dot(v - w));
          acc.add(weight, y);
        }
        return acc;
      });
  return sums.estimate();
}

/// Covariant derivative of E(f) = E_f[ln f] along the Boltzmann field,
/// <Q(f)/f, ln f - E(f)>_f. Non-positive; zero at Maxwellians.
inline MCEstimate entropy_production(const GibbsSpec& spec, std::size_t n, std::uint64_t seed,
                                     const MonteCarloOptions& opts = {})
{
  // The normalizer cancels in the collision difference.
  return weak_boltzmann(spec, Observable::log_density(spec, 0.0), n, seed, opts);
}

/// integral of Q(f) = weak form at g = 1; zero sample by sample.
inline MCEstimate q_integral_zero_check(const GibbsSpec& spec, std::size_t n, std::uint64_t seed,
                                        const MonteCarloOptions& opts = {})
{
  return weak_boltzmann(spec, Observable::constant(1.0), n, seed, opts);
}

}  // namespace expgeo

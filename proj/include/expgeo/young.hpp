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

// Young pairs, Luxemburg norms and the Orlicz duality pairing.
//
//   kind A:  Phi(y)  = e^|y| - 1 - |y|
//            Phi*(x) = (1+|x|) ln(1+|x|) - |x|
//   kind B:  Phi(y)  = cosh y - 1
//            Phi*(x) = |x| asinh|x| - sqrt(1+x^2) + 1

#include "expgeo/errors.hpp"
#include "expgeo/space.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace expgeo {

enum class YoungKind { A, B };

/// Which member of a Young pair: the exponential-type Phi or its conjugate.
enum class YoungSide { Phi, PhiStar };

namespace detail {

// Below this magnitude the closed forms cancel; a Taylor expansion is used.
inline constexpr double kYoungTaylorCutoff = 1e-4;

// Kind A still loses up to ~1e-12 relative to cancellation well above the
// Taylor cutoff, so its power series is summed out to this magnitude.
inline constexpr double kYoungSeriesCutoff = 0.25;

// sum_{k>=2} a^k / k!
inline double phi_a_series(double a)
{
  double term = 0.5 * a * a;
  double sum = term;
  for (int k = 3; term > 1e-18 * sum; ++k) {
    term *= a / k;
    sum += term;
  }
  return sum;
}

// sum_{k>=2} (-1)^k a^k / (k (k - 1))
inline double phi_star_a_series(double a)
{
  double power = a * a;
  double sum = 0.5 * power;
  double sign = 1.0;
  for (int k = 3;; ++k) {
    power *= a;
    sign = -sign;
    const double term = power / (k * (k - 1.0));
    sum += sign * term;
    if (term <= 1e-18 * sum)
      return sum;
  }
}

inline double phi_a(double y)
{
  const double a = std::abs(y);
  if (a < kYoungTaylorCutoff)
    return a * a * (0.5 + a * (1.0 / 6.0 + a * (1.0 / 24.0 + a / 120.0)));
  if (a < kYoungSeriesCutoff)
    return phi_a_series(a);
  return std::expm1(a) - a;
}

inline double phi_b(double y)
{
  // cosh y - 1 = 2 sinh^2(y/2), no cancellation.
  const double s = std::sinh(0.5 * y);
  return 2.0 * s * s;
}

inline double phi_star_a(double x)
{
  const double a = std::abs(x);
  if (a < kYoungTaylorCutoff)
    return a * a * (0.5 + a * (-1.0 / 6.0 + a * (1.0 / 12.0 - a / 20.0)));
  if (a < kYoungSeriesCutoff)
    return phi_star_a_series(a);
  return (1.0 + a) * std::log1p(a) - a;
}

inline double phi_star_b(double x)
{
  const double a = std::abs(x);
  if (a < kYoungTaylorCutoff)
    return a * a * (0.5 - a * a / 24.0);
  // sqrt(1+a^2) - 1 written without cancellation
  const double root_minus_one = a * a / (std::hypot(1.0, a) + 1.0);
  return a * std::asinh(a) - root_minus_one;
}

}  // namespace detail

/// Closed-form value of Phi or Phi* of the given kind; even in x.
inline double eval_young(YoungKind kind, YoungSide side, double x)
{
  if (side == YoungSide::Phi)
    return kind == YoungKind::A ? detail::phi_a(x) : detail::phi_b(x);
  return kind == YoungKind::A ? detail::phi_star_a(x) : detail::phi_star_b(x);
}

/// log of eval_young, finite where Phi itself overflows (|x| > ~709).
inline double log_young(YoungKind kind, YoungSide side, double x)
{
  const double a = std::abs(x);
  if (side == YoungSide::Phi && a > 1.0) {
    const double e = std::exp(-a);
    if (kind == YoungKind::A)
      return a + std::log1p(-(1.0 + a) * e);  // e^a (1 - (1 + a) e^-a)
    return a - std::numbers::ln2 + 2.0 * std::log1p(-e);  // e^a (1 - e^-a)^2 / 2
  }
  return std::log(eval_young(kind, side, x));
}

/// phi = Phi' on [0, inf): e^y - 1 (A) or sinh y (B).
inline double young_derivative(YoungKind kind, double y)
{
  const double a = std::abs(y);
  return kind == YoungKind::A ? std::expm1(a) : std::sinh(a);
}

/// phi_* = Phi*' on [0, inf), the inverse of phi: ln(1+x) (A) or asinh x (B).
inline double young_conjugate_derivative(YoungKind kind, double x)
{
  const double a = std::abs(x);
  return kind == YoungKind::A ? std::log1p(a) : std::asinh(a);
}

/// Phi(x) + Phi*(y) - |xy|. Nonnegative; zero exactly when |y| = phi(|x|).
inline double young_inequality_gap(YoungKind kind, double x, double y)
{
  return eval_young(kind, YoungSide::Phi, x) + eval_young(kind, YoungSide::PhiStar, y) -
         std::abs(x * y);
}

/// E_p[Phi(v / lambda)] for the chosen Young function.
inline double young_modular(const Density& p, const RandomVariable& v, YoungKind kind,
                            YoungSide side, double lambda)
{
  require_same_space(p.space(), v.space(), "young_modular");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += eval_young(kind, side, v[i] / lambda) * p.mass(i);
  return s;
}

struct LuxemburgOptions
{
  YoungSide side = YoungSide::Phi;
  double tol = kExactTol;  // relative width of the final bracket
  int max_iterations = 2000;
};

/// Luxemburg norm: the lambda >= 0 with E_p[Phi(v/lambda)] = 1 (0 for v = 0).
///
/// The modular is continuous and strictly decreasing in lambda on a finite
/// space, so the root is bracketed by doubling/halving from ||v||_inf and then
/// bisected down to relative width tol.
inline double luxemburg_norm(const Density& p, const RandomVariable& v, YoungKind kind,
                             const LuxemburgOptions& opts = {})
{
  require_same_space(p.space(), v.space(), "luxemburg_norm");
  if (!(opts.tol > 0.0))
    throw DomainError("luxemburg_norm: tol must be positive");
  if (!v.is_finite())
    throw DomainError("luxemburg_norm: variable has non-finite values");
  const double sup = v.sup_norm();
  if (sup == 0.0)
    return 0.0;

  auto excess = [&](double lambda) {
    return young_modular(p, v, kind, opts.side, lambda) - 1.0;
  };

  double lo = sup;
  double hi = sup;
  int it = 0;
  if (excess(sup) > 0.0) {
    // norm is above sup: grow hi until the modular drops to <= 1
    while (excess(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++it > opts.max_iterations || !std::isfinite(hi))
        throw NumericError("luxemburg_norm: could not bracket the norm from above");
    }
  } else {
    while (excess(lo) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++it > opts.max_iterations || !(lo > 0.0))
        throw NumericError("luxemburg_norm: could not bracket the norm from below");
    }
  }

  // invariant: excess(lo) > 0 >= excess(hi)
  it = 0;
  while (hi - lo > opts.tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (excess(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (++it > opts.max_iterations)
      throw NumericError("luxemburg_norm: bisection did not reach tol " + std::to_string(opts.tol));
  }
  return 0.5 * (lo + hi);
}

/// <u, v>_p = E_p[uv], the Orlicz duality pairing.
inline double orlicz_pairing(const Density& p, const RandomVariable& u, const RandomVariable& v)
{
  require_same_space(u.space(), v.space(), "orlicz_pairing");
  return expect(p, u * v);
}

/// The bound 2 ||u||_{Phi*,p} ||v||_{Phi,p} that dominates |<u, v>_p|.
inline double orlicz_pairing_bound(const Density& p, const RandomVariable& u,
                                   const RandomVariable& v, YoungKind kind)
{
  LuxemburgOptions conj;
  conj.side = YoungSide::PhiStar;
  return 2.0 * luxemburg_norm(p, u, kind, conj) * luxemburg_norm(p, v, kind);
}

inline const char* to_string(YoungKind kind) { return kind == YoungKind::A ? "a" : "b"; }

}  // namespace expgeo

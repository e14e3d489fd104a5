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

// Parallel transports between fibers at p and q:
//   e-transport  eU_p^q u = u - E_q[u]                       (B_p -> B_q)
//   m-transport  mU_p^q v = (p/q) v                           (*B_p -> *B_q)
//   isometric    TU_p^q v = r v - (1 + E_q r)^{-1} (1 + r) E_q[r v],
//                r = sqrt(p/q)                                (H_p -> H_q)

#include "expgeo/bundle.hpp"
#include "expgeo/errors.hpp"
#include "expgeo/space.hpp"

#include <cmath>
#include <string>

namespace expgeo {

namespace detail {

inline void require_based_at(const Density& actual, const Density& expected, const char* what)
{
  if (!(actual == expected))
    throw DimensionError(std::string(what) + ": vector is not based at the source density");
}

}  // namespace detail

inline TangentVector e_transport(const Density& p, const Density& q, const TangentVector& u)
{
  require_same_space(p.space(), q.space(), "e_transport");
  detail::require_based_at(u.base(), p, "e_transport");
  return TangentVector(center(q, u.variable()));
}

inline PretangentVector m_transport(const Density& p, const Density& q, const PretangentVector& v)
{
  require_same_space(p.space(), q.space(), "m_transport");
  detail::require_based_at(v.base(), p, "m_transport");
  return PretangentVector(q, density_ratio(p, q) * v.variable());
}

/// <v, w>_p = E_p[v w] between the pretangent and tangent fibers at one base.
inline double duality(const PretangentVector& v, const TangentVector& w)
{
  if (!(v.base() == w.base()))
    throw DimensionError("duality: vectors are based at different densities");
  return expect(v.base(), v.variable() * w.variable());
}

inline HilbertVector isometric_transport(const Density& p, const Density& q, const HilbertVector& v)
{
  require_same_space(p.space(), q.space(), "isometric_transport");
  detail::require_based_at(v.base(), p, "isometric_transport");
  const RandomVariable r = density_ratio(p, q).map([](double x) { return std::sqrt(x); });
  const double mean_r = expect(q, r);
  const double mean_rv = expect(q, r * v.variable());
  const RandomVariable out = r * v.variable() - ((mean_rv / (1.0 + mean_r)) * (r + 1.0));
  return HilbertVector(q, out);
}

inline double l2_inner(const HilbertVector& a, const HilbertVector& b)
{
  if (!(a.base() == b.base()))
    throw DimensionError("l2_inner: vectors are based at different densities");
  return expect(a.base(), a.variable() * b.variable());
}

inline double l2_norm(const Density& p, const RandomVariable& v)
{
  return std::sqrt(expect(p, v * v));
}

inline double l1_norm(const Density& p, const RandomVariable& v)
{
  return expect(p, v.map([](double x) { return std::abs(x); }));
}

/// Residual of the derivative of the isometric transport along a curve.
///
/// With p = curve(t) and G(s) = field(curve(s)), the derivative at s = t of
///   s -> TU_{curve(s)}^p G(s)
/// equals  dG + G dp/2 - E_p[dG + G dp/2],  where dG is the derivative of G as a
/// random variable and dp = d/ds ln curve(s). Both sides are evaluated by
/// central differences with step h and the sup-norm difference is returned;
/// it vanishes as O(h^2).
template <class Curve, class Field>
double hilbert_transport_derivative_check(Curve&& curve, Field&& field, double t, double h)
{
  if (!(h > 0.0))
    throw DomainError("hilbert_transport_derivative_check: step must be positive");
  const Density p = curve(t);
  const Density p_plus = curve(t + h);
  const Density p_minus = curve(t - h);
  const HilbertVector g_plus = field(p_plus);
  const HilbertVector g_minus = field(p_minus);
  const HilbertVector g0 = field(p);

  const RandomVariable lhs = (1.0 / (2.0 * h)) * (isometric_transport(p_plus, p, g_plus).variable() -
                                                  isometric_transport(p_minus, p, g_minus).variable());

  const RandomVariable dg = (1.0 / (2.0 * h)) * (g_plus.variable() - g_minus.variable());
  const RandomVariable dp = (1.0 / (2.0 * h)) * (p_plus.log() - p_minus.log());
  const RandomVariable inner = dg + 0.5 * (g0.variable() * dp);
  const RandomVariable rhs = inner - expect(p, inner);

  const RandomVariable diff = lhs - rhs;
  if (!diff.is_finite())
    throw NumericError("hilbert_transport_derivative_check: non-finite intermediate values");
  return diff.sup_norm();
}

}  // namespace expgeo

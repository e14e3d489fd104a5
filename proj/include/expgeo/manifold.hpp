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

// Exponential charts on the positive densities of a finite sample space.
//
//   e_p(u) = exp(u - K_p(u)) p,      K_p(u) = log E_p[e^u]
//   s_p(q) = ln(q/p) - E_p[ln(q/p)]
//
// On a finite space K_p is finite on all of B_p, so every centered u is a
// valid coordinate and every positive density lies in the maximal
// exponential model of every other.

#include "expgeo/bundle.hpp"
#include "expgeo/errors.hpp"
#include "expgeo/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace expgeo {

/// A point of the manifold expressed in the chart centered at a base density.
struct ChartPoint
{
  CenteredRandomVariable coordinate;

  const Density& base() const { return coordinate.base(); }
};

namespace detail {

inline void require_centered_at(const CenteredRandomVariable& u, const Density& p, const char* what)
{
  if (!(u.base() == p))
    throw DimensionError(std::string(what) + ": coordinate is centered at a different density");
}

// log E_p[e^u] with a max shift; also returns the unnormalized tilted weights.
inline double log_moment(const Density& p, std::span<const double> u, std::vector<double>* tilted)
{
  double m = -std::numeric_limits<double>::infinity();
  for (double x : u)
    m = std::max(m, x);
  double z = 0.0;
  if (tilted)
    tilted->resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = p[i] * std::exp(u[i] - m);
    if (tilted)
      (*tilted)[i] = w;
    z += w * p.space().weight(i);
  }
  return m + std::log(z);
}

}  // namespace detail

/// K_p(u) = log E_p[e^u], computed with log-sum-exp.
inline double cumulant(const Density& p, const CenteredRandomVariable& u)
{
  detail::require_centered_at(u, p, "cumulant");
  return detail::log_moment(p, u.values(), nullptr);
}

/// e_p(u) = exp(u - K_p(u)) p.
inline Density chart_inverse(const Density& p, const CenteredRandomVariable& u)
{
  detail::require_centered_at(u, p, "chart_inverse");
  std::vector<double> tilted;
  detail::log_moment(p, u.values(), &tilted);
  return Density::normalize(p.space(), std::move(tilted));
}

/// s_p(q) = ln(q/p) - E_p[ln(q/p)].
inline CenteredRandomVariable chart(const Density& p, const Density& q)
{
  require_same_space(p.space(), q.space(), "chart");
  const RandomVariable log_ratio = q.log() - p.log();
  return center(p, log_ratio);
}

inline ChartPoint to_chart(const Density& p, const Density& q) { return ChartPoint{chart(p, q)}; }
inline Density from_chart(const ChartPoint& point)
{
  return chart_inverse(point.base(), point.coordinate);
}

/// Derivatives of K_p at u along 1-3 centered directions, via the moments of
/// q = e_p(u):
///   dK_p(u)v           = E_q[v]
///   d2K_p(u)(v1,v2)    = Cov_q(v1, v2)
///   d3K_p(u)(v1,v2,v3) = E_q[(v1 - E_q v1)(v2 - E_q v2)(v3 - E_q v3)]
inline double cumulant_derivatives(const Density& p, const CenteredRandomVariable& u,
                                   std::span<const RandomVariable> dirs)
{
  if (dirs.empty() || dirs.size() > 3)
    throw DomainError("cumulant_derivatives takes 1 to 3 directions, got " +
                      std::to_string(dirs.size()));
  for (const RandomVariable& d : dirs)
    require_same_space(p.space(), d.space(), "cumulant_derivatives");
  const Density q = chart_inverse(p, u);
  if (dirs.size() == 1)
    return expect(q, dirs[0]);
  return central_moments(q, dirs);
}

inline double cumulant_gradient(const Density& p, const CenteredRandomVariable& u,
                                const RandomVariable& v)
{
  const RandomVariable d[] = {v};
  return cumulant_derivatives(p, u, d);
}

inline double cumulant_hessian(const Density& p, const CenteredRandomVariable& u,
                               const RandomVariable& v1, const RandomVariable& v2)
{
  const RandomVariable d[] = {v1, v2};
  return cumulant_derivatives(p, u, d);
}

inline double cumulant_third(const Density& p, const CenteredRandomVariable& u,
                             const RandomVariable& v1, const RandomVariable& v2,
                             const RandomVariable& v3)
{
  const RandomVariable d[] = {v1, v2, v3};
  return cumulant_derivatives(p, u, d);
}

/// s_q o e_p (u) = u - E_q[u] + ln(p/q) - E_q[ln(p/q)].
inline CenteredRandomVariable transition_map(const Density& p, const Density& q,
                                             const CenteredRandomVariable& u)
{
  detail::require_centered_at(u, p, "transition_map");
  require_same_space(p.space(), q.space(), "transition_map");
  const RandomVariable shift = p.log() - q.log();
  return center(q, u.variable() + shift);
}

/// grad K_p(u) = q/p - 1 with q = e_p(u), an element of *B_p.
inline PretangentVector nabla_K(const Density& p, const CenteredRandomVariable& u)
{
  const Density q = chart_inverse(p, u);
  return PretangentVector(p, density_ratio(q, p) - 1.0);
}

/// E_p[(q/p)^t] for the exponential arc p^{1-t} q^t. Finite for every real t on
/// a finite space; exposed for arc-integrability checks.
inline double exponential_arc_moment(const Density& p, const Density& q, double t)
{
  require_same_space(p.space(), q.space(), "exponential_arc_moment");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    s += std::pow(q[i] / p[i], t) * p.mass(i);
  return s;
}

}  // namespace expgeo

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

// Covariant calculus of scalar functionals on the exponential manifold of a
// finite sample space: gradients, KL divergence in charts, the Boltzmann-Gibbs
// entropy E(q) = E_q[ln q], gradient flows, Fisher information and the second
// order (acceleration) structure of curves.

#include "expgeo/bundle.hpp"
#include "expgeo/errors.hpp"
#include "expgeo/manifold.hpp"
#include "expgeo/space.hpp"
#include "expgeo/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace expgeo {

/// Vector field: a map q -> vector in the fiber at q.
template <class Fiber>
using VectorField = std::function<BundleVector<Fiber>(const Density&)>;

using TangentField = VectorField<TangentFiber>;
using PretangentField = VectorField<PretangentFiber>;

/// Real function on the densities together with its covariant gradient,
/// D_G E(q) = E_q[grad E(q) G(q)].
struct ScalarField
{
  std::function<double(const Density&)> evaluate;
  std::function<PretangentVector(const Density&)> gradient;

  double operator()(const Density& q) const { return evaluate(q); }

  /// D_G E(q) through the duality coupling.
  double covariant_derivative(const Density& q, const TangentVector& g) const
  {
    return duality(gradient(q), g);
  }

  /// Gradient at e_p(u) carried back to the chart at p by the m-transport.
  PretangentVector chart_gradient(const Density& p, const CenteredRandomVariable& u) const
  {
    const Density q = chart_inverse(p, u);
    return m_transport(q, p, gradient(q));
  }
};

// ---------------------------------------------------------------------------
// Chart representations of fields

/// F_p(u) = mU_{e_p(u)}^p F(e_p(u)) for a pretangent field.
template <class Field>
PretangentVector pretangent_chart(Field&& field, const Density& p, const CenteredRandomVariable& u)
{
  const Density q = chart_inverse(p, u);
  const PretangentVector at_q = field(q);
  return m_transport(q, p, at_q);
}

/// F_p(u) = eU_{e_p(u)}^p F(e_p(u)) for a tangent field.
template <class Field>
TangentVector tangent_chart(Field&& field, const Density& p, const CenteredRandomVariable& u)
{
  const Density q = chart_inverse(p, u);
  const TangentVector at_q = field(q);
  return e_transport(q, p, at_q);
}

// ---------------------------------------------------------------------------
// Expected value

/// q -> E_q[f], with gradient f - E_q[f].
inline ScalarField expectation_functional(const RandomVariable& f)
{
  ScalarField field;
  field.evaluate = [f](const Density& q) { return expect(q, f); };
  field.gradient = [f](const Density& q) { return PretangentVector(center(q, f)); };
  return field;
}

/// The gradient of q -> E_q[f] as a tangent field; its flow is the exponential
/// family p(t) ~ e^{tf} p(0).
inline TangentField expectation_gradient_field(const RandomVariable& f)
{
  return [f](const Density& q) { return TangentVector(center(q, f)); };
}

// ---------------------------------------------------------------------------
// Kullback-Leibler divergence

/// D(q1 || q2) = sum_i q1_i ln(q1_i / q2_i) mu_i.
inline double kl_divergence(const Density& q1, const Density& q2)
{
  require_same_space(q1.space(), q2.space(), "kl_divergence");
  double s = 0.0;
  for (std::size_t i = 0; i < q1.size(); ++i)
    s += q1.mass(i) * std::log(q1[i] / q2[i]);
  return s;
}

/// D(e_p(u1) || e_p(u2)) = dK_p(u1)(u1 - u2) - (K_p(u1) - K_p(u2)).
inline double kl_in_chart(const Density& p, const CenteredRandomVariable& u1,
                          const CenteredRandomVariable& u2)
{
  const RandomVariable diff = u1.variable() - u2.variable();
  return cumulant_gradient(p, u1, diff) - (cumulant(p, u1) - cumulant(p, u2));
}

/// Covariant gradient of q -> D(q1 || q): 1 - q1/q, based at q.
inline PretangentVector kl_partial_gradient(const Density& q1, const Density& q)
{
  require_same_space(q1.space(), q.space(), "kl_partial_gradient");
  return PretangentVector(q, 1.0 - density_ratio(q1, q));
}

/// Mixed second covariant derivative of D(q1 || q2) on the diagonal q1 = q2 = q:
/// -E_q[w1 w2].
inline double kl_mixed_second_derivative(const Density& q, const CenteredRandomVariable& w1,
                                         const CenteredRandomVariable& w2)
{
  if (!(w1.base() == q) || !(w2.base() == q))
    throw DomainError("kl_mixed_second_derivative: directions must be centered at q");
  return -expect(q, w1.variable() * w2.variable());
}

// ---------------------------------------------------------------------------
// Entropy

/// E(q) = E_q[ln q].
inline double entropy(const Density& q) { return expect(q, q.log()); }

/// grad E(q) = ln q - E(q), a tangent vector at q.
inline TangentVector entropy_gradient(const Density& q) { return TangentVector(center(q, q.log())); }

inline ScalarField entropy_functional()
{
  ScalarField field;
  field.evaluate = [](const Density& q) { return entropy(q); };
  field.gradient = [](const Density& q) { return PretangentVector(center(q, q.log())); };
  return field;
}

/// Flow field of the entropy gradient: d/dt ln q = ln q - E(q).
inline TangentField entropy_gradient_field()
{
  return [](const Density& q) { return entropy_gradient(q); };
}

/// The entropy gradient seen in the tangent-bundle chart at p:
/// eU_q^p (ln q - E(q)) = u + ln p - E(p). Its derivative in u is the identity.
inline TangentVector entropy_gradient_tangent_chart(const Density& p, const CenteredRandomVariable& u)
{
  return tangent_chart(entropy_gradient_field(), p, u);
}

// ---------------------------------------------------------------------------
// Trajectories and gradient flows

/// Time-indexed path of densities.
class Trajectory
{
public:
  Trajectory(std::vector<double> times, std::vector<Density> densities, double step)
    : times_(std::move(times)), densities_(std::move(densities)), step_(step)
  {
    if (times_.size() != densities_.size() || times_.empty())
      throw DomainError("trajectory needs one density per time");
    for (std::size_t k = 1; k < times_.size(); ++k) {
      if (!(times_[k] > times_[k - 1]))
        throw DomainError("trajectory times must be strictly increasing");
      require_same_space(densities_[0].space(), densities_[k].space(), "trajectory");
    }
  }

  /// Samples of t -> curve(t) on t0, t0 + step, ..., t1.
  template <class Curve>
  static Trajectory sample(Curve&& curve, double t0, double t1, double step)
  {
    if (!(step > 0.0) || !(t1 > t0))
      throw DomainError("trajectory sampling needs step > 0 and t1 > t0");
    std::vector<double> times;
    std::vector<Density> densities;
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step - 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = k == n ? t1 : t0 + static_cast<double>(k) * step;
      times.push_back(t);
      densities.push_back(curve(t));
    }
    return Trajectory(std::move(times), std::move(densities), step);
  }

  std::size_t size() const { return times_.size(); }
  double step() const { return step_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Density>& densities() const { return densities_; }
  const Density& front() const { return densities_.front(); }
  const Density& back() const { return densities_.back(); }

  /// Index of the sample at time t; t must be one of the sample times.
  std::size_t index_of(double t) const
  {
    if (t < times_.front() - 1e-9 * step_ || t > times_.back() + 1e-9 * step_)
      throw DomainError("time " + std::to_string(t) + " outside trajectory range");
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times_.begin());
    if (k == times_.size() || (k > 0 && t - times_[k - 1] < times_[k] - t))
      k = k == 0 ? 0 : k - 1;
    if (std::abs(times_[k] - t) > 1e-6 * step_)
      throw DomainError("time " + std::to_string(t) + " is not a trajectory sample time");
    return k;
  }

private:
  std::vector<double> times_;
  std::vector<Density> densities_;
  double step_;
};

struct FlowOptions
{
  // Flows stop if any log-density exceeds this magnitude.
  double log_guard = 700.0;
};

namespace detail {

template <class Field>
std::vector<double> log_velocity(Field& field, const FiniteSampleSpace& space,
                                 const std::vector<double>& log_density)
{
  const Density p = Density::from_log(space, log_density);
  const auto v = field(p);
  const RandomVariable& var = v.variable();
  return std::vector<double>(var.values().begin(), var.values().end());
}

inline void check_log_state(const std::vector<double>& l, double guard, double t)
{
  for (double x : l) {
    if (!std::isfinite(x))
      throw NumericError("gradient flow produced a non-finite log-density at t=" + std::to_string(t));
    if (std::abs(x) > guard)
      throw NumericError("gradient flow stopped: |log-density| exceeded " + std::to_string(guard) +
                         " at t=" + std::to_string(t));
  }
}

}  // namespace detail

/// Integrates d/dt ln p(t) = field(p(t)) with classical RK4 in log-density
/// space, renormalizing after every step. The field must return a vector
/// based at its argument (tangent or pretangent).
template <class Field>
Trajectory gradient_flow(Field&& field, const Density& p0, double t_end, double step,
                         const FlowOptions& opts = {})
{
  if (!(step > 0.0) || !(t_end > 0.0))
    throw DomainError("gradient_flow needs step > 0 and t_end > 0");
  const FiniteSampleSpace& space = p0.space();
  const std::size_t n = p0.size();
  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));

  std::vector<double> times{0.0};
  std::vector<Density> densities{p0};
  const RandomVariable l0 = p0.log();
  std::vector<double> l(l0.values().begin(), l0.values().end());
  std::vector<double> stage(n);

  auto axpy = [&](const std::vector<double>& k, double a) {
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = l[i] + a * k[i];
    return stage;
  };

  for (std::size_t s = 1; s <= n_steps; ++s) {
    const double t_prev = times.back();
    const double t_next = s == n_steps ? t_end : static_cast<double>(s) * step;
    const double h = t_next - t_prev;

    const std::vector<double> k1 = detail::log_velocity(field, space, l);
    const std::vector<double> k2 = detail::log_velocity(field, space, axpy(k1, 0.5 * h));
    const std::vector<double> k3 = detail::log_velocity(field, space, axpy(k2, 0.5 * h));
    const std::vector<double> k4 = detail::log_velocity(field, space, axpy(k3, h));
    for (std::size_t i = 0; i < n; ++i)
      l[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    detail::check_log_state(l, opts.log_guard, t_next);

    Density p = Density::from_log(space, l);
    const RandomVariable lp = p.log();
    l.assign(lp.values().begin(), lp.values().end());
    detail::check_log_state(l, opts.log_guard, t_next);
    times.push_back(t_next);
    densities.push_back(std::move(p));
  }
  return Trajectory(std::move(times), std::move(densities), step);
}

namespace detail {

// Weights of the first and second derivative at x of the quadratic
// interpolant through (t[0], t[1], t[2]).
inline std::array<double, 3> lagrange_d1(const std::array<double, 3>& t, double x)
{
  std::array<double, 3> w{};
  for (int j = 0; j < 3; ++j) {
    const int a = (j + 1) % 3;
    const int b = (j + 2) % 3;
    w[j] = ((x - t[a]) + (x - t[b])) / ((t[j] - t[a]) * (t[j] - t[b]));
  }
  return w;
}

inline std::array<double, 3> lagrange_d2(const std::array<double, 3>& t)
{
  std::array<double, 3> w{};
  for (int j = 0; j < 3; ++j) {
    const int a = (j + 1) % 3;
    const int b = (j + 2) % 3;
    w[j] = 2.0 / ((t[j] - t[a]) * (t[j] - t[b]));
  }
  return w;
}

// Stencil start for a three-point rule at index k.
inline std::size_t stencil_start(std::size_t k, std::size_t size)
{
  if (size < 3)
    throw DomainError("trajectory needs at least three samples for differentiation");
  if (k == 0)
    return 0;
  if (k + 1 >= size)
    return size - 3;
  return k - 1;
}

}  // namespace detail

/// Velocity dp(t) = eU_{p0}^{p(t)} u'(t) = u'(t) - E_{p(t)}[u'(t)], where u is the
/// trajectory in the chart at its first density and u' is a three-point
/// difference.
inline TangentVector trajectory_velocity(const Trajectory& traj, double t)
{
  const std::size_t k = traj.index_of(t);
  const std::size_t s = detail::stencil_start(k, traj.size());
  const Density& base = traj.front();
  const std::array<double, 3> ts{traj.times()[s], traj.times()[s + 1], traj.times()[s + 2]};
  const auto w = detail::lagrange_d1(ts, traj.times()[k]);
  RandomVariable du = RandomVariable::zero(base.space());
  for (int j = 0; j < 3; ++j)
    du = du + w[j] * chart(base, traj.densities()[s + j]).variable();
  return TangentVector(center(traj.densities()[k], du));
}

/// I(p(t)) = E_{p(t)}[dp(t)^2].
inline double fisher_information(const Trajectory& traj, double t)
{
  const TangentVector v = trajectory_velocity(traj, t);
  return expect(v.base(), v.variable() * v.variable());
}


/// Second component of the velocity of t -> (p(t), dp(t)) in the second
/// tangent bundle: (dp)'(t) + I(p(t)), projected onto B_{p(t)}. Since
/// dp = d/dt ln p(t), (dp)' is the second time derivative of the normalized
/// log-density. Vanishes along one-parameter exponential families.
inline TangentVector e_acceleration(const Trajectory& traj, double t)
{
  const std::size_t k = traj.index_of(t);
  if (k == 0 || k + 1 >= traj.size())
    throw DomainError("e_acceleration needs an interior time, got " + std::to_string(t));
  const std::array<double, 3> ts{traj.times()[k - 1], traj.times()[k], traj.times()[k + 1]};
  const auto w = detail::lagrange_d2(ts);
  const Density& p = traj.densities()[k];
  RandomVariable dd = RandomVariable::zero(p.space());
  for (int j = 0; j < 3; ++j)
    dd = dd + w[j] * traj.densities()[k - 1 + j].log();
  const double info = fisher_information(traj, t);
  return TangentVector(center(p, dd + info));
}

// ---------------------------------------------------------------------------
// Product rule for the duality coupling

/// Residual |D_H<F,G> - <D_H F, G> - <F, D_H G>| at q, all covariant
/// derivatives taken by central differences of step h along the exponential
/// curve s -> e_q(s H(q)). F is a pretangent field, G and H tangent fields.
template <class FField, class GField, class HField>
double covariant_derivative_product_rule_check(FField&& f_field, GField&& g_field,
                                               HField&& h_field, const Density& q, double h)
{
  if (!(h > 0.0))
    throw DomainError("product rule check: step must be positive");
  const TangentVector dir = h_field(q);
  auto point = [&](double s) {
    return chart_inverse(q, CenteredRandomVariable(q, s * dir.variable()));
  };
  auto coupling = [&](const Density& r) {
    const PretangentVector fv = f_field(r);
    const TangentVector gv = g_field(r);
    return duality(fv, gv);
  };
  auto f_chart = [&](const Density& r) {
    const PretangentVector fv = f_field(r);
    return m_transport(r, q, fv).variable();
  };
  auto g_chart = [&](const Density& r) {
    const TangentVector gv = g_field(r);
    return e_transport(r, q, gv).variable();
  };

  const Density r_plus = point(h);
  const Density r_minus = point(-h);
  const double scale = 1.0 / (2.0 * h);
  const double lhs = scale * (coupling(r_plus) - coupling(r_minus));
  const RandomVariable df = scale * (f_chart(r_plus) - f_chart(r_minus));
  const RandomVariable dg = scale * (g_chart(r_plus) - g_chart(r_minus));
  const PretangentVector f0 = f_field(q);
  const TangentVector g0 = g_field(q);
  const double rhs = expect(q, df * g0.variable()) + expect(q, f0.variable() * dg);
  const double residual = std::abs(lhs - rhs);
  if (!std::isfinite(residual))
    throw NumericError("product rule check: non-finite values");
  return residual;
}

}  // namespace expgeo

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

#include "expgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace expgeo {

/// Tolerance used for identities that hold exactly in exact arithmetic.
inline constexpr double kExactTol = 1e-12;

/// Finite measure space {0, ..., n-1} with positive atom weights mu_i.
///
/// Copies share the weight storage; two spaces compare equal when they have
/// identical weights.
class FiniteSampleSpace
{
public:
  explicit FiniteSampleSpace(std::vector<double> weights)
  {
    if (weights.empty())
      throw DomainError("sample space needs at least one atom");
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
        throw DomainError("atom weight " + std::to_string(i) + " must be positive and finite");
    }
    weights_ = std::make_shared<const std::vector<double>>(std::move(weights));
  }

  /// Probability space with mu_i = 1/n.
  static FiniteSampleSpace uniform(std::size_t n)
  {
    if (n == 0)
      throw DomainError("sample space needs at least one atom");
    return FiniteSampleSpace(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  /// Counting measure, mu_i = 1.
  static FiniteSampleSpace counting(std::size_t n)
  {
    if (n == 0)
      throw DomainError("sample space needs at least one atom");
    return FiniteSampleSpace(std::vector<double>(n, 1.0));
  }

  std::size_t size() const { return weights_->size(); }
  std::span<const double> weights() const { return *weights_; }
  double weight(std::size_t i) const { return (*weights_)[i]; }
  double total_mass() const
  {
    double s = 0.0;
    for (double w : *weights_)
      s += w;
    return s;
  }

  friend bool operator==(const FiniteSampleSpace& a, const FiniteSampleSpace& b)
  {
    return a.weights_ == b.weights_ || *a.weights_ == *b.weights_;
  }

private:
  std::shared_ptr<const std::vector<double>> weights_;
};

inline void require_same_space(const FiniteSampleSpace& a, const FiniteSampleSpace& b,
                               const char* what)
{
  if (!(a == b))
    throw DimensionError(std::string(what) + ": operands live on different sample spaces");
}

/// Real function on the atoms of a finite sample space.
class RandomVariable
{
public:
  RandomVariable(FiniteSampleSpace space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values))
  {
    if (values_.size() != space_.size())
      throw DimensionError("random variable has " + std::to_string(values_.size()) +
                           " values for a space of " + std::to_string(space_.size()) + " atoms");
  }

  RandomVariable(FiniteSampleSpace space, std::initializer_list<double> values)
    : RandomVariable(std::move(space), std::vector<double>(values))
  {
  }

  static RandomVariable constant(const FiniteSampleSpace& space, double c)
  {
    return RandomVariable(space, std::vector<double>(space.size(), c));
  }

  static RandomVariable zero(const FiniteSampleSpace& space) { return constant(space, 0.0); }

  const FiniteSampleSpace& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool is_finite() const
  {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

  bool is_zero() const
  {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
  }

  double sup_norm() const
  {
    double m = 0.0;
    for (double x : values_)
      m = std::max(m, std::abs(x));
    return m;
  }

  /// Pointwise application of a scalar function.
  template <class Fn>
  RandomVariable map(Fn&& fn) const
  {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
      out[i] = fn(values_[i]);
    return RandomVariable(space_, std::move(out));
  }

  /// Pointwise combination with another variable on the same space.
  template <class Fn>
  RandomVariable zip(const RandomVariable& other, Fn&& fn) const
  {
    require_same_space(space_, other.space_, "pointwise operation");
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
      out[i] = fn(values_[i], other.values_[i]);
    return RandomVariable(space_, std::move(out));
  }

  friend RandomVariable operator+(const RandomVariable& a, const RandomVariable& b)
  {
    return a.zip(b, [](double x, double y) { return x + y; });
  }
  friend RandomVariable operator-(const RandomVariable& a, const RandomVariable& b)
  {
    return a.zip(b, [](double x, double y) { return x - y; });
  }
  /// Product of random variables (pointwise).
  friend RandomVariable operator*(const RandomVariable& a, const RandomVariable& b)
  {
    return a.zip(b, [](double x, double y) { return x * y; });
  }
  friend RandomVariable operator/(const RandomVariable& a, const RandomVariable& b)
  {
    return a.zip(b, [](double x, double y) { return x / y; });
  }
  friend RandomVariable operator*(double c, const RandomVariable& a)
  {
    return a.map([c](double x) { return c * x; });
  }
  friend RandomVariable operator*(const RandomVariable& a, double c) { return c * a; }
  friend RandomVariable operator+(const RandomVariable& a, double c)
  {
    return a.map([c](double x) { return x + c; });
  }
  friend RandomVariable operator+(double c, const RandomVariable& a) { return a + c; }
  friend RandomVariable operator-(const RandomVariable& a, double c) { return a + (-c); }
  friend RandomVariable operator-(double c, const RandomVariable& a)
  {
    return a.map([c](double x) { return c - x; });
  }
  friend RandomVariable operator-(const RandomVariable& a)
  {
    return a.map([](double x) { return -x; });
  }

private:
  FiniteSampleSpace space_;
  std::vector<double> values_;
};

/// Strictly positive density with respect to the atom weights:
/// p_i > 0 and sum_i p_i mu_i = 1.
class Density
{
public:
  Density(FiniteSampleSpace space, std::vector<double> values, double tol = kExactTol)
    : space_(std::move(space)), values_(std::move(values))
  {
    if (values_.size() != space_.size())
      throw DimensionError("density has " + std::to_string(values_.size()) +
                           " values for a space of " + std::to_string(space_.size()) + " atoms");
    double mass = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
        throw DomainError("density value " + std::to_string(i) + " must be positive and finite");
      mass += values_[i] * space_.weight(i);
    }
    if (std::abs(mass - 1.0) > tol)
      throw DomainError("density is not normalized: total mass " + std::to_string(mass));
  }

  Density(FiniteSampleSpace space, std::initializer_list<double> values)
    : Density(std::move(space), std::vector<double>(values))
  {
  }

  /// Rescales positive values to unit mass.
  static Density normalize(const FiniteSampleSpace& space, std::vector<double> values)
  {
    if (values.size() != space.size())
      throw DimensionError("density values do not match the space size");
    double mass = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      mass += values[i] * space.weight(i);
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw DomainError("cannot normalize: total mass " + std::to_string(mass));
    for (double& v : values)
      v /= mass;
    return Density(space, std::move(values));
  }

  /// Density proportional to exp(log_values), normalized with a max shift.
  static Density from_log(const FiniteSampleSpace& space, std::span<const double> log_values)
  {
    if (log_values.size() != space.size())
      throw DimensionError("log-density values do not match the space size");
    double m = -std::numeric_limits<double>::infinity();
    for (double l : log_values) {
      if (!std::isfinite(l))
        throw NumericError("non-finite log-density value");
      m = std::max(m, l);
    }
    std::vector<double> values(log_values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = std::exp(log_values[i] - m);
    return normalize(space, std::move(values));
  }

  static Density uniform(const FiniteSampleSpace& space)
  {
    return Density(space, std::vector<double>(space.size(), 1.0 / space.total_mass()));
  }

  const FiniteSampleSpace& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  RandomVariable as_variable() const { return RandomVariable(space_, values_); }
  RandomVariable log() const
  {
    return as_variable().map([](double x) { return std::log(x); });
  }

  /// Probability mass of atom i, p_i mu_i.
  double mass(std::size_t i) const { return values_[i] * space_.weight(i); }

  friend bool operator==(const Density& a, const Density& b)
  {
    return a.space_ == b.space_ && a.values_ == b.values_;
  }

private:
  FiniteSampleSpace space_;
  std::vector<double> values_;
};

/// Ratio q/p of two densities as a random variable.
inline RandomVariable density_ratio(const Density& q, const Density& p)
{
  return q.as_variable() / p.as_variable();
}

/// Sup-norm distance between two densities on the same space.
inline double sup_distance(const Density& a, const Density& b)
{
  return (a.as_variable() - b.as_variable()).sup_norm();
}

/// E_p[f] = sum_i f_i p_i mu_i.
inline double expect(const Density& p, const RandomVariable& f)
{
  require_same_space(p.space(), f.space(), "expect");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += f[i] * p.mass(i);
  return s;
}

/// Random variable with zero expectation under its base density.
///
/// The centering check is relative to E_base|f| so that large-magnitude
/// variables are not rejected for rounding.
class CenteredRandomVariable
{
public:
  CenteredRandomVariable(Density base, RandomVariable variable, double tol = kExactTol)
    : base_(std::move(base)), variable_(std::move(variable))
  {
    require_same_space(base_.space(), variable_.space(), "centered variable");
    if (!variable_.is_finite())
      throw DomainError("centered variable has non-finite values");
    const double mean = expect(base_, variable_);
    const double scale = expect(base_, variable_.map([](double x) { return std::abs(x); }));
    if (std::abs(mean) > tol * std::max(1.0, scale))
      throw DomainError("variable is not centered at its base: mean " + std::to_string(mean));
  }

  static CenteredRandomVariable zero(const Density& base)
  {
    return CenteredRandomVariable(base, RandomVariable::zero(base.space()));
  }

  const Density& base() const { return base_; }
  const RandomVariable& variable() const { return variable_; }
  std::span<const double> values() const { return variable_.values(); }
  std::size_t size() const { return variable_.size(); }
  double operator[](std::size_t i) const { return variable_[i]; }

  operator const RandomVariable&() const { return variable_; }

private:
  Density base_;
  RandomVariable variable_;
};

/// f - E_p[f]. Idempotent up to rounding.
inline CenteredRandomVariable center(const Density& p, const RandomVariable& f)
{
  const double m = expect(p, f);
  return CenteredRandomVariable(p, f - m);
}

/// Joint central moment E_p[prod_k (f_k - E_p f_k)] for two or three variables:
/// the covariance and the third joint central moment.
inline double central_moments(const Density& p, std::span<const RandomVariable> fs)
{
  if (fs.size() != 2 && fs.size() != 3)
    throw DomainError("central_moments takes 2 or 3 variables, got " + std::to_string(fs.size()));
  std::vector<double> prod(p.size(), 1.0);
  for (const RandomVariable& f : fs) {
    const double m = expect(p, f);
    for (std::size_t i = 0; i < prod.size(); ++i)
      prod[i] *= f[i] - m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < prod.size(); ++i)
    s += prod[i] * p.mass(i);
  return s;
}

inline double covariance(const Density& p, const RandomVariable& a, const RandomVariable& b)
{
  const RandomVariable fs[] = {a, b};
  return central_moments(p, fs);
}

inline double variance(const Density& p, const RandomVariable& a) { return covariance(p, a, a); }

inline double third_central_moment(const Density& p, const RandomVariable& a,
                                   const RandomVariable& b, const RandomVariable& c)
{
  const RandomVariable fs[] = {a, b, c};
  return central_moments(p, fs);
}

}  // namespace expgeo

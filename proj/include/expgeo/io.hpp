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

// JSON readers and writers for the command line and fixtures.
//
//   space / density / variable:  {"weights": [...], "values": [...]}
//   Gibbs spec:                  {"linear": [3], "quadratic": [[3],[3],[3]],
//                                 "bounded": [{"c": .., "d": [3]}, ...]}
//   Monte Carlo estimate:        {"mean": .., "stderr": .., "n": ..}
//
// Readers parse with nlohmann::json; writers print every double with 17
// significant digits so that output reads back bit-exactly.

#include "expgeo/boltzmann.hpp"
#include "expgeo/errors.hpp"
#include "expgeo/parallel.hpp"
#include "expgeo/space.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace expgeo::io {

using json = nlohmann::json;

/// Malformed input; the message names the offending field.
class ValidationError : public DomainError
{
public:
  using DomainError::DomainError;
};

inline std::string format_double(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_array(std::span<const double> xs)
{
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i)
      s += ", ";
    s += format_double(xs[i]);
  }
  return s + "]";
}

/// Parses `source` as inline JSON when it starts with '{' or '[', otherwise
/// reads it as a file path. `field` names the input in error messages.
inline json load_json(const std::string& source, const std::string& field)
{
  std::string text;
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) {
    text = source;
  } else {
    std::ifstream in(source);
    if (!in)
      throw ValidationError(field + ": cannot open '" + source + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(field + ": malformed JSON: " + e.what());
  }
}

inline std::vector<double> read_number_array(const json& j, const std::string& field)
{
  if (!j.is_array())
    throw ValidationError(field + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ValidationError(field + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

inline const json& require_field(const json& j, const std::string& key, const std::string& where)
{
  if (!j.is_object())
    throw ValidationError(where + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(where + "." + key + ": missing field");
  return *it;
}

template <class Fn>
auto rethrow_as_validation(const std::string& where, Fn&& fn)
{
  try {
    return fn();
  } catch (const ValidationError&) {
    throw;
  } catch (const DomainError& e) {
    throw ValidationError(where + ": " + e.what());
  } catch (const DimensionError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

inline FiniteSampleSpace read_space(const json& j, const std::string& where)
{
  auto w = read_number_array(require_field(j, "weights", where), where + ".weights");
  return rethrow_as_validation(where + ".weights", [&] { return FiniteSampleSpace(std::move(w)); });
}

inline RandomVariable read_variable(const json& j, const std::string& where)
{
  FiniteSampleSpace space = read_space(j, where);
  auto v = read_number_array(require_field(j, "values", where), where + ".values");
  return rethrow_as_validation(where + ".values", [&] { return RandomVariable(space, std::move(v)); });
}

inline Density read_density(const json& j, const std::string& where)
{
  FiniteSampleSpace space = read_space(j, where);
  auto v = read_number_array(require_field(j, "values", where), where + ".values");
  return rethrow_as_validation(where + ".values", [&] { return Density(space, std::move(v)); });
}

inline std::string space_json(const FiniteSampleSpace& space, std::span<const double> values)
{
  return "{\"weights\": " + format_array(space.weights()) + ", \"values\": " + format_array(values) +
         "}";
}

inline std::string to_json(const Density& p) { return space_json(p.space(), p.values()); }
inline std::string to_json(const RandomVariable& f) { return space_json(f.space(), f.values()); }
inline std::string to_json(const CenteredRandomVariable& u) { return to_json(u.variable()); }

inline Vec3 read_vec3(const json& j, const std::string& where)
{
  const auto xs = read_number_array(j, where);
  if (xs.size() != 3)
    throw ValidationError(where + ": expected 3 components");
  return Vec3(xs[0], xs[1], xs[2]);
}

inline GibbsSpec read_gibbs_spec(const json& j, const std::string& where)
{
  if (!j.is_object())
    throw ValidationError(where + ": expected a JSON object");
  Vec3 a = Vec3::Zero();
  Mat3 b = Mat3::Zero();
  std::vector<BoundedTerm> bounded;
  if (j.contains("linear"))
    a = read_vec3(j.at("linear"), where + ".linear");
  if (j.contains("quadratic")) {
    const json& q = j.at("quadratic");
    if (!q.is_array() || q.size() != 3)
      throw ValidationError(where + ".quadratic: expected a 3x3 array");
    for (int r = 0; r < 3; ++r)
      b.row(r) = read_vec3(q[r], where + ".quadratic[" + std::to_string(r) + "]").transpose();
  }
  if (j.contains("bounded")) {
    const json& bs = j.at("bounded");
    if (!bs.is_array())
      throw ValidationError(where + ".bounded: expected an array");
    for (std::size_t k = 0; k < bs.size(); ++k) {
      const std::string at = where + ".bounded[" + std::to_string(k) + "]";
      const json& c = require_field(bs[k], "c", at);
      if (!c.is_number())
        throw ValidationError(at + ".c: expected a number");
      bounded.push_back({c.get<double>(), read_vec3(require_field(bs[k], "d", at), at + ".d")});
    }
  }
  return rethrow_as_validation(where, [&] { return GibbsSpec(a, b, std::move(bounded)); });
}

inline std::string to_json(const GibbsSpec& spec)
{
  std::string s = "{\"linear\": " + format_array(std::span<const double>(spec.linear().data(), 3));
  s += ", \"quadratic\": [";
  for (int r = 0; r < 3; ++r) {
    const Vec3 row = spec.quadratic().row(r).transpose();
    s += (r ? ", " : "") + format_array(std::span<const double>(row.data(), 3));
  }
  s += "], \"bounded\": [";
  for (std::size_t k = 0; k < spec.bounded().size(); ++k) {
    const BoundedTerm& t = spec.bounded()[k];
    s += (k ? ", " : "");
    s += "{\"c\": " + format_double(t.amplitude) +
         ", \"d\": " + format_array(std::span<const double>(t.direction.data(), 3)) + "}";
  }
  return s + "]}";
}

inline std::vector<Monomial> read_polynomial(const json& j, const std::string& where)
{
  if (!j.is_array())
    throw ValidationError(where + ": expected an array of {\"c\": .., \"pow\": [i, j, k]}");
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    const json& c = require_field(j[k], "c", at);
    const json& pw = require_field(j[k], "pow", at);
    if (!c.is_number())
      throw ValidationError(at + ".c: expected a number");
    if (!pw.is_array() || pw.size() != 3)
      throw ValidationError(at + ".pow: expected 3 integers");
    Monomial m;
    m.coefficient = c.get<double>();
    for (int i = 0; i < 3; ++i) {
      if (!pw[i].is_number_integer() || pw[i].get<int>() < 0)
        throw ValidationError(at + ".pow[" + std::to_string(i) + "]: expected a nonnegative integer");
      m.powers[i] = pw[i].get<int>();
    }
    terms.push_back(m);
  }
  return terms;
}

inline std::string to_json(const MCEstimate& e)
{
  return "{\"mean\": " + format_double(e.mean) + ", \"stderr\": " + format_double(e.standard_error) +
         ", \"n\": " + std::to_string(e.n) + "}";
}

inline MCEstimate read_estimate(const json& j, const std::string& where)
{
  MCEstimate e;
  const json& m = require_field(j, "mean", where);
  const json& s = require_field(j, "stderr", where);
  const json& n = require_field(j, "n", where);
  if (!m.is_number())
    throw ValidationError(where + ".mean: expected a number");
  if (!s.is_number() || s.get<double>() < 0.0)
    throw ValidationError(where + ".stderr: expected a nonnegative number");
  if (!n.is_number_unsigned())
    throw ValidationError(where + ".n: expected a nonnegative integer");
  e.mean = m.get<double>();
  e.standard_error = s.get<double>();
  e.n = n.get<std::size_t>();
  return e;
}

}  // namespace expgeo::io

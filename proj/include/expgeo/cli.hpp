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

// Command-line front end.
//
//   expgeo norm      --density P --variable V [--kind a|b] [--side phi|phistar] [--tol T]
//   expgeo chart     --base P (--density Q | --coordinate U)
//   expgeo kl        --q1 Q1 --q2 Q2 [--base P]
//   expgeo entropy   --density Q
//   expgeo flow      --field expectation|entropy [--f F] --p0 P --t T --step H [--every K]
//   expgeo boltzmann --spec S --g invariant|v1sq|logf|custom-polynomial [--poly JSON]
//                    --n N [--seed S] [--threads W]
//
// JSON arguments are file paths or inline JSON. Exit codes: 0 success,
// 2 invalid input, 1 numeric failure.

#include "expgeo/boltzmann.hpp"
#include "expgeo/calculus.hpp"
#include "expgeo/errors.hpp"
#include "expgeo/io.hpp"
#include "expgeo/manifold.hpp"
#include "expgeo/space.hpp"
#include "expgeo/young.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace expgeo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitInvalid = 2;

enum class Subcommand { Norm, Chart, Kl, Entropy, Flow, Boltzmann };
enum class FlowField { Expectation, Entropy };
enum class TestFunction { Invariant, V1Squared, LogDensity, CustomPolynomial };

struct RunConfig
{
  Subcommand subcommand = Subcommand::Norm;

  // JSON inputs (path or inline)
  std::string density;
  std::string variable;
  std::string base;
  std::string coordinate;
  std::string q1;
  std::string q2;
  std::string f;
  std::string p0;
  std::string spec;
  std::string poly;

  YoungKind kind = YoungKind::B;
  YoungSide side = YoungSide::Phi;
  double tol = kExactTol;

  FlowField field = FlowField::Expectation;
  double t = 1.0;
  double step = 1e-3;
  std::size_t every = 1;

  TestFunction g = TestFunction::Invariant;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

namespace detail {

inline void require_positive(double x, const char* flag)
{
  if (!(x > 0.0) || !std::isfinite(x))
    throw io::ValidationError(std::string(flag) + ": must be a positive number");
}

inline void run_norm(const RunConfig& c, std::ostream& out)
{
  require_positive(c.tol, "--tol");
  const Density p = io::read_density(io::load_json(c.density, "--density"), "--density");
  const RandomVariable v = io::read_variable(io::load_json(c.variable, "--variable"), "--variable");
  if (!(p.space() == v.space()))
    throw io::ValidationError("--variable.weights: does not match the density's space");
  LuxemburgOptions opts;
  opts.side = c.side;
  opts.tol = c.tol;
  out << io::format_double(luxemburg_norm(p, v, c.kind, opts)) << '\n';
}

inline void run_chart(const RunConfig& c, std::ostream& out)
{
  const Density p = io::read_density(io::load_json(c.base, "--base"), "--base");
  if (c.density.empty() == c.coordinate.empty())
    throw io::ValidationError("chart: give exactly one of --density or --coordinate");
  if (!c.density.empty()) {
    const Density q = io::read_density(io::load_json(c.density, "--density"), "--density");
    if (!(p.space() == q.space()))
      throw io::ValidationError("--density.weights: does not match the base space");
    out << io::to_json(chart(p, q)) << '\n';
  } else {
    const RandomVariable u =
        io::read_variable(io::load_json(c.coordinate, "--coordinate"), "--coordinate");
    if (!(p.space() == u.space()))
      throw io::ValidationError("--coordinate.weights: does not match the base space");
    const CenteredRandomVariable cu = io::rethrow_as_validation(
        "--coordinate.values", [&] { return CenteredRandomVariable(p, u, 1e-9); });
    out << io::to_json(chart_inverse(p, cu)) << '\n';
  }
}

inline void run_kl(const RunConfig& c, std::ostream& out)
{
  const Density q1 = io::read_density(io::load_json(c.q1, "--q1"), "--q1");
  const Density q2 = io::read_density(io::load_json(c.q2, "--q2"), "--q2");
  if (!(q1.space() == q2.space()))
    throw io::ValidationError("--q2.weights: does not match the space of --q1");
  const Density p =
      c.base.empty() ? q2 : io::read_density(io::load_json(c.base, "--base"), "--base");
  if (!(p.space() == q1.space()))
    throw io::ValidationError("--base.weights: does not match the space of --q1");
  const double by_chart = kl_in_chart(p, chart(p, q1), chart(p, q2));
  const double direct = kl_divergence(q1, q2);
  out << "{\"chart\": " << io::format_double(by_chart)
      << ", \"direct\": " << io::format_double(direct) << "}\n";
}

inline void run_entropy(const RunConfig& c, std::ostream& out)
{
  const Density q = io::read_density(io::load_json(c.density, "--density"), "--density");
  out << io::format_double(entropy(q)) << '\n';
}

inline void run_flow(const RunConfig& c, std::ostream& out)
{
  require_positive(c.t, "--t");
  require_positive(c.step, "--step");
  if (c.every == 0)
    throw io::ValidationError("--every: must be at least 1");
  const Density p0 = io::read_density(io::load_json(c.p0, "--p0"), "--p0");

  TangentField field;
  std::function<double(const Density&)> value;
  if (c.field == FlowField::Expectation) {
    if (c.f.empty())
      throw io::ValidationError("--f: required for --field expectation");
    const RandomVariable f = io::read_variable(io::load_json(c.f, "--f"), "--f");
    if (!(f.space() == p0.space()))
      throw io::ValidationError("--f.weights: does not match the space of --p0");
    field = expectation_gradient_field(f);
    value = [f](const Density& q) { return expect(q, f); };
  } else {
    field = entropy_gradient_field();
    value = [](const Density& q) { return entropy(q); };
  }

  const Trajectory traj = gradient_flow(field, p0, c.t, c.step);

  out << "t";
  for (std::size_t i = 0; i < p0.size(); ++i)
    out << ",p_" << (i + 1);
  out << ",value,fisher\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k % c.every != 0 && k + 1 != traj.size())
      continue;
    const Density& p = traj.densities()[k];
    const TangentVector velocity = field(p);
    const double fisher = expect(p, velocity.variable() * velocity.variable());
    out << io::format_double(traj.times()[k]);
    for (double x : p.values())
      out << ',' << io::format_double(x);
    out << ',' << io::format_double(value(p)) << ',' << io::format_double(fisher) << '\n';
  }
}

inline void run_boltzmann(const RunConfig& c, std::ostream& out)
{
  if (c.n == 0)
    throw io::ValidationError("--n: must be at least 1");
  const GibbsSpec spec = io::read_gibbs_spec(io::load_json(c.spec, "--spec"), "--spec");
  MonteCarloOptions opts;
  opts.workers = c.threads;
  MCEstimate est;
  switch (c.g) {
    case TestFunction::Invariant: {
      // 1 + v1 + v2 + v3 + |v|^2
      const Observable g = Observable::quadratic(1.0, Vec3::Ones(), Mat3::Identity());
      est = weak_boltzmann(spec, g, c.n, c.seed, opts);
      break;
    }
    case TestFunction::V1Squared: {
      Mat3 m = Mat3::Zero();
      m(0, 0) = 1.0;
      est = weak_boltzmann(spec, Observable::quadratic(0.0, Vec3::Zero(), m), c.n, c.seed, opts);
      break;
    }
    case TestFunction::LogDensity:
      est = entropy_production(spec, c.n, c.seed, opts);
      break;
    case TestFunction::CustomPolynomial: {
      if (c.poly.empty())
        throw io::ValidationError("--poly: required for --g custom-polynomial");
      const auto terms = io::read_polynomial(io::load_json(c.poly, "--poly"), "--poly");
      est = weak_boltzmann(spec, polynomial_observable(terms), c.n, c.seed, opts);
      break;
    }
  }
  out << io::to_json(est) << '\n';
}

}  // namespace detail

/// Executes a parsed configuration; returns the process exit code.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
  try {
    switch (config.subcommand) {
      case Subcommand::Norm: detail::run_norm(config, out); break;
      case Subcommand::Chart: detail::run_chart(config, out); break;
      case Subcommand::Kl: detail::run_kl(config, out); break;
      case Subcommand::Entropy: detail::run_entropy(config, out); break;
      case Subcommand::Flow: detail::run_flow(config, out); break;
      case Subcommand::Boltzmann: detail::run_boltzmann(config, out); break;
    }
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

/// Parses argv-style arguments (args[0] is the program name) and runs.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
  RunConfig c;
  CLI::App app{"Information geometry on finite sample spaces and Boltzmann collision estimates",
               "expgeo"};
  app.require_subcommand(1);

  const std::map<std::string, YoungKind> kinds{{"a", YoungKind::A}, {"b", YoungKind::B}};
  const std::map<std::string, YoungSide> sides{{"phi", YoungSide::Phi},
                                               {"phistar", YoungSide::PhiStar}};
  const std::map<std::string, FlowField> fields{{"expectation", FlowField::Expectation},
                                                {"entropy", FlowField::Entropy}};
  const std::map<std::string, TestFunction> gs{{"invariant", TestFunction::Invariant},
                                               {"v1sq", TestFunction::V1Squared},
                                               {"logf", TestFunction::LogDensity},
                                               {"custom-polynomial", TestFunction::CustomPolynomial}};

  auto* norm = app.add_subcommand("norm", "Luxemburg norm of a variable under a density");
  norm->add_option("--density", c.density, "density JSON")->required();
  norm->add_option("--variable", c.variable, "random variable JSON")->required();
  norm->add_option("--kind", c.kind, "Young pair: a or b")
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
  norm->add_option("--side", c.side, "phi or phistar")
      ->transform(CLI::CheckedTransformer(sides, CLI::ignore_case));
  norm->add_option("--tol", c.tol, "relative tolerance of the root");

  auto* chart_cmd = app.add_subcommand("chart", "Convert between densities and chart coordinates");
  chart_cmd->add_option("--base", c.base, "base density JSON")->required();
  chart_cmd->add_option("--density", c.density, "density to express in the chart");
  chart_cmd->add_option("--coordinate", c.coordinate, "centered coordinate to map back");

  auto* kl = app.add_subcommand("kl", "KL divergence D(q1||q2) by chart formula and direct sum");
  kl->add_option("--q1", c.q1, "first density JSON")->required();
  kl->add_option("--q2", c.q2, "second density JSON")->required();
  kl->add_option("--base", c.base, "chart base density (default q2)");

  auto* ent = app.add_subcommand("entropy", "E_q[ln q]");
  ent->add_option("--density", c.density, "density JSON")->required();

  auto* flow = app.add_subcommand("flow", "Integrate a gradient flow, emit a CSV trace");
  flow->add_option("--field", c.field, "expectation or entropy")
      ->required()
      ->transform(CLI::CheckedTransformer(fields, CLI::ignore_case));
  flow->add_option("--f", c.f, "random variable JSON for the expectation field");
  flow->add_option("--p0", c.p0, "initial density JSON")->required();
  flow->add_option("--t", c.t, "final time");
  flow->add_option("--step", c.step, "RK4 step");
  flow->add_option("--every", c.every, "emit every k-th step");

  auto* boltz = app.add_subcommand("boltzmann", "Monte Carlo weak form of the Boltzmann operator");
  boltz->add_option("--spec", c.spec, "Gibbs spec JSON")->required();
  boltz->add_option("--g", c.g, "invariant, v1sq, logf or custom-polynomial")
      ->required()
      ->transform(CLI::CheckedTransformer(gs, CLI::ignore_case));
  boltz->add_option("--poly", c.poly, "monomials [{\"c\": .., \"pow\": [i, j, k]}, ...]");
  boltz->add_option("--n", c.n, "sample count");
  boltz->add_option("--seed", c.seed, "random seed");
  boltz->add_option("--threads", c.threads, "worker count (0 = all, capped by EXPGEO_THREADS)");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (norm->parsed())
    c.subcommand = Subcommand::Norm;
  else if (chart_cmd->parsed())
    c.subcommand = Subcommand::Chart;
  else if (kl->parsed())
    c.subcommand = Subcommand::Kl;
  else if (ent->parsed())
    c.subcommand = Subcommand::Entropy;
  else if (flow->parsed())
    c.subcommand = Subcommand::Flow;
  else
    c.subcommand = Subcommand::Boltzmann;
  return run(c, out, err);
}

}  // namespace expgeo::cli

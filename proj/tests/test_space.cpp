#include "expgeo/space.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace expgeo;
using Catch::Matchers::WithinAbs;

namespace {

FiniteSampleSpace halves() { return FiniteSampleSpace({0.5, 0.5}); }

}  // namespace

TEST_CASE("density validation")
{
  const auto s = halves();
  CHECK_NOTHROW(Density(s, {1.6, 0.4}));
  CHECK_THROWS_AS(Density(s, {1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(Density(s, {2.0, 0.0}), DomainError);
  CHECK_THROWS_AS(Density(s, {1.0, 1.0, 1.0}), DimensionError);
  CHECK_THROWS_AS(FiniteSampleSpace({1.0, -1.0}), DomainError);

  const Density p = Density::normalize(s, {3.0, 1.0});
  CHECK_THAT(p.values()[0], WithinAbs(1.5, 1e-15));
  CHECK_THAT(p.values()[1], WithinAbs(0.5, 1e-15));
}

TEST_CASE("from_log survives large shifts")
{
  const auto s = FiniteSampleSpace::uniform(3);
  const std::vector<double> l{1000.0, 1000.0 + std::log(2.0), 1000.0};
  const Density p = Density::from_log(s, l);
  CHECK_THAT(p.values()[1] / p.values()[0], WithinAbs(2.0, 1e-12));
  const std::vector<double> bad{0.0, std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_AS(Density::from_log(s, bad), NumericError);
}

TEST_CASE("expect examples")
{
  const auto s = halves();
  const Density u = Density::uniform(s);
  CHECK(expect(u, RandomVariable(s, {1.0, -1.0})) == 0.0);
  CHECK_THAT(expect(u, RandomVariable(s, {3.0, 3.0})), WithinAbs(3.0, 1e-15));
  CHECK_THAT(expect(Density(s, {1.6, 0.4}), RandomVariable(s, {1.0, -1.0})), WithinAbs(0.6, 1e-15));
}

TEST_CASE("center examples")
{
  const auto s = halves();
  const Density u = Density::uniform(s);
  CHECK(center(u, RandomVariable::constant(s, 4.2)).variable().sup_norm() < 1e-15);
  const auto c = center(u, RandomVariable(s, {1.0, -1.0}));
  CHECK(c[0] == 1.0);
  CHECK(c[1] == -1.0);
  const auto d = center(Density(s, {1.6, 0.4}), RandomVariable(s, {2.0, 0.0}));
  CHECK_THAT(d[0], WithinAbs(0.4, 1e-15));
  CHECK_THAT(d[1], WithinAbs(-1.6, 1e-15));
  CHECK_THROWS_AS(CenteredRandomVariable(u, RandomVariable(s, {1.0, 0.0})), DomainError);
}

TEST_CASE("central moment examples")
{
  const auto s = halves();
  const Density u = Density::uniform(s);
  const RandomVariable v(s, {1.0, -1.0});
  CHECK(covariance(u, v, RandomVariable::constant(s, 2.0)) == 0.0);
  CHECK_THAT(variance(u, v), WithinAbs(1.0, 1e-15));
  CHECK_THAT(third_central_moment(u, v, v, v), WithinAbs(0.0, 1e-15));
  const std::vector<RandomVariable> one{v};
  CHECK_THROWS_AS(central_moments(u, one), DomainError);
}

TEST_CASE("centering and moments on random instances")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = oracle::random_space(rng);
    const Density p = oracle::random_density(rng, inst.space, 1.5);
    const RandomVariable f = oracle::random_variable(rng, inst.space, 3.0);
    const RandomVariable g = oracle::random_variable(rng, inst.space, 3.0);
    const auto pv = oracle::values(p);
    const auto fv = oracle::values(f);
    const auto gv = oracle::values(g);

    CHECK(std::abs(oracle::expect(inst.mu, pv, std::vector<double>(inst.mu.size(), 1.0)) - 1.0) < 1e-12);
    const auto cf = center(p, f);
    CHECK(std::abs(expect(p, cf)) < 1e-12 * std::max(1.0, f.sup_norm()));

    const long double ef = oracle::expect(inst.mu, pv, fv);
    const long double eg = oracle::expect(inst.mu, pv, gv);
    std::vector<double> prod(fv.size());
    for (std::size_t i = 0; i < prod.size(); ++i)
      prod[i] = static_cast<double>((fv[i] - ef) * (gv[i] - eg));
    const double cov = static_cast<double>(oracle::expect(inst.mu, pv, prod));
    CHECK_THAT(covariance(p, f, g), WithinAbs(cov, 1e-11));
  }
}

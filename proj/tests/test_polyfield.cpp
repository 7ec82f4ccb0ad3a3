#include <gtest/gtest.h>

#include <array>
#include <vector>

#include "fvx/polynomial.hpp"
#include "fvx/random.hpp"

using namespace fvx;

namespace {

Poly P(const char* text) { return parse_poly(text); }

std::array<Rational, 4> point(long a, long b, long c, long d) { return {Rational(a), Rational(b), Rational(c), Rational(d)}; }

std::vector<std::array<Rational, 4>> sample_points() {
  std::vector<std::array<Rational, 4>> pts;
  for (long a = -2; a <= 2; ++a)
    for (long b = -1; b <= 1; ++b) pts.push_back({Rational(a), Rational(b), make_rational(a + 2 * b, 3), make_rational(1 - a, 2)});
  return pts;
}

Rational eval(const Poly& p, const std::array<Rational, 4>& x) { return p.evaluate(std::span<const Rational>(x)); }

}  // namespace

TEST(Polyfield, Addition) {
  EXPECT_TRUE((P("x0") + P("-x0")).is_zero());
  EXPECT_EQ(P("x0 x1") + P("x0 x1"), P("2 x0 x1"));
  EXPECT_EQ(P("1/2 x2^2") + P("1/3 x2^2"), P("5/6 x2^2"));
}

TEST(Polyfield, AdditionMatchesRationalArithmetic) {
  const Poly s = P("1/2 x2^2") + P("1/3 x2^2");
  for (const auto& x : sample_points()) EXPECT_EQ(eval(s, x), Rational(Rational(1, 2) * x[2] * x[2] + Rational(1, 3) * x[2] * x[2]));
}

TEST(Polyfield, Multiplication) {
  const Poly p = P("3/2 x0^2 x1 - x3");
  EXPECT_EQ(Poly(1) * p, p);
  EXPECT_EQ(P("x0") * P("x1"), P("x0 x1"));
  EXPECT_EQ(P("x0 + x1") * P("x0 - x1"), P("x0^2 - x1^2"));
}

TEST(Polyfield, ProductEvaluatesPointwise) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const Poly a = random_poly(rng, {}), b = random_poly(rng, {});
    for (const auto& x : sample_points()) EXPECT_EQ(eval(a * b, x), Rational(eval(a, x) * eval(b, x)));
  }
}

TEST(Polyfield, Partial) {
  EXPECT_EQ(P("x0 x1").partial(1), P("x0"));
  EXPECT_TRUE(P("7/3").partial(2).is_zero());
  EXPECT_EQ(P("x3^3").partial(3), P("3 x3^2"));
}

TEST(Polyfield, PartialMatchesDifferenceQuotientOfCubic) {
  // For a cubic in x_a, p(x + h e_a) - p(x - h e_a) = 2h p' + h^3 p'''/3; take h = 1 and h = 2.
  const Poly p = P("2 x0^3 x1 - 5 x0^2 + x0 x3 - 1/7");
  for (const auto& x : sample_points()) {
    auto shifted = [&](long h) {
      auto y = x;
      y[0] += h;
      auto z = x;
      z[0] -= h;
      return Rational(eval(p, y) - eval(p, z));
    };
    const Rational d1 = shifted(1), d2 = shifted(2);
    // d1 = 2 p' + c/3, d2 = 4 p' + 8c/3  =>  p' = (8 d1 - d2) / 12
    EXPECT_EQ(eval(p.partial(0), x), Rational((8 * d1 - d2) / 12));
  }
}

TEST(Polyfield, Evaluate) {
  EXPECT_EQ(eval(P("x0 + x1"), point(1, 2, 0, 0)), 3);
  EXPECT_EQ(eval(Poly(), point(4, 5, 6, 7)), 0);
  EXPECT_EQ(eval(P("x0 x2^2"), point(2, 0, 3, 0)), 18);
}

TEST(Polyfield, Compose) {
  const std::array<Poly, 4> identity = {Poly::variable(0), Poly::variable(1), Poly::variable(2), Poly::variable(3)};
  EXPECT_EQ(compose(P("x0"), identity), P("x0"));
  const std::array<Poly, 4> plane = {Poly::variable(0), Poly::variable(1), Poly(), Poly()};
  EXPECT_EQ(compose(P("x0 x1"), plane), P("x0 x1"));
  const std::array<Poly, 4> diag = {Poly::variable(0) + Poly::variable(1), Poly(), Poly(), Poly()};
  const Poly expected = parse_polynomial<4>("l1^2 + 2 l1 l2 + l2^2", parameter_naming());
  EXPECT_EQ(compose(P("x0^2"), diag), expected);
}

TEST(Polyfield, ComposeCommutesWithEvaluation) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly p = random_poly(rng, {});
    std::array<Poly, 4> map;
    for (auto& m : map) m = random_poly(rng, {2, 2});
    const Poly q = compose(p, map);
    for (const auto& x : sample_points()) {
      std::array<Rational, 4> y;
      for (int a = 0; a < 4; ++a) y[a] = eval(map[a], x);
      EXPECT_EQ(eval(q, x), eval(p, y));
    }
  }
}

TEST(Polyfield, ScaleIntegrate) {
  EXPECT_EQ(Poly(1).scale_integrate(0), Poly(1));
  EXPECT_EQ(P("x0").scale_integrate(0), P("1/2 x0"));
  EXPECT_EQ(P("x0 x1").scale_integrate(1), P("1/4 x0 x1"));
}

TEST(Polyfield, ScaleIntegrateMatchesIntegralAlongRay) {
  // int_0^1 t^k p(t x) dt as a one-variable polynomial in t, integrated exactly.
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly p = random_poly(rng, {});
    const unsigned k = static_cast<unsigned>(trial % 3);
    for (const auto& x : sample_points()) {
      Rational total = 0;
      for (const auto& [key, c] : p.terms()) {
        unsigned degree = 0;
        Rational value = c;
        for (int a = 0; a < 4; ++a) {
          degree += key[a];
          value *= fvx::pow(x[a], key[a]);
        }
        total += value / Rational(degree + k + 1);
      }
      EXPECT_EQ(eval(p.scale_integrate(k), x), total);
    }
  }
}

TEST(Polyfield, IntegrateOverBox) {
  const std::vector<std::pair<Rational, Rational>> box = {{Rational(0), Rational(1)}, {Rational(-1), Rational(2)}};
  EXPECT_EQ(integrate_over_box(P("x0 x1"), std::span<const std::pair<Rational, Rational>>(box)), Rational(3, 4));
  EXPECT_EQ(integrate_over_box(Poly(5), std::span<const std::pair<Rational, Rational>>(box)), 15);
  EXPECT_THROW(integrate_over_box(P("x2"), std::span<const std::pair<Rational, Rational>>(box)), std::invalid_argument);
}

TEST(Polyfield, ParsePrintRoundTrip) {
  const Poly p = P("3/2 x0^2 x1 - x3");
  EXPECT_EQ(to_string(p), "3/2 x0^2 x1 - x3");
  EXPECT_EQ(P("x1*x0*2 + 0 x3"), P("2 x0 x1"));
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Poly q = random_poly(rng, {});
    EXPECT_EQ(parse_poly(to_string(q)), q) << to_string(q);
  }
}

TEST(Polyfield, ParseErrors) {
  EXPECT_THROW(P("x4"), std::invalid_argument);
  EXPECT_THROW(P("3/0 x0"), std::invalid_argument);
  EXPECT_THROW(P("x0 +"), std::invalid_argument);
  EXPECT_THROW(P("x0^"), std::invalid_argument);
}

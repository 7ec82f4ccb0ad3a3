#include <gtest/gtest.h>

#include "fvx/lagrange.hpp"
#include "fvx/random.hpp"

using namespace fvx;

namespace {

Poly P(const char* text) { return parse_poly(text); }

const std::array<Rational, 4> kMinkowski = {Rational(1), Rational(-1), Rational(-1), Rational(-1)};

// Wave operator with diagonal g plus the mass term: sum_mu phi_{,mu mu} / g_mu + m^2 phi.
Poly klein_gordon(const Poly& phi, const std::array<Rational, 4>& g, const Rational& mass2) {
  Poly r = phi * mass2;
  for (std::size_t mu = 0; mu < 4; ++mu) r += phi.partial(mu).partial(mu) * Rational(1 / g[mu]);
  return r;
}

// J_{bcd} = pi^mu eps_{mu bcd}, mu the index missing from bcd.
FourForm j_oracle(const std::array<Poly, 4>& pi) {
  FourForm j(3);
  for (int mu = 0; mu < 4; ++mu) {
    IndexSubset rest = IndexSubset::from_mask(0b01111).without(mu);
    j.set(rest, pi[mu] * Rational(mu % 2 == 0 ? 1 : -1));
  }
  return j;
}

}  // namespace

TEST(Jet, NamingAndValidation) {
  const JetPoly p = parse_jet_poly("1/2 p0_0^2 - p1_5 p0_3");
  EXPECT_EQ(parse_jet_poly(p.to_string(jet_naming())), p);
  EXPECT_EQ(JetPoly::variable(jet_slot(1, 5)).to_string(jet_naming()), "p1_5");
  EXPECT_THROW(parse_jet_poly("p0_4"), std::invalid_argument);
  EXPECT_THROW(parse_jet_poly("p4_0"), std::invalid_argument);
  LagrangianSpec spec{1, p};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.n_fields = 2;
  EXPECT_NO_THROW(spec.validate());
  EXPECT_THROW(el_residual(spec, {P("x0")}, 0), std::invalid_argument);
}

TEST(Residual, FreeScalar) {
  const LagrangianSpec l = free_scalar();
  EXPECT_TRUE(el_residual(l, {P("x0 x1")}, 0).is_zero());
  EXPECT_EQ(el_residual(l, {P("x0^2")}, 0), Poly(2));
  EXPECT_EQ(el_residual(free_scalar(kMinkowski, 0), {P("x0^2")}, 0), Poly(2));
}

TEST(Residual, MatchesWaveOperatorOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    std::array<Rational, 4> g;
    for (auto& ga : g) ga = random_rational(rng);
    const Rational mass2 = trial % 2 ? Rational(0) : random_rational(rng);
    const Poly phi = random_poly(rng, {});
    EXPECT_EQ(el_residual(free_scalar(g, mass2), {phi}, 0), klein_gordon(phi, g, mass2));
  }
}

TEST(Residual, CoupledFields) {
  // L = p0_0 p1_0 + 1/2 p0_5^2 p1_5: field 0 sees d_0 d_0 phi1 - phi0 phi1, field 1 sees d_0 d_0 phi0 - phi0^2 / 2.
  const LagrangianSpec l{2, parse_jet_poly("p0_0 p1_0 + 1/2 p0_5^2 p1_5")};
  const FieldSet f = {P("x0^2 + x1"), P("x0^3")};
  EXPECT_EQ(el_residual(l, f, 0), P("6 x0") - f[0] * f[1]);
  EXPECT_EQ(el_residual(l, f, 1), Poly(2) - f[0] * f[0] * Rational(1, 2));
  EXPECT_THROW(el_residual(l, f, 2), std::out_of_range);
}

TEST(JForm, Examples) {
  const LagrangianSpec potential_only{1, parse_jet_poly("p0_5^3 - 2 p0_5")};
  EXPECT_TRUE(J_form(potential_only, {P("x0 x2")}, 0).is_zero());
  const LagrangianSpec l = free_scalar();
  const FieldSet phi = {P("x0^2 + 3 x1 x2")};
  std::array<Poly, 4> pi;
  for (int mu = 0; mu < 4; ++mu) pi[mu] = phi[0].partial(static_cast<std::size_t>(mu)) * Rational(1 / kMinkowski[mu]);
  EXPECT_EQ(J_form(l, phi, 0), j_oracle(pi));
}

TEST(Check51, Examples) {
  const LagrangianSpec l = free_scalar();
  EXPECT_TRUE(check_51(l, {P("x0 x1")}, 0));
  EXPECT_FALSE(check_51(l, {P("x0^2")}, 0));
  EXPECT_EQ(d4(J_form(l, {P("x0^2")}, 0)) - K_form(l, {P("x0^2")}, 0), volume4() * Poly(2));
}

TEST(Check55, Examples) {
  const LagrangianSpec l = free_scalar();
  const Check55 ok = check_55_routes(l, {P("x0 x1")}, 0);
  EXPECT_TRUE(ok.direct);
  EXPECT_TRUE(ok.reflected);
  EXPECT_TRUE(check_55(l, {P("x0 x1")}, 0));
  EXPECT_FALSE(check_55(l, {P("x0^2")}, 0));
  EXPECT_EQ(bd(Lambda_form(l, {P("x0^2")}, 0)), volume5() * Poly(2));
  EXPECT_EQ(bdstar(Lambda_form_reflected(l, {P("x0^2")}, 0)), volume5() * Poly(2));
}

TEST(Lambda, ComponentsForPureMass) {
  // rho^5 = -dL/dp5 = m^2 phi sits in the Z-part; the E-part carries the current, here zero.
  const LagrangianSpec l{1, parse_jet_poly("-3/2 p0_5^2")};
  const FiveForm lambda = Lambda_form(l, {P("x1")}, 0);
  EXPECT_EQ(lambda, FiveForm::basis(IndexSubset::from_mask(0b01111), P("3 x1")));
  EXPECT_EQ(Lambda_form_reflected(l, {P("x1")}, 0), -lambda);
}

TEST(Lambda, EPartCarriesTheCurrent) {
  const LagrangianSpec l = free_scalar();
  const FieldSet phi = {P("x0 x1 + x2^2")};
  const FiveForm lambda = Lambda_form(l, phi, 0);
  const FourForm j = J_form(l, phi, 0);
  EXPECT_TRUE(z_part(lambda).is_zero());
  for (IndexSubset k : subsets_of_size(4, 3)) EXPECT_EQ(lambda[k.with(kFifth)], j[k]) << k.to_string();
}

TEST(Check57, UnitCube) {
  const LagrangianSpec l = free_scalar();
  const ParamSurface cube = ParamSurface::unit_cube(4);
  EXPECT_TRUE(check_57(l, {P("x0 x1")}, 0, cube));
  EXPECT_EQ(lambda_flux(l, {P("x0 x1")}, 0, cube), 0);
  EXPECT_FALSE(check_57(l, {P("x0^2")}, 0, cube));
  EXPECT_EQ(lambda_flux(l, {P("x0^2")}, 0, cube), 2);
  EXPECT_EQ(integrate_deg(bd(Lambda_form(l, {P("x0^2")}, 0)), cube), 2);
  EXPECT_THROW(lambda_flux(l, {P("x0")}, 0, ParamSurface::unit_cube(3)), std::invalid_argument);
}

TEST(ThreeWay, RandomPairs) {
  Rng rng(52);
  int solutions = 0;
  for (int trial = 0; trial < 60; ++trial) {
    LagrangianSpec l;
    FieldSet phi;
    if (trial % 2 == 0) {
      l = random_lagrangian(rng, {}, false);
      phi = {random_linear_field(rng)};
    } else {
      l = random_lagrangian(rng, {}, true);
      phi = {random_poly(rng, {})};
    }
    const bool solution = el_residual(l, phi, 0).is_zero();
    solutions += solution;
    EXPECT_EQ(check_51(l, phi, 0), solution);
    EXPECT_EQ(check_55(l, phi, 0), solution);
    EXPECT_EQ(flip_z_sign(Lambda_form(l, phi, 0)), Lambda_form_reflected(l, phi, 0));
  }
  EXPECT_GT(solutions, 0);
  EXPECT_LT(solutions, 60);
}

TEST(Witness, NonSolutionHasNonzeroFluxSomewhere) {
  const LagrangianSpec l = free_scalar();
  EXPECT_FALSE(flux_witness(l, {P("x0 x1")}, 0).has_value());
  const LagrangianSpec shifted{1, parse_jet_poly("1/2 p0_0^2 - 1/2 p0_1^2")};
  const FieldSet phi = {P("1/6 x0^3 x1")};
  ASSERT_EQ(el_residual(shifted, phi, 0), P("x0 x1"));
  const auto w = flux_witness(shifted, phi, 0);
  ASSERT_TRUE(w.has_value());
  EXPECT_NE(lambda_flux(shifted, phi, 0, *w), 0);
  const ELReport r = el_report(l, {P("x0^2")}, 0);
  EXPECT_EQ(r.residual, Poly(2));
  EXPECT_FALSE(r.check51);
  EXPECT_EQ(r.unit_cube_flux, 2);
  EXPECT_TRUE(r.witness.has_value());
}

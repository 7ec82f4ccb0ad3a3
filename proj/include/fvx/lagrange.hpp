#pragma once

/// @file lagrange.hpp
/// Euler-Lagrange equations for N real scalar fields with an autonomous
/// Lagrangian density L(p), in three formulations: the operational residual,
/// the four-vector form dJ = K, and the five-vector form bd(Lambda) = 0
/// together with its flux through 4-volumes.
///
/// The density is a polynomial in 5N jet variables p{l}_{k}: p{l}_{mu} stands
/// for d_mu phi_l and p{l}_5 for the bullet partial along 1, which in the
/// working basis is phi_l itself.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fvx/calculus.hpp"
#include "fvx/forms.hpp"
#include "fvx/indexed_array.hpp"
#include "fvx/integration.hpp"
#include "fvx/polynomial.hpp"

namespace fvx {

inline constexpr int kMaxFields = 4;

using JetPoly = Polynomial<5 * kMaxFields>;

/// Slot of p{field}_{component}, component in {0,1,2,3,5}.
inline std::size_t jet_slot(int field, int component) {
  if (field < 0 || field >= kMaxFields) throw std::out_of_range("jet variable: field index out of range");
  return static_cast<std::size_t>(5 * field + bit_of_index(component));
}

inline VariableNaming jet_naming() {
  return {[](std::size_t i) {
            return "p" + std::to_string(i / 5) + "_" + std::to_string(index_of_bit(static_cast<int>(i % 5)));
          },
          [](std::string_view t) -> std::optional<std::size_t> {
            if (t.size() != 4 || t[0] != 'p' || t[2] != '_') return std::nullopt;
            const int field = t[1] - '0';
            const int comp = t[3] - '0';
            if (field < 0 || field >= kMaxFields) return std::nullopt;
            if (comp < 0 || comp > kFifth || comp == 4) return std::nullopt;
            return jet_slot(field, comp);
          }};
}

inline JetPoly parse_jet_poly(std::string_view text) { return parse_polynomial<5 * kMaxFields>(text, jet_naming()); }

struct LagrangianSpec {
  int n_fields = 1;
  JetPoly density;

  void validate() const {
    if (n_fields < 1 || n_fields > kMaxFields)
      throw std::invalid_argument("lagrangian: field count must be 1.." + std::to_string(kMaxFields));
    if (!density.uses_only_first(static_cast<std::size_t>(5 * n_fields)))
      throw std::invalid_argument("lagrangian: density uses a field beyond N");
  }
};

using FieldSet = std::vector<Poly>;

/// 1/2 g^{mu nu} p_mu p_nu - 1/2 mass2 p_5^2 for field 0 with the given diagonal g.
inline LagrangianSpec free_scalar(const std::array<Rational, 4>& g = {Rational(1), Rational(-1), Rational(-1), Rational(-1)},
                                  const Rational& mass2 = 0) {
  LagrangianSpec spec;
  const Rational half(1, 2);
  for (int mu = 0; mu < 4; ++mu) {
    const JetPoly p = JetPoly::variable(jet_slot(0, mu));
    spec.density += p * p * Rational(half / g[mu]);
  }
  const JetPoly p5 = JetPoly::variable(jet_slot(0, kFifth));
  spec.density -= p5 * p5 * Rational(half * mass2);
  return spec;
}

namespace detail {

inline std::array<Poly, 5 * kMaxFields> jet_images(const LagrangianSpec& lagrangian, const FieldSet& fields) {
  lagrangian.validate();
  if (fields.size() != static_cast<std::size_t>(lagrangian.n_fields))
    throw std::invalid_argument("field count " + std::to_string(fields.size()) + " does not match N = " +
                                std::to_string(lagrangian.n_fields));
  std::array<Poly, 5 * kMaxFields> images{};
  for (int l = 0; l < lagrangian.n_fields; ++l) {
    for (int mu = 0; mu < 4; ++mu) images[jet_slot(l, mu)] = fields[l].partial(static_cast<std::size_t>(mu));
    images[jet_slot(l, kFifth)] = fields[l];
  }
  return images;
}

inline void check_field_index(const LagrangianSpec& lagrangian, int field) {
  if (field < 0 || field >= lagrangian.n_fields) throw std::out_of_range("field index out of range");
}

/// Levi-Civita symbol over the labels 0..3, with eps_0123 = 1.
inline int symbol4(std::span<const int> labels) {
  unsigned seen = 0;
  for (int v : labels) {
    if (seen & (1u << v)) return 0;
    seen |= 1u << v;
  }
  return permutation_sign(labels);
}

/// Symbol over {0,1,2,3,5} with eps_01235 = 1.
inline int symbol5(std::span<const int> labels) {
  std::array<int, 5> bits{};
  unsigned seen = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bits[i] = bit_of_index(labels[i]);
    if (seen & (1u << bits[i])) return 0;
    seen |= 1u << bits[i];
  }
  return permutation_sign(std::span<const int>(bits.data(), labels.size()));
}

}  // namespace detail

/// dL/dp{l}_{component} evaluated on the fields.
inline Poly lagrangian_partial(const LagrangianSpec& lagrangian, const FieldSet& fields, int field, int component) {
  detail::check_field_index(lagrangian, field);
  return compose(lagrangian.density.partial(jet_slot(field, component)), detail::jet_images(lagrangian, fields));
}

/// sum_mu d_mu (dL/dp_mu) - dL/dp_5 on the fields; zero exactly for solutions.
inline Poly el_residual(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  Poly r = -lagrangian_partial(lagrangian, fields, field, kFifth);
  for (int mu = 0; mu < 4; ++mu)
    r += lagrangian_partial(lagrangian, fields, field, mu).partial(static_cast<std::size_t>(mu));
  return r;
}

/// Components S^mu_{abcd} of the four-vector-valued 4-form dL/d(d phi_l),
/// with the density read as L_0123. Slot 0 holds mu.
inline IndexedArray<Poly> momentum_four_form(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  std::array<Poly, 4> pi;
  for (int mu = 0; mu < 4; ++mu) pi[mu] = lagrangian_partial(lagrangian, fields, field, mu);
  IndexedArray<Poly> s(5, {0, 1, 2, 3});
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<int> t = s.tuple_at(i);
    const int e = detail::symbol4(std::span<const int>(t).subspan(1));
    if (e != 0) s.flat(i) = pi[t[0]] * Rational(e);
  }
  return s;
}

/// Components S^H_{ABCDE} of the five-vector-valued 5-form dL/d(bdstar phi_l),
/// with the density read as L_01235. Since bdstar_5 phi = -phi, the fifth
/// momentum is -dL/dp_5. With `reflected` the derivative is taken with
/// respect to bd phi instead and the fifth momentum is +dL/dp_5.
inline IndexedArray<Poly> momentum_five_form(const LagrangianSpec& lagrangian, const FieldSet& fields, int field,
                                             bool reflected = false) {
  std::array<Poly, 5> rho;
  for (int mu = 0; mu < 4; ++mu) rho[mu] = lagrangian_partial(lagrangian, fields, field, mu);
  rho[4] = lagrangian_partial(lagrangian, fields, field, kFifth);
  if (!reflected) rho[4] = -rho[4];
  IndexedArray<Poly> s(6, {0, 1, 2, 3, 5});
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<int> t = s.tuple_at(i);
    const int e = detail::symbol5(std::span<const int>(t).subspan(1));
    if (e != 0) s.flat(i) = rho[bit_of_index(t[0])] * Rational(e);
  }
  return s;
}

/// T_{rest} = S^H_{H rest}: contraction of the upper index with the first lower one.
inline IndexedArray<Poly> trace_first(const IndexedArray<Poly>& s) {
  if (s.arity() < 2) throw std::invalid_argument("trace_first: arity must be at least 2");
  IndexedArray<Poly> t(s.arity() - 2, s.values());
  std::vector<int> full(s.arity());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::vector<int> rest = t.tuple_at(i);
    std::copy(rest.begin(), rest.end(), full.begin() + 2);
    Poly acc;
    for (int h : s.values()) {
      full[0] = h;
      full[1] = h;
      acc += s.at(full);
    }
    t.flat(i) = acc;
  }
  return t;
}

/// The 3-form J with d4 J = K for solutions.
inline FourForm J_form(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  const IndexedArray<Poly> t = trace_first(momentum_four_form(lagrangian, fields, field));
  FourForm j(3);
  for (IndexSubset k : subsets_of_size(4, 3)) {
    const std::vector<int> idx = k.indices();
    j.set(k, t.at(idx));
  }
  return j;
}

/// K = dL/dphi_l as a four-vector 4-form.
inline FourForm K_form(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  return volume4() * lagrangian_partial(lagrangian, fields, field, kFifth);
}

/// d4 J = K.
inline bool check_51(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  return d4(J_form(lagrangian, fields, field)) == K_form(lagrangian, fields, field);
}

namespace detail {

inline FiveForm four_form_from_array(const IndexedArray<Poly>& t) {
  FiveForm r(4);
  for (IndexSubset k : subsets_of_size(5, 4)) {
    const std::vector<int> idx = k.indices();
    r.set(k, t.at(idx));
  }
  return r;
}

}  // namespace detail

/// The five-vector 4-form Lambda with bd Lambda = residual * vol5.
inline FiveForm Lambda_form(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  return detail::four_form_from_array(trace_first(momentum_five_form(lagrangian, fields, field)));
}

/// The 4-form built from dL/d(bd phi_l); it is Lambda with its Z-part negated.
inline FiveForm Lambda_form_reflected(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  return detail::four_form_from_array(trace_first(momentum_five_form(lagrangian, fields, field, true)));
}

inline FiveForm flip_z_sign(const FiveForm& t) { return e_part(t) - z_part(t); }

struct Check55 {
  bool direct;     // bd(Lambda) = 0
  bool reflected;  // bdstar(Lambda_reflected) = 0
};

inline Check55 check_55_routes(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  return {bd(Lambda_form(lagrangian, fields, field)).is_zero(),
          bdstar(Lambda_form_reflected(lagrangian, fields, field)).is_zero()};
}

/// bd(Lambda) = 0; throws std::logic_error if the two routes disagree.
inline bool check_55(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  const Check55 c = check_55_routes(lagrangian, fields, field);
  if (c.direct != c.reflected) throw std::logic_error("check_55: direct and reflected routes disagree");
  return c.direct;
}

/// Five-vector flux of Lambda through the 4-volume `v`.
inline Rational lambda_flux(const LagrangianSpec& lagrangian, const FieldSet& fields, int field, const ParamSurface& v) {
  if (v.dim() != 4) throw std::invalid_argument("check_57: volume must be 4-dimensional");
  return five_flux(Lambda_form(lagrangian, fields, field), v);
}

inline bool check_57(const LagrangianSpec& lagrangian, const FieldSet& fields, int field, const ParamSurface& v) {
  return sgn(lambda_flux(lagrangian, fields, field, v)) == 0;
}

/// A unit 4-cube with integer corner in [-2, 2]^4 through which Lambda has
/// nonzero flux, or nullopt if none of those boxes is a witness.
inline std::optional<ParamSurface> flux_witness(const LagrangianSpec& lagrangian, const FieldSet& fields, int field) {
  const FiveForm lambda = Lambda_form(lagrangian, fields, field);
  const FiveForm defect = bd(lambda);
  if (defect.is_zero()) return std::nullopt;
  // Corners ordered by distance from the origin.
  std::vector<std::array<int, 4>> corners;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) corners.push_back({a, b, c, d});
  std::stable_sort(corners.begin(), corners.end(), [](const auto& x, const auto& y) {
    auto norm = [](const auto& p) { return std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]) + std::abs(p[3]); };
    return norm(x) < norm(y);
  });
  for (const auto& corner : corners) {
    std::vector<Interval> box;
    for (int k = 0; k < 4; ++k) box.emplace_back(Rational(corner[k]), Rational(corner[k] + 1));
    ParamSurface v = ParamSurface::coordinate_box(std::move(box));
    if (sgn(integrate_deg(defect, v)) != 0 && sgn(five_flux(lambda, v)) != 0) return v;
  }
  return std::nullopt;
}

struct ELReport {
  Poly residual;
  FourForm J{3};
  FourForm K{4};
  FiveForm Lambda{4};
  bool check51 = false;
  Check55 check55{};
  Rational unit_cube_flux;
  std::optional<ParamSurface> witness;
};

inline ELReport el_report(const LagrangianSpec& lagrangian, const FieldSet& fields, int field,
                          const std::optional<ParamSurface>& probe = std::nullopt) {
  ELReport r;
  r.residual = el_residual(lagrangian, fields, field);
  r.J = J_form(lagrangian, fields, field);
  r.K = K_form(lagrangian, fields, field);
  r.Lambda = Lambda_form(lagrangian, fields, field);
  r.check51 = d4(r.J) == r.K;
  r.check55 = check_55_routes(lagrangian, fields, field);
  r.unit_cube_flux = five_flux(r.Lambda, probe ? *probe : ParamSurface::unit_cube(4));
  if (!r.residual.is_zero()) r.witness = flux_witness(lagrangian, fields, field);
  return r;
}

}  // namespace fvx

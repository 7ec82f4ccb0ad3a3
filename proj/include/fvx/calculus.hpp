#pragma once

/// @file calculus.hpp
/// Exterior derivatives on four- and five-vector forms, the five-vector
/// exterior derivative bd = d + jhat^ and its reflection bdstar = d - jhat^,
/// and constructive potentials for closed forms (cone homotopy at the origin).

#include <cassert>
#include <stdexcept>
#include <string>

#include "fvx/forms.hpp"

namespace fvx {

enum class DerivOpKind { kD, kBD, kBDStar };

/// Thrown when a potential is requested for a form that is not closed.
template <class Form>
class NotClosedError : public std::domain_error {
 public:
  explicit NotClosedError(Form residual)
      : std::domain_error("form is not closed: derivative has " + std::to_string(residual.components().size()) +
                          " nonzero component(s)"),
        residual_(std::move(residual)) {}
  const Form& residual() const { return residual_; }

 private:
  Form residual_;
};

/// Thrown for a closed rank-1 five-vector form whose E-part is a nonzero constant multiple of jhat.
class EDefectError : public std::domain_error {
 public:
  explicit EDefectError(Rational constant)
      : std::domain_error("no potential: Ẽ-defect (E-part = " + constant.get_str() + " * jhat)"),
        constant_(std::move(constant)) {}
  const Rational& constant() const { return constant_; }

 private:
  Rational constant_;
};

namespace detail {

/// Sum over coordinate axes of d_a t_K o^a ^ o^K; the fifth direction carries no derivative.
template <int Dim>
Graded<Dim, Variance::kCovariant> coordinate_derivative(const Graded<Dim, Variance::kCovariant>& t) {
  Graded<Dim, Variance::kCovariant> r(t.rank() + 1);
  for (const auto& [k, c] : t.components()) {
    for (int axis = 0; axis < 4; ++axis) {
      if (k.contains(axis)) continue;
      Poly dc = c.partial(static_cast<std::size_t>(axis));
      if (dc.is_zero()) continue;
      const IndexSubset a = IndexSubset::of({axis});
      if (shuffle_sign(a, k) < 0) dc = -dc;
      r.accumulate(k.with(axis), dc);
    }
  }
  return r;
}

/// Sum over all five labels of D_A t_K o^A ^ o^K, where D_A = d_A on coordinates
/// and D_5 multiplies by `fifth_factor` (+1 for bd, -1 for bdstar).
inline FiveForm component_derivative(const FiveForm& t, int fifth_factor) {
  FiveForm r = coordinate_derivative(t);
  const IndexSubset five = IndexSubset::of({kFifth});
  for (const auto& [k, c] : t.components()) {
    if (k.has_fifth()) continue;
    Poly term = c;
    if (fifth_factor * shuffle_sign(five, k) < 0) term = -term;
    r.accumulate(k.with(kFifth), term);
  }
  return r;
}

}  // namespace detail

/// Four-vector exterior derivative. A rank-4 input yields the zero rank-5 form.
inline FourForm d4(const FourForm& s) { return detail::coordinate_derivative(s); }

/// Five-vector exterior derivative d, with d_5 = 0 in the working basis.
inline FiveForm d5(const FiveForm& t) { return detail::coordinate_derivative(t); }

/// Bullet partial along basis label `index`: d_a f on coordinates, f itself for index 5.
inline Poly bullet_partial(const Poly& f, int index) {
  if (index == kFifth) return f;
  if (index < 0 || index > 3) throw std::out_of_range("bullet_partial: index must be one of 0,1,2,3,5");
  return f.partial(static_cast<std::size_t>(index));
}

/// Reflected bullet partial: d_a f on coordinates, -f for index 5.
inline Poly bullet_partial_reflected(const Poly& f, int index) {
  if (index == kFifth) return -f;
  return bullet_partial(f, index);
}

/// bd computed from components with the bullet partials.
inline FiveForm bd_components(const FiveForm& t) { return detail::component_derivative(t, +1); }
/// bdstar computed from components with the reflected bullet partials.
inline FiveForm bdstar_components(const FiveForm& t) { return detail::component_derivative(t, -1); }

/// Five-vector exterior derivative, bd t = d t + jhat ^ t.
inline FiveForm bd(const FiveForm& t) {
  FiveForm r = d5(t) + detail::wedge_unchecked(jhat(), t);
  assert(r == bd_components(t));
  return r;
}

/// Reflected five-vector exterior derivative, bdstar t = d t - jhat ^ t.
inline FiveForm bdstar(const FiveForm& t) {
  FiveForm r = d5(t) - detail::wedge_unchecked(jhat(), t);
  assert(r == bdstar_components(t));
  return r;
}

inline FiveForm apply(DerivOpKind op, const FiveForm& t) {
  switch (op) {
    case DerivOpKind::kD: return d5(t);
    case DerivOpKind::kBD: return bd(t);
    case DerivOpKind::kBDStar: return bdstar(t);
  }
  throw std::logic_error("unknown derivative kind");
}

/// Cone homotopy at the origin: contracts the radial field x^b d_b into the
/// form and integrates the rescaled coefficients along the ray.
/// For closed S of rank >= 1, d(homotopy(S)) = S.
inline FourForm homotopy(const FourForm& s) {
  if (s.rank() < 1) throw std::invalid_argument("homotopy: rank must be at least 1");
  FourForm t(s.rank() - 1);
  for (const auto& [k, c] : s.components()) {
    const Poly averaged = c.scale_integrate(static_cast<unsigned>(s.rank() - 1));
    int position = 0;
    for (int axis : k.indices()) {
      Poly term = coordinate(static_cast<std::size_t>(axis)) * averaged;
      if (position % 2 == 1) term = -term;
      t.accumulate(k.without(axis), term);
      ++position;
    }
  }
  return t;
}

/// Potential T with d4 T = S for a closed four-vector form of rank >= 1.
inline FourForm poincare_potential_4(const FourForm& s) {
  if (s.rank() < 1) throw std::invalid_argument("poincare_potential_4: rank must be at least 1");
  FourForm residual = d4(s);
  if (!residual.is_zero()) throw NotClosedError<FourForm>(std::move(residual));
  return homotopy(s);
}

/// Potential t with d5 t = s for a closed five-vector form.
///
/// The Z-coefficients and the E-coefficients (with the trailing 5 split
/// off) are handled by the four-vector homotopy independently. At rank 1 a
/// closed E-part is a constant multiple of jhat and has no potential; a
/// nonzero constant raises EDefectError.
inline FiveForm poincare_potential_5(const FiveForm& s) {
  const int m = s.rank();
  if (m < 1) throw std::invalid_argument("poincare_potential_5: rank must be at least 1");
  FiveForm residual = d5(s);
  if (!residual.is_zero()) throw NotClosedError<FiveForm>(std::move(residual));

  const FourForm z = project(s);
  const FourForm sigma = project(s_from_t(s));
  if (m == 1) {
    if (!sigma.is_zero()) throw EDefectError(sigma[IndexSubset{}].constant_term());
    return lift(homotopy(z));
  }
  return lift(homotopy(z)) + t_from_s(lift(homotopy(sigma)));
}

/// Potential t with bd t = s for a bd-closed form.
///
/// The Z-part is integrated with d; the E-part then differs from jhat ^ t^Z
/// by a d-closed E-form, which is integrated in turn. At rank 1 the potential
/// is unique and fixed by a constant shift; at rank 0 only the zero form is
/// closed and the zero 0-form is returned.
inline FiveForm poincare_potential_bd(const FiveForm& s) {
  const int m = s.rank();
  FiveForm residual = bd(s);
  if (!residual.is_zero()) throw NotClosedError<FiveForm>(std::move(residual));
  if (m == 0) return FiveForm(0);

  const FiveForm tz = poincare_potential_5(z_part(s));
  if (m == 1) {
    const Poly t = tz[IndexSubset{}];
    const Poly shift = s[IndexSubset::of({kFifth})] - t;
    if (!shift.is_constant()) throw std::logic_error("poincare_potential_bd: rank-1 shift is not constant");
    return FiveForm::scalar(t + shift);
  }
  const FiveForm rest = e_part(s) - detail::wedge_unchecked(jhat(), tz);
  return tz + e_part(poincare_potential_5(rest));
}

/// Derivative of f along the five-vector field u: u^a d_a f + u^5 f.
inline Poly bullet_directional(const MultiVector& u, const Poly& f) {
  if (u.rank() != 1) throw std::invalid_argument("bullet_directional: rank-1 field required");
  Poly r = u[IndexSubset::of({kFifth})] * f;
  for (int a = 0; a < 4; ++a) {
    const Poly& ua = u[IndexSubset::of({a})];
    if (!ua.is_zero()) r += ua * f.partial(static_cast<std::size_t>(a));
  }
  return r;
}

/// Coordinate commutator of five-vector fields. Every component, the fifth
/// included, is u^a d_a v^B - v^a d_a u^B; the E direction carries no
/// derivative, so constant multiples of 1 commute with everything constant.
inline MultiVector commutator(const MultiVector& u, const MultiVector& v) {
  if (u.rank() != 1 || v.rank() != 1) throw std::invalid_argument("commutator: rank-1 fields required");
  MultiVector r(1);
  for (int b : kAllIndices) {
    const IndexSubset kb = IndexSubset::of({b});
    Poly comp;
    for (int a = 0; a < 4; ++a) {
      const IndexSubset ka = IndexSubset::of({a});
      if (!u[ka].is_zero()) comp += u[ka] * v[kb].partial(static_cast<std::size_t>(a));
      if (!v[ka].is_zero()) comp -= v[ka] * u[kb].partial(static_cast<std::size_t>(a));
    }
    r.set(kb, comp);
  }
  return r;
}

/// Checks <bd t, u^v> = D_u<t,v> - D_v<t,u> - <t,[u,v]> for a 1-form t.
inline bool bracket_check(const FiveForm& t, const MultiVector& u, const MultiVector& v) {
  if (t.rank() != 1) throw std::invalid_argument("bracket_check: t must be a 1-form");
  const Poly lhs = contract(bd(t), wedge(u, v));
  const Poly rhs = bullet_directional(u, contract(t, v)) - bullet_directional(v, contract(t, u)) -
                   contract(t, commutator(u, v));
  return lhs == rhs;
}

}  // namespace fvx

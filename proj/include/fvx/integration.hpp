#pragma once

/// @file integration.hpp
/// Exact integration of forms over polynomial parametrized surfaces on
/// rational parameter boxes, boundary fluxes, the Stokes and integration by
/// parts identities, and tangent-frame equivalence of parametrizations.
///
/// A surface of dimension m is a map from the box prod [a_k, b_k] into the
/// coordinate patch given by four polynomials in l1..lm. Every pullback is a
/// polynomial, so every integral below is an exact rational.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fvx/calculus.hpp"
#include "fvx/forms.hpp"
#include "fvx/indexed_array.hpp"
#include "fvx/polynomial.hpp"

namespace fvx {

using Interval = std::pair<Rational, Rational>;

class ParamSurface {
 public:
  /// Dimension 0 is a single point; it arises as a face of a curve.
  ParamSurface(int dim, std::array<Poly, 4> map, std::vector<Interval> box)
      : dim_(dim), map_(std::move(map)), box_(std::move(box)) {
    if (dim_ < 0 || dim_ > 4) throw std::invalid_argument("surface dimension must be 0..4");
    if (box_.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("box must have one interval per parameter");
    for (const auto& [a, b] : box_)
      if (!(a < b)) throw std::invalid_argument("box bounds must satisfy a < b");
    for (const auto& p : map_)
      if (!p.uses_only_first(static_cast<std::size_t>(dim_)))
        throw std::invalid_argument("surface map uses a parameter beyond its dimension");
  }

  /// The coordinate embedding (l1..lm) -> (l1,..,lm,0,..) over the given box.
  static ParamSurface coordinate_box(std::vector<Interval> box) {
    const int m = static_cast<int>(box.size());
    std::array<Poly, 4> map{};
    for (int i = 0; i < m; ++i) map[i] = Poly::variable(static_cast<std::size_t>(i));
    return ParamSurface(m, std::move(map), std::move(box));
  }

  static ParamSurface unit_cube(int m) { return coordinate_box(std::vector<Interval>(m, {Rational(0), Rational(1)})); }

  int dim() const { return dim_; }
  const std::array<Poly, 4>& map() const { return map_; }
  const std::vector<Interval>& box() const { return box_; }

  bool contains(std::span<const Rational> params) const {
    if (params.size() != box_.size()) return false;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] < box_[i].first || params[i] > box_[i].second) return false;
    return true;
  }

  std::array<Rational, 4> image(std::span<const Rational> params) const {
    if (params.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("wrong number of parameters");
    std::array<Rational, 4> x;
    for (int a = 0; a < 4; ++a) x[a] = map_[a].evaluate(params);
    return x;
  }

  /// The face with parameter `param` pinned at its low or high bound.
  ParamSurface face(int param, bool high) const {
    if (param < 0 || param >= dim_) throw std::out_of_range("face: parameter index out of range");
    std::array<Poly, 4> images{};
    for (int j = 0; j < dim_; ++j) {
      if (j < param) images[j] = Poly::variable(static_cast<std::size_t>(j));
      if (j == param) images[j] = Poly(high ? box_[j].second : box_[j].first);
      if (j > param) images[j] = Poly::variable(static_cast<std::size_t>(j - 1));
    }
    std::array<Poly, 4> new_map;
    for (int a = 0; a < 4; ++a) new_map[a] = compose(map_[a], images);
    std::vector<Interval> new_box;
    for (int j = 0; j < dim_; ++j)
      if (j != param) new_box.push_back(box_[j]);
    return ParamSurface(dim_ - 1, std::move(new_map), std::move(new_box));
  }

  /// This surface precomposed with a change of parameters. `params` gives the
  /// old parameters as polynomials in the new ones, which range over `new_box`.
  ParamSurface reparametrize(const std::array<Poly, 4>& params, std::vector<Interval> new_box) const {
    std::array<Poly, 4> new_map;
    for (int a = 0; a < 4; ++a) new_map[a] = compose(map_[a], params);
    const int dim = static_cast<int>(new_box.size());
    return ParamSurface(dim, std::move(new_map), std::move(new_box));
  }

 private:
  int dim_;
  std::array<Poly, 4> map_;
  std::vector<Interval> box_;
};

/// Boundary face with its induced orientation: +1 for the high end of
/// parameter k (0-based) when k is even, alternating with k, reversed at the low end.
struct OrientedFace {
  ParamSurface surface;
  int param;
  bool high;
  int sign;
};

inline std::vector<OrientedFace> boundary_faces(const ParamSurface& v) {
  std::vector<OrientedFace> faces;
  for (int k = 0; k < v.dim(); ++k) {
    const int high_sign = (k % 2 == 0) ? 1 : -1;
    faces.push_back({v.face(k, false), k, false, -high_sign});
    faces.push_back({v.face(k, true), k, true, high_sign});
  }
  return faces;
}

// -- exact linear algebra on small rational matrices --

namespace detail {

using Matrix = std::vector<std::vector<Rational>>;

/// Row-reduces in place and returns the rank.
inline int row_reduce(Matrix& m, std::size_t pivot_cols) {
  int rank = 0;
  const std::size_t rows = m.size();
  for (std::size_t col = 0; col < pivot_cols && static_cast<std::size_t>(rank) < rows; ++col) {
    std::size_t pivot = static_cast<std::size_t>(rank);
    while (pivot < rows && sgn(m[pivot][col]) == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[static_cast<std::size_t>(rank)]);
    auto& prow = m[static_cast<std::size_t>(rank)];
    const Rational inv = 1 / prow[col];
    for (auto& x : prow) x *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == static_cast<std::size_t>(rank) || sgn(m[r][col]) == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t c = 0; c < prow.size(); ++c) m[r][c] -= f * prow[c];
    }
    ++rank;
  }
  return rank;
}

inline Rational determinant(Matrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(m[pivot][col]) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (sgn(m[r][col]) == 0) continue;
      const Rational f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace detail

// -- tangent frames --

/// Tangent five-vectors at one parameter point: the Jacobian columns with
/// the parameter value as fifth component.
struct TangentFrame {
  std::vector<MultiVector> vectors;

  /// m x 4 matrix of the Z-parts.
  detail::Matrix z_matrix() const {
    detail::Matrix rows;
    for (const auto& u : vectors) {
      std::vector<Rational> row(4);
      for (int a = 0; a < 4; ++a) row[a] = u[IndexSubset::of({a})].constant_term();
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::vector<Rational> parameter_values() const {
    std::vector<Rational> out;
    for (const auto& u : vectors) out.push_back(u[IndexSubset::of({kFifth})].constant_term());
    return out;
  }

  bool degenerate() const {
    detail::Matrix m = z_matrix();
    return detail::row_reduce(m, 4) < static_cast<int>(vectors.size());
  }
};

/// Tangent fields with polynomial components in the parameters.
inline std::vector<MultiVector> frame_fields(const ParamSurface& v) {
  std::vector<MultiVector> fields;
  for (int k = 0; k < v.dim(); ++k) {
    MultiVector u(1);
    for (int a = 0; a < 4; ++a) u.set(IndexSubset::of({a}), v.map()[a].partial(static_cast<std::size_t>(k)));
    u.set(IndexSubset::of({kFifth}), Poly::variable(static_cast<std::size_t>(k)));
    fields.push_back(std::move(u));
  }
  return fields;
}

inline TangentFrame tangent_frame(const ParamSurface& v, std::span<const Rational> point) {
  if (!v.contains(point)) throw std::invalid_argument("tangent_frame: point outside the parameter box");
  TangentFrame frame;
  for (const auto& field : frame_fields(v))
    frame.vectors.push_back(field.map([&](const Poly& p) { return Poly(p.evaluate(point)); }));
  return frame;
}

struct SurfaceMultivector {
  MultiVector value;
  bool degenerate;
};

/// Wedge of the Z-parts of the tangent frame at `point`.
inline SurfaceMultivector surface_multivector(const ParamSurface& v, std::span<const Rational> point) {
  const TangentFrame frame = tangent_frame(v, point);
  MultiVector w = MultiVector::scalar(Poly(1));
  for (const auto& u : frame.vectors) w = wedge(w, z_part(u));
  return {w, frame.degenerate()};
}

enum class Relation {
  kSameDirection,    // Jacobians related by a matrix of positive determinant
  kSameMultivector,  // ... of unit determinant
  kSameRates,        // equal Jacobian columns
  kSameRatesAndParameters,
};

/// Compares two parametrizations through the same image point.
inline bool equivalence_check(const ParamSurface& a, const ParamSurface& b, std::span<const Rational> pa,
                              std::span<const Rational> pb, Relation relation) {
  if (a.dim() != b.dim()) throw std::invalid_argument("equivalence_check: surfaces differ in dimension");
  if (a.image(pa) != b.image(pb)) throw std::invalid_argument("equivalence_check: points have different images");
  const TangentFrame fa = tangent_frame(a, pa);
  const TangentFrame fb = tangent_frame(b, pb);
  if (fa.degenerate() || fb.degenerate()) throw std::invalid_argument("equivalence_check: degenerate frame");
  const std::size_t m = static_cast<std::size_t>(a.dim());

  switch (relation) {
    case Relation::kSameRates:
      return fa.z_matrix() == fb.z_matrix();
    case Relation::kSameRatesAndParameters:
      return fa.z_matrix() == fb.z_matrix() && fa.parameter_values() == fb.parameter_values();
    case Relation::kSameDirection:
    case Relation::kSameMultivector: {
      // Solve U_a^(k) = sum_l c_kl U_b^(l): the 4 x m system B X = A, X = c^T.
      const detail::Matrix za = fa.z_matrix();
      const detail::Matrix zb = fb.z_matrix();
      detail::Matrix aug(4, std::vector<Rational>(2 * m));
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < m; ++c) {
          aug[r][c] = zb[c][r];
          aug[r][m + c] = za[c][r];
        }
      detail::row_reduce(aug, m);
      for (std::size_t r = m; r < 4; ++r)
        for (std::size_t c = m; c < 2 * m; ++c)
          if (sgn(aug[r][c]) != 0) return false;  // not in the same direction
      detail::Matrix x(m, std::vector<Rational>(m));
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) x[r][c] = aug[r][m + c];
      const Rational det = detail::determinant(x);
      return relation == Relation::kSameDirection ? sgn(det) > 0 : det == 1;
    }
  }
  throw std::logic_error("unknown relation");
}

// -- integrals --

namespace detail {

inline FiveForm pull_coefficients(const FiveForm& form, const ParamSurface& v) {
  return form.map([&](const Poly& c) { return compose(c, v.map()); });
}

inline Rational integrate_density(const Poly& density, const ParamSurface& v) {
  return integrate_over_box(density, std::span<const Interval>(v.box()));
}

}  // namespace detail

/// Integral of a rank-m form over an m-surface; sees only the Z-part.
inline Rational integrate_m(const FiveForm& form, const ParamSurface& v) {
  if (form.rank() != v.dim())
    throw std::invalid_argument("integrate_m: form rank " + std::to_string(form.rank()) +
                                " does not match surface dimension " + std::to_string(v.dim()));
  MultiVector w = MultiVector::scalar(Poly(1));
  for (const auto& u : frame_fields(v)) w = wedge(w, z_part(u));
  return detail::integrate_density(contract(detail::pull_coefficients(form, v), w), v);
}

/// Integral of a rank-(m+1) form over an m-surface regarded as a degenerate
/// (m+1)-volume with multivector u1^...^um^1; sees only the E-part.
inline Rational integrate_deg(const FiveForm& form, const ParamSurface& v) {
  if (form.rank() != v.dim() + 1)
    throw std::invalid_argument("integrate_deg: form rank " + std::to_string(form.rank()) +
                                " must exceed surface dimension " + std::to_string(v.dim()) + " by one");
  MultiVector w = MultiVector::scalar(Poly(1));
  for (const auto& u : frame_fields(v)) w = wedge(w, u);
  w = wedge(w, unit_one());
  return detail::integrate_density(contract(detail::pull_coefficients(form, v), w), v);
}

/// Integral over `v` of a form whose rank equals dim or dim+1.
inline Rational integral(const FiveForm& form, const ParamSurface& v) {
  if (form.rank() == v.dim()) return integrate_m(form, v);
  if (form.rank() == v.dim() + 1) return integrate_deg(form, v);
  throw std::invalid_argument("integral: form rank " + std::to_string(form.rank()) + " incompatible with dimension " +
                              std::to_string(v.dim()));
}

/// Four-vector integral from Jacobian minors, independent of the five-vector machinery.
inline Rational integrate_four(const FourForm& form, const ParamSurface& v) {
  const int m = v.dim();
  if (form.rank() != m) throw std::invalid_argument("integrate_four: rank/dimension mismatch");
  Poly density;
  for (const auto& [k, c] : form.components()) {
    const std::vector<int> rows = k.indices();
    // Leibniz expansion of the minor det(d x^{rows[i]} / d l_j).
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) perm[i] = i;
    Poly minor;
    do {
      Poly term(permutation_sign(perm));
      for (int i = 0; i < m && !term.is_zero(); ++i)
        term = term * v.map()[rows[i]].partial(static_cast<std::size_t>(perm[i]));
      minor += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (minor.is_zero()) continue;
    density += compose(c, v.map()) * minor;
  }
  return detail::integrate_density(density, v);
}

/// Sum of the oriented integrals over the 2*dim boundary faces.
inline Rational boundary_flux(const FiveForm& form, const ParamSurface& v) {
  if (form.rank() != v.dim() - 1 && form.rank() != v.dim())
    throw std::invalid_argument("boundary_flux: form rank must be dim-1 or dim");
  Rational total = 0;
  for (const auto& face : boundary_faces(v)) {
    const Rational value = integral(form, face.surface);
    if (face.sign > 0) {
      total += value;
    } else {
      total -= value;
    }
  }
  return total;
}

inline Rational boundary_flux_four(const FourForm& form, const ParamSurface& v) {
  Rational total = 0;
  for (const auto& face : boundary_faces(v)) {
    const Rational value = integrate_four(form, face.surface);
    if (face.sign > 0) {
      total += value;
    } else {
      total -= value;
    }
  }
  return total;
}

/// Which Stokes identity: the form's rank equals the dimension of the
/// boundary it is integrated over, or exceeds it by one.
enum class StokesVariant { kRankEqualsDim, kRankExceedsDim };

struct IdentitySides {
  Rational lhs;
  Rational rhs;
  bool holds() const { return lhs == rhs; }
};

/// Boundary flux (lhs) against the interior integral of d5 (rhs).
inline IdentitySides stokes_check(const FiveForm& form, const ParamSurface& v, StokesVariant variant) {
  const int expected = variant == StokesVariant::kRankEqualsDim ? v.dim() - 1 : v.dim();
  if (form.rank() != expected) throw std::invalid_argument("stokes_check: rank inconsistent with the chosen variant");
  if (v.dim() < 1) throw std::invalid_argument("stokes_check: surface must have dimension >= 1");
  return {boundary_flux(form, v), integral(d5(form), v)};
}

/// Four-vector Stokes identity computed entirely with four-vector forms.
inline IdentitySides stokes_check_four(const FourForm& form, const ParamSurface& v) {
  if (form.rank() != v.dim() - 1) throw std::invalid_argument("stokes_check_four: rank must be dim-1");
  return {boundary_flux_four(form, v), integrate_four(d4(form), v)};
}

/// Five-vector flux of a rank-m form through an m-volume: boundary flux plus
/// (-1)^m times the interior integral of the form itself.
inline Rational five_flux(const FiveForm& form, const ParamSurface& v) {
  if (form.rank() != v.dim()) throw std::invalid_argument("five_flux: rank must equal dimension");
  Rational interior = integrate_m(form, v);
  if (v.dim() % 2 == 1) interior = -interior;
  return boundary_flux(form, v) + interior;
}

/// Integral of bd(form) over the volume (lhs) against five_flux (rhs).
inline IdentitySides five_flux_check(const FiveForm& form, const ParamSurface& v) {
  if (form.rank() != v.dim()) throw std::invalid_argument("five_flux: rank must equal dimension");
  return {integrate_deg(bd(form), v), five_flux(form, v)};
}

enum class ByPartsFlavor { kD, kBDWithStar, kStarWithBD };

/// Integration by parts: int D1 s ^ t = flux(s ^ t) - (-1)^m int s ^ D2 t,
/// with (D1, D2) = (d, d), (bd, bdstar) or (bdstar, bd); m = rank(s).
inline IdentitySides by_parts_check(const FiveForm& s, const FiveForm& t, const ParamSurface& v, ByPartsFlavor flavor) {
  const int r = s.rank() + t.rank();
  if (r > 4) throw std::invalid_argument("by_parts_check: combined rank must be at most 4");
  if (v.dim() != r + 1 && v.dim() != r) throw std::invalid_argument("by_parts_check: dimension must be rank or rank+1");
  DerivOpKind first = DerivOpKind::kD;
  DerivOpKind second = DerivOpKind::kD;
  if (flavor == ByPartsFlavor::kBDWithStar) {
    first = DerivOpKind::kBD;
    second = DerivOpKind::kBDStar;
  } else if (flavor == ByPartsFlavor::kStarWithBD) {
    first = DerivOpKind::kBDStar;
    second = DerivOpKind::kBD;
  }
  const Rational lhs = integral(wedge(apply(first, s), t), v);
  Rational inner = integral(wedge(s, apply(second, t)), v);
  if (s.rank() % 2 == 1) inner = -inner;
  return {lhs, boundary_flux(wedge(s, t), v) - inner};
}

/// The term of a curve integral that sees the E-component of the tangent
/// five-vector, u^E = l * 1. It depends on the parametrization.
inline Rational non_invariant_term(const FiveForm& form, const ParamSurface& curve) {
  if (curve.dim() != 1 || form.rank() != 1) throw std::invalid_argument("non_invariant_term: needs a 1-form and a curve");
  const Poly along_one = compose(form[IndexSubset::of({kFifth})], curve.map());
  return integrate_over_box(along_one * Poly::variable(0), std::span<const Interval>(curve.box()));
}

}  // namespace fvx

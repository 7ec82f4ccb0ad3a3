#pragma once

/// @file random.hpp
/// Seeded generators for small exact instances: rationals with numerator and
/// denominator bounded by 9, sparse polynomials of bounded degree, forms,
/// multivector fields, surfaces, metrics and Lagrangians.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fvx/forms.hpp"
#include "fvx/integration.hpp"
#include "fvx/lagrange.hpp"
#include "fvx/metric_dual.hpp"
#include "fvx/polynomial.hpp"

namespace fvx {

using Rng = std::mt19937_64;

struct RandomOptions {
  int max_degree = 3;
  int max_terms = 3;
};

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline Rational random_rational(Rng& rng, bool nonzero = true) {
  int num = 0;
  do {
    num = uniform_int(rng, -9, 9);
  } while (nonzero && num == 0);
  return make_rational(num, uniform_int(rng, 1, 9));
}

/// Sparse polynomial in the first `vars` variables.
template <std::size_t N = 4>
Polynomial<N> random_polynomial(Rng& rng, const RandomOptions& opt, std::size_t vars = N) {
  Polynomial<N> p;
  const int terms = uniform_int(rng, 1, opt.max_terms);
  for (int t = 0; t < terms; ++t) {
    typename Polynomial<N>::Key key{};
    const int degree = uniform_int(rng, 0, opt.max_degree);
    for (int d = 0; d < degree; ++d) ++key[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(vars) - 1))];
    p.add_term(key, random_rational(rng));
  }
  return p;
}

inline Poly random_poly(Rng& rng, const RandomOptions& opt) { return random_polynomial<4>(rng, opt); }

/// Each component present with probability 1/2; at least one present when the rank admits any.
template <int Dim, Variance V>
Graded<Dim, V> random_graded(Rng& rng, int rank, const RandomOptions& opt) {
  Graded<Dim, V> g(rank);
  if (rank > Dim) return g;
  const auto keys = subsets_of_size(Dim, rank);
  for (IndexSubset k : keys)
    if (coin(rng)) g.set(k, random_poly(rng, opt));
  if (g.is_zero()) g.set(keys[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(keys.size()) - 1))],
                         random_poly(rng, opt));
  return g;
}

inline FiveForm random_five_form(Rng& rng, int rank, const RandomOptions& opt) {
  return random_graded<5, Variance::kCovariant>(rng, rank, opt);
}
inline FourForm random_four_form(Rng& rng, int rank, const RandomOptions& opt) {
  return random_graded<4, Variance::kCovariant>(rng, rank, opt);
}
inline MultiVector random_multivector(Rng& rng, int rank, const RandomOptions& opt) {
  return random_graded<5, Variance::kContravariant>(rng, rank, opt);
}

/// A random E-free form.
inline FiveForm random_z_form(Rng& rng, int rank, const RandomOptions& opt) {
  return lift(random_four_form(rng, rank, opt));
}

/// Polynomial surface of dimension m with a random box of width 1/2, 1 or 2.
inline ParamSurface random_surface(Rng& rng, int m, const RandomOptions& opt) {
  std::array<Poly, 4> map{};
  if (m > 0)
    for (auto& p : map) p = random_polynomial<4>(rng, opt, static_cast<std::size_t>(m));
  std::vector<Interval> box;
  static const int kWidths[3][2] = {{1, 2}, {1, 1}, {2, 1}};
  for (int k = 0; k < m; ++k) {
    const Rational a = make_rational(uniform_int(rng, -2, 2), uniform_int(rng, 1, 2));
    const auto& w = kWidths[uniform_int(rng, 0, 2)];
    box.emplace_back(a, a + make_rational(w[0], w[1]));
  }
  if (m == 0) map = {Poly(random_rational(rng)), Poly(random_rational(rng)), Poly(random_rational(rng)), Poly(random_rational(rng))};
  return ParamSurface(m, std::move(map), std::move(box));
}

/// Orientation-preserving affine bijection of the box onto a new random box,
/// expressed as old parameters in terms of new ones: l_k = a_k + c_k (l'_k - a'_k).
inline std::pair<std::array<Poly, 4>, std::vector<Interval>> random_affine_reparametrization(Rng& rng,
                                                                                            const ParamSurface& v) {
  std::array<Poly, 4> params{};
  std::vector<Interval> new_box;
  for (int k = 0; k < v.dim(); ++k) {
    const auto& [a, b] = v.box()[static_cast<std::size_t>(k)];
    const Rational a2 = make_rational(uniform_int(rng, -3, 3), uniform_int(rng, 1, 3));
    const Rational width2 = make_rational(uniform_int(rng, 1, 4), uniform_int(rng, 1, 3));
    const Rational scale = (b - a) / width2;
    params[k] = Poly(Rational(a - scale * a2)) + Poly::variable(static_cast<std::size_t>(k)) * Poly(scale);
    new_box.emplace_back(a2, a2 + width2);
  }
  return {params, new_box};
}

/// A metric whose normalization is rational: a permutation of
/// (+,-,-,-) with entries scaled by rational squares, and xi a signed rational square.
inline MetricConfig random_metric(Rng& rng, int xi_sign = 0) {
  MetricConfig cfg;
  const int time_axis = uniform_int(rng, 0, 3);
  for (int a = 0; a < 4; ++a) {
    const Rational r = make_rational(uniform_int(rng, 1, 3), uniform_int(rng, 1, 3));
    cfg.g[a] = (a == time_axis ? Rational(1) : Rational(-1)) * r * r;
  }
  const Rational x = make_rational(uniform_int(rng, 1, 3), uniform_int(rng, 1, 3));
  if (xi_sign == 0) xi_sign = coin(rng) ? 1 : -1;
  cfg.xi = Rational(xi_sign) * x * x;
  cfg.sigma = make_rational(uniform_int(rng, 1, 3), uniform_int(rng, 1, 2));
  cfg.eta = coin(rng) ? 1 : -1;
  return cfg;
}

/// Random single-field Lagrangian of degree <= opt.max_degree in the jet
/// variables; without p_5 dependence when `with_field` is false.
inline LagrangianSpec random_lagrangian(Rng& rng, const RandomOptions& opt, bool with_field = true) {
  LagrangianSpec spec;
  spec.n_fields = 1;
  const std::size_t vars = with_field ? 5 : 4;
  spec.density = random_polynomial<5 * kMaxFields>(rng, opt, vars);
  return spec;
}

/// Affine field a + b_mu x^mu.
inline Poly random_linear_field(Rng& rng) {
  Poly p(random_rational(rng, false));
  for (std::size_t a = 0; a < 4; ++a)
    if (coin(rng)) p += Poly::variable(a) * Poly(random_rational(rng));
  return p;
}

/// Sum of products of distinct coordinates; annihilated by every diagonal wave operator.
inline Poly random_multilinear_field(Rng& rng, const RandomOptions& opt) {
  Poly p;
  const int terms = uniform_int(rng, 1, opt.max_terms);
  for (int t = 0; t < terms; ++t) {
    Poly::Key key{};
    const int degree = uniform_int(rng, 1, std::min(opt.max_degree, 4));
    int placed = 0;
    while (placed < degree) {
      const int a = uniform_int(rng, 0, 3);
      if (key[static_cast<std::size_t>(a)] == 0) {
        key[static_cast<std::size_t>(a)] = 1;
        ++placed;
      }
    }
    p.add_term(key, random_rational(rng));
  }
  return p;
}

}  // namespace fvx

#pragma once

/// @file metric_dual.hpp
/// Five-vector metric h, the Levi-Civita tensor, permutation tensors, the maps
/// theta_epsilon and theta_h, and dual forms.
///
/// The metric is diagonal in the working basis: h_aa = g_a on coordinates and
/// h_55 = xi / sigma^2 for the unit five-vector 1, so that
/// eps_01235 = eta |g|^{1/2} |xi|^{1/2} / sigma (passive convention).

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fvx/forms.hpp"
#include "fvx/indexed_array.hpp"

namespace fvx {

struct MetricConfig {
  std::array<Rational, 4> g{Rational(1), Rational(-1), Rational(-1), Rational(-1)};
  Rational xi = -1;
  Rational sigma = 1;
  int eta = 1;

  /// Throws std::invalid_argument for malformed constants and
  /// std::domain_error("non-rational normalization") when |g| or |xi| is not a rational square.
  void validate() const {
    for (const auto& ga : g)
      if (sgn(ga) == 0) throw std::invalid_argument("metric: g entries must be nonzero");
    if (sgn(xi) == 0) throw std::invalid_argument("metric: xi must be nonzero");
    if (sgn(sigma) <= 0) throw std::invalid_argument("metric: sigma must be positive");
    if (eta != 1 && eta != -1) throw std::invalid_argument("metric: eta must be +1 or -1");
    if (!is_perfect_square(abs(det_g())) || !is_perfect_square(abs(xi)))
      throw std::domain_error("non-rational normalization");
  }

  Rational det_g() const { return g[0] * g[1] * g[2] * g[3]; }
  Rational h55() const { return xi / (sigma * sigma); }
  Rational det_h() const { return det_g() * h55(); }

  /// Diagonal entry h_AA for A in {0,1,2,3,5}.
  Rational h(int index) const { return index == kFifth ? h55() : g[bit_of_index(index)]; }

  /// kappa = |xi|^{1/2}, the active-basis constant.
  Rational kappa() const { return exact_sqrt(abs(xi)); }
  /// varpi = |xi|^{1/2} / sigma, the passive-basis constant.
  Rational varpi() const { return kappa() / sigma; }

  /// Product of h_AA over the members of `k`.
  Rational h_product(IndexSubset k) const {
    Rational p = 1;
    for (int i : k.indices()) p *= h(i);
    return p;
  }
};

/// A totally antisymmetric rank-5 tensor, determined by its 01235 component.
class EpsilonTensor {
 public:
  explicit EpsilonTensor(Rational top) : top_(std::move(top)) {}

  const Rational& top() const { return top_; }

  /// Component for a tuple of five labels from {0,1,2,3,5}.
  Rational at(std::span<const int> labels) const {
    const int s = symbol(labels);
    if (s == 0) return 0;
    return s > 0 ? top_ : Rational(-top_);
  }
  Rational at(std::initializer_list<int> labels) const { return at(std::span<const int>(labels.begin(), labels.size())); }

  /// Sign of the permutation of (0,1,2,3,5) given by `labels`, or 0 on a repeat.
  static int symbol(std::span<const int> labels) {
    if (labels.size() != 5) throw std::invalid_argument("epsilon: five indices required");
    std::array<int, 5> bits{};
    unsigned seen = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      bits[i] = bit_of_index(labels[i]);
      if (seen & (1u << bits[i])) return 0;
      seen |= 1u << bits[i];
    }
    return permutation_sign(std::span<const int>(bits));
  }

  IndexedArray<Rational> to_array() const {
    IndexedArray<Rational> a(5, {0, 1, 2, 3, 5});
    for (std::size_t i = 0; i < a.size(); ++i) a.flat(i) = at(a.tuple_at(i));
    return a;
  }

 private:
  Rational top_;
};

inline EpsilonTensor epsilon_lower(const MetricConfig& cfg) {
  cfg.validate();
  return EpsilonTensor(Rational(cfg.eta) * exact_sqrt(abs(cfg.det_h())));
}

/// Upper components from raising all five indices with the inverse metric.
inline EpsilonTensor epsilon_upper(const MetricConfig& cfg) {
  return EpsilonTensor(epsilon_lower(cfg).top() / cfg.det_h());
}

/// The 5-form with components eps_ABCDE.
inline FiveForm epsilon_form(const MetricConfig& cfg) { return volume5() * epsilon_lower(cfg).top(); }

/// Generalized Kronecker delta delta^{A1..Am}_{B1..Bm}: +-1 when B is a
/// permutation of the distinct labels A, with the sign of that permutation.
inline int permutation_delta(std::span<const int> upper, std::span<const int> lower) {
  if (upper.size() != lower.size()) throw std::invalid_argument("permutation_delta: arity mismatch");
  const std::size_t m = upper.size();
  std::vector<int> perm(m);
  unsigned used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = 0;
    while (j < m && upper[j] != lower[i]) ++j;
    if (j == m || (used & (1u << j))) return 0;
    used |= 1u << j;
    perm[i] = static_cast<int>(j);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (upper[i] == upper[j]) return 0;
  return permutation_sign(std::span<const int>(perm));
}

/// The constant c in eps^{A..C..} eps_{B..C..} = c (5-m)! delta^{A..}_{B..}.
/// It is sign(det h), which equals -sign(xi) for a metric g of Lorentzian signature.
inline int contraction_sign(const MetricConfig& cfg) { return sgn(cfg.det_h()); }

/// Checks the epsilon contraction identity over m free index pairs for every
/// entry, comparing against -(5-m)! sign(xi) delta.
inline bool epsilon_contraction_check(int m, const MetricConfig& cfg) {
  if (m < 0 || m > 5) throw std::invalid_argument("epsilon_contraction_check: m must be 0..5");
  const EpsilonTensor lo = epsilon_lower(cfg);
  const EpsilonTensor up = epsilon_upper(cfg);
  // The product of any two nonzero entries is (sign) * lo.top * up.top, so the
  // identity reduces to an integer identity on Levi-Civita symbols.
  const Rational scale = lo.top() * up.top();
  const Rational expected = Rational(-sgn(cfg.xi) * factorial(5 - m));
  const Rational ratio = expected / scale;
  if (ratio.get_den() != 1 || !ratio.get_num().fits_slong_p()) return false;
  const long r = ratio.get_num().get_si();

  // Symbol of every 5-tuple, flattened in base 5 over label positions.
  std::array<int, 3125> sym{};
  std::array<int, 5> t{};
  for (int i = 0; i < 3125; ++i) {
    int v = i;
    for (int s = 4; s >= 0; --s) {
      t[s] = kAllIndices[v % 5];
      v /= 5;
    }
    sym[i] = EpsilonTensor::symbol(std::span<const int>(t));
  }

  int free_count = 1;
  for (int i = 0; i < m; ++i) free_count *= 5;
  int bound_count = 1;
  for (int i = m; i < 5; ++i) bound_count *= 5;

  std::vector<int> a(m), b(m);
  auto decode = [&](int code, std::vector<int>& out) {
    for (int s = m - 1; s >= 0; --s) {
      out[s] = kAllIndices[code % 5];
      code /= 5;
    }
  };
  for (int ai = 0; ai < free_count; ++ai) {
    decode(ai, a);
    for (int bi = 0; bi < free_count; ++bi) {
      decode(bi, b);
      long sum = 0;
      for (int c = 0; c < bound_count; ++c) sum += sym[ai * bound_count + c] * sym[bi * bound_count + c];
      const long delta = permutation_delta(std::span<const int>(a), std::span<const int>(b));
      if (sum != r * delta) return false;
    }
  }
  return true;
}

/// (m!)^-1 w^{B..} eps_{B..A..}: a rank-m multivector to a rank-(5-m) form.
inline FiveForm theta_epsilon(const MultiVector& w, const MetricConfig& cfg) {
  if (w.rank() > 5) throw std::invalid_argument("theta_epsilon: rank exceeds 5");
  const Rational top = epsilon_lower(cfg).top();
  const IndexSubset all = IndexSubset::from_mask(0b11111);
  FiveForm r(5 - w.rank());
  for (const auto& [b, c] : w.components()) {
    const IndexSubset a = IndexSubset::from_mask(static_cast<std::uint8_t>(all.mask() & ~b.mask()));
    const Rational f = shuffle_sign(b, a) > 0 ? top : Rational(-top);
    r.set(a, c * f);
  }
  return r;
}

/// Index lowering with h.
inline FiveForm theta_h(const MultiVector& w, const MetricConfig& cfg) {
  FiveForm r(w.rank());
  for (const auto& [k, c] : w.components()) r.set(k, c * cfg.h_product(k));
  return r;
}

/// Index raising with the inverse of h.
inline MultiVector theta_h_inverse(const FiveForm& t, const MetricConfig& cfg) {
  MultiVector r(t.rank());
  for (const auto& [k, c] : t.components()) r.set(k, c * (1 / cfg.h_product(k)));
  return r;
}

/// Dual form: theta_epsilon after raising every index.
inline FiveForm dual(const FiveForm& w, const MetricConfig& cfg) {
  if (w.rank() > 5) throw std::invalid_argument("dual: rank exceeds 5");
  return theta_epsilon(theta_h_inverse(w, cfg), cfg);
}

/// h(s, t) = s_{|A..|} t^{A..}.
inline Poly inner_product(const FiveForm& s, const FiveForm& t, const MetricConfig& cfg) {
  return contract(s, theta_h_inverse(t, cfg));
}

/// The E-free 2-form obtained from the E-part of dual(w) by splitting off jhat,
/// normalized by 1/varpi so it reproduces the four-vector dual of project(w).
inline FiveForm dual2_zfree(const FiveForm& w, const MetricConfig& cfg) {
  if (w.rank() != 2) throw std::invalid_argument("dual2_zfree: rank must be 2");
  if (!e_part(w).is_zero()) throw std::invalid_argument("dual2_zfree: input has a nonzero E-part");
  return s_from_t(dual(w, cfg)) * (1 / cfg.varpi());
}

}  // namespace fvx

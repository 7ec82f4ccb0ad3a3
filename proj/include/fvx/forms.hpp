#pragma once

/// @file forms.hpp
/// Forms and multivectors over V5 = Z + E in a passive regular coordinate basis.
///
/// Index alphabet is {0,1,2,3,5}: 0..3 are the coordinate directions and 5
/// labels the E direction. A rank-m element stores only its independent
/// components, one per strictly increasing index subset of length m; the
/// full antisymmetric array is never materialized.
///
/// Convention fixed throughout: the fifth basis 1-form is the distinguished
/// form jhat = o^5 and the fifth basis vector e_5 is the unit five-vector 1,
/// so <jhat, 1> = 1.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fvx/polynomial.hpp"

namespace fvx {

/// The index label of the E direction.
inline constexpr int kFifth = 5;
inline constexpr int kAllIndices[5] = {0, 1, 2, 3, 5};

constexpr int bit_of_index(int index) {
  if (index >= 0 && index <= 3) return index;
  if (index == kFifth) return 4;
  throw std::out_of_range("index must be one of 0,1,2,3,5");
}
constexpr int index_of_bit(int bit) { return bit == 4 ? kFifth : bit; }

/// Strictly increasing subset of {0,1,2,3,5}, stored as a 5-bit mask
/// (bit 4 stands for index 5).
class IndexSubset {
 public:
  constexpr IndexSubset() = default;

  static constexpr IndexSubset from_mask(std::uint8_t mask) {
    if (mask >= 32) throw std::out_of_range("index mask out of range");
    IndexSubset s;
    s.mask_ = mask;
    return s;
  }

  /// Builds from distinct indices given in any order.
  static IndexSubset of(std::initializer_list<int> indices) {
    IndexSubset s;
    for (int i : indices) {
      const auto b = static_cast<std::uint8_t>(1u << bit_of_index(i));
      if (s.mask_ & b) throw std::invalid_argument("repeated index in subset");
      s.mask_ |= b;
    }
    return s;
  }

  /// Parses a digit string such as "015"; digits must strictly increase and 4 is forbidden.
  static IndexSubset parse(std::string_view digits) {
    IndexSubset s;
    int last = -1;
    for (char c : digits) {
      if (c < '0' || c > '9') throw std::invalid_argument("index key must be digits: '" + std::string(digits) + "'");
      const int i = c - '0';
      if (i == 4 || i > kFifth)
        throw std::invalid_argument("index key digit must be one of 0,1,2,3,5: '" + std::string(digits) + "'");
      if (i <= last) throw std::invalid_argument("index key must be strictly increasing: '" + std::string(digits) + "'");
      last = i;
      s.mask_ |= static_cast<std::uint8_t>(1u << bit_of_index(i));
    }
    return s;
  }

  constexpr std::uint8_t mask() const { return mask_; }
  constexpr int size() const { return std::popcount(static_cast<unsigned>(mask_)); }
  constexpr bool contains(int index) const { return (mask_ >> bit_of_index(index)) & 1u; }
  constexpr bool has_fifth() const { return (mask_ >> 4) & 1u; }
  constexpr bool disjoint(IndexSubset o) const { return (mask_ & o.mask_) == 0; }

  constexpr IndexSubset with(int index) const {
    return from_mask(static_cast<std::uint8_t>(mask_ | (1u << bit_of_index(index))));
  }
  constexpr IndexSubset without(int index) const {
    return from_mask(static_cast<std::uint8_t>(mask_ & ~(1u << bit_of_index(index))));
  }
  constexpr IndexSubset united(IndexSubset o) const { return from_mask(mask_ | o.mask_); }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (int b = 0; b < 5; ++b)
      if ((mask_ >> b) & 1u) out.push_back(index_of_bit(b));
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (int i : indices()) s += static_cast<char>('0' + i);
    return s;
  }

  /// Position of `index` within the increasing list (number of smaller members).
  constexpr int position(int index) const {
    const unsigned below = (1u << bit_of_index(index)) - 1u;
    return std::popcount(static_cast<unsigned>(mask_) & below);
  }

  constexpr auto operator<=>(const IndexSubset&) const = default;

 private:
  std::uint8_t mask_ = 0;
};

/// Sign of the permutation sorting the concatenation (a, b) of two disjoint increasing lists.
constexpr int shuffle_sign(IndexSubset a, IndexSubset b) {
  int inversions = 0;
  for (int bit = 0; bit < 5; ++bit) {
    if (!((b.mask() >> bit) & 1u)) continue;
    const unsigned above = static_cast<unsigned>(a.mask()) >> (bit + 1);
    inversions += std::popcount(above);
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

/// All subsets of the first `dim` basis labels of the given size, in increasing mask order.
/// For dim = 4 the labels are {0,1,2,3}; for dim = 5 they are {0,1,2,3,5}.
inline std::vector<IndexSubset> subsets_of_size(int dim, int size) {
  std::vector<IndexSubset> out;
  const unsigned limit = 1u << dim;
  for (unsigned m = 0; m < limit; ++m)
    if (std::popcount(m) == size) out.push_back(IndexSubset::from_mask(static_cast<std::uint8_t>(m)));
  return out;
}

enum class Variance { kCovariant, kContravariant };

/// Rank-homogeneous antisymmetric object over a Dim-dimensional basis
/// (Dim = 4: labels 0..3; Dim = 5: labels 0,1,2,3,5) with polynomial components.
///
/// Any nonnegative rank is representable; ranks above Dim denote the zero
/// space, so e.g. the derivative of a top-rank form is the (necessarily zero)
/// form of the next rank.
template <int Dim, Variance V>
class Graded {
  static_assert(Dim == 4 || Dim == 5);

 public:
  using Components = std::map<IndexSubset, Poly>;

  explicit Graded(int rank = 0) : rank_(rank) {
    if (rank < 0) throw std::invalid_argument("negative rank");
  }

  /// Scalar (rank 0) element.
  static Graded scalar(const Poly& value) {
    Graded g(0);
    g.set(IndexSubset{}, value);
    return g;
  }

  /// Single basis element with the given coefficient.
  static Graded basis(IndexSubset key, const Poly& coeff = Poly(1)) {
    Graded g(key.size());
    g.set(key, coeff);
    return g;
  }

  static constexpr bool admits(IndexSubset key) { return Dim == 5 || !key.has_fifth(); }

  int rank() const { return rank_; }
  const Components& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }

  const Poly& operator[](IndexSubset key) const {
    static const Poly zero;
    auto it = comps_.find(key);
    return it == comps_.end() ? zero : it->second;
  }

  void set(IndexSubset key, Poly value) {
    check_key(key);
    if (value.is_zero()) {
      comps_.erase(key);
    } else {
      comps_[key] = std::move(value);
    }
  }

  void accumulate(IndexSubset key, const Poly& value) {
    check_key(key);
    if (value.is_zero()) return;
    auto [it, inserted] = comps_.try_emplace(key, value);
    if (!inserted) {
      it->second += value;
      if (it->second.is_zero()) comps_.erase(it);
    }
  }

  Graded& operator+=(const Graded& o) {
    require_same_rank(o);
    for (const auto& [k, c] : o.comps_) accumulate(k, c);
    return *this;
  }
  Graded& operator-=(const Graded& o) {
    require_same_rank(o);
    for (const auto& [k, c] : o.comps_) accumulate(k, -c);
    return *this;
  }
  Graded& operator*=(const Poly& f) {
    for (auto it = comps_.begin(); it != comps_.end();) {
      it->second = it->second * f;
      if (it->second.is_zero()) {
        it = comps_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  friend Graded operator+(Graded a, const Graded& b) { return a += b; }
  friend Graded operator-(Graded a, const Graded& b) { return a -= b; }
  friend Graded operator-(Graded a) {
    for (auto& [k, c] : a.comps_) c = -c;
    return a;
  }
  friend Graded operator*(Graded a, const Poly& f) { return a *= f; }
  friend Graded operator*(const Poly& f, Graded a) { return a *= f; }
  friend Graded operator*(Graded a, const Rational& s) { return a *= Poly(s); }
  friend Graded operator*(const Rational& s, Graded a) { return a *= Poly(s); }

  friend bool operator==(const Graded& a, const Graded& b) { return a.rank_ == b.rank_ && a.comps_ == b.comps_; }

  /// Applies `f` to every component.
  template <class F>
  Graded map(F&& f) const {
    Graded r(rank_);
    for (const auto& [k, c] : comps_) r.set(k, f(c));
    return r;
  }

  /// Keeps the components whose key satisfies `pred`.
  template <class Pred>
  Graded filter(Pred&& pred) const {
    Graded r(rank_);
    for (const auto& [k, c] : comps_)
      if (pred(k)) r.comps_.emplace(k, c);
    return r;
  }

 private:
  void check_key(IndexSubset key) const {
    if (key.size() != rank_)
      throw std::invalid_argument("component key '" + key.to_string() + "' does not match rank " + std::to_string(rank_));
    if (!admits(key)) throw std::invalid_argument("index 5 is not allowed in a four-vector form");
  }
  void require_same_rank(const Graded& o) const {
    if (o.rank_ != rank_) throw std::invalid_argument("mixed-rank sum rejected: rank " + std::to_string(rank_) + " vs " + std::to_string(o.rank_));
  }

  int rank_ = 0;
  Components comps_;
};

using FiveForm = Graded<5, Variance::kCovariant>;
using FourForm = Graded<4, Variance::kCovariant>;
using MultiVector = Graded<5, Variance::kContravariant>;

namespace detail {

/// Wedge without the rank ceiling; results above Dim come out as the zero element.
template <int Dim, Variance V>
Graded<Dim, V> wedge_unchecked(const Graded<Dim, V>& a, const Graded<Dim, V>& b) {
  Graded<Dim, V> r(a.rank() + b.rank());
  for (const auto& [ka, ca] : a.components()) {
    for (const auto& [kb, cb] : b.components()) {
      if (!ka.disjoint(kb)) continue;
      Poly prod = ca * cb;
      if (shuffle_sign(ka, kb) < 0) prod = -prod;
      r.accumulate(ka.united(kb), prod);
    }
  }
  return r;
}

}  // namespace detail

/// Exterior product; bilinear over polynomials with shuffle signs.
template <int Dim, Variance V>
Graded<Dim, V> wedge(const Graded<Dim, V>& a, const Graded<Dim, V>& b) {
  if (a.rank() + b.rank() > Dim) throw std::domain_error("rank exceeds " + std::to_string(Dim));
  return detail::wedge_unchecked(a, b);
}

/// Form/multivector pairing: the sum over increasing subsets K of t_K w^K.
template <int Dim>
Poly contract(const Graded<Dim, Variance::kCovariant>& t, const Graded<Dim, Variance::kContravariant>& w) {
  if (t.rank() != w.rank())
    throw std::invalid_argument("contract: rank mismatch " + std::to_string(t.rank()) + " vs " + std::to_string(w.rank()));
  Poly sum;
  for (const auto& [k, c] : t.components()) {
    const Poly& wk = w[k];
    if (!wk.is_zero()) sum += c * wk;
  }
  return sum;
}

// Basis elements.

inline FiveForm basis_form(int index) { return FiveForm::basis(IndexSubset::of({index})); }
inline MultiVector basis_vector(int index) { return MultiVector::basis(IndexSubset::of({index})); }
inline FourForm dx(int axis) {
  if (axis < 0 || axis > 3) throw std::out_of_range("dx: axis must be 0..3");
  return FourForm::basis(IndexSubset::of({axis}));
}

/// The distinguished 1-form jhat = o^5.
inline FiveForm jhat() { return basis_form(kFifth); }
/// The unit five-vector 1 spanning E.
inline MultiVector unit_one() { return basis_vector(kFifth); }

/// o^0 ^ o^1 ^ o^2 ^ o^3 ^ o^5 with unit coefficient.
inline FiveForm volume5() { return FiveForm::basis(IndexSubset::from_mask(0b11111)); }
inline FourForm volume4() { return FourForm::basis(IndexSubset::from_mask(0b01111)); }

// Z / E decomposition.

/// Components whose key excludes 5.
inline FiveForm z_part(const FiveForm& t) {
  return t.filter([](IndexSubset k) { return !k.has_fifth(); });
}
/// Components whose key includes 5.
inline FiveForm e_part(const FiveForm& t) {
  return t.filter([](IndexSubset k) { return k.has_fifth(); });
}
inline MultiVector z_part(const MultiVector& w) {
  return w.filter([](IndexSubset k) { return !k.has_fifth(); });
}

/// Embeds a four-vector form as a five-vector form with zero E-part.
inline FiveForm lift(const FourForm& s) {
  FiveForm r(s.rank());
  for (const auto& [k, c] : s.components()) r.set(k, c);
  return r;
}

/// Four-vector form matching the Z-part of `s`; the E-part is discarded.
inline FourForm project(const FiveForm& s) {
  FourForm r(s.rank());
  for (const auto& [k, c] : s.components())
    if (!k.has_fifth()) r.set(k, c);
  return r;
}

/// t = s ^ jhat.
inline FiveForm t_from_s(const FiveForm& s) {
  if (s.rank() > 4) throw std::invalid_argument("t_from_s: rank 5 input has no (m+1)-form partner");
  return detail::wedge_unchecked(s, jhat());
}

/// The Z-only (m-1)-form with s_{a...} = t_{a...5}; pairs with t as
/// <s, u1^...^um> = <t, u1^...^um^1>.
inline FiveForm s_from_t(const FiveForm& t) {
  if (t.rank() < 1) throw std::invalid_argument("s_from_t: rank must be at least 1");
  FiveForm s(t.rank() - 1);
  for (const auto& [k, c] : t.components())
    if (k.has_fifth()) s.set(k.without(kFifth), c);
  return s;
}

}  // namespace fvx

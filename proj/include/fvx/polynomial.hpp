#pragma once

/// @file polynomial.hpp
/// Sparse multivariate polynomials with exact rational coefficients.
///
/// `Polynomial<N>` is a polynomial in N variables. Terms live in a map keyed
/// by the exponent tuple, ordered by descending total degree and then
/// descending lexicographic exponent, so two polynomials are equal exactly
/// when their term maps are equal. Zero coefficients are never stored.
///
/// The scalar field of the exterior calculus is `Poly = Polynomial<4>` in the
/// coordinates x0..x3. The same type doubles as a polynomial in surface
/// parameters l1..l4 (slot k-1 holds l_k).

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fvx/rational.hpp"

namespace fvx {

template <std::size_t N>
using Exponents = std::array<std::uint8_t, N>;

template <std::size_t N>
constexpr unsigned total_degree(const Exponents<N>& e) {
  unsigned d = 0;
  for (auto x : e) d += x;
  return d;
}

/// Graded order, larger monomials first.
template <std::size_t N>
struct GradedDescending {
  bool operator()(const Exponents<N>& a, const Exponents<N>& b) const {
    const unsigned da = total_degree<N>(a);
    const unsigned db = total_degree<N>(b);
    if (da != db) return da > db;
    return a > b;
  }
};

/// Maps variable slots to printable names and back.
struct VariableNaming {
  std::function<std::string(std::size_t)> name;
  std::function<std::optional<std::size_t>(std::string_view)> slot;
};

namespace detail {

inline std::optional<std::size_t> parse_prefixed_index(std::string_view token, std::string_view prefix,
                                                       std::size_t first, std::size_t count) {
  if (token.size() <= prefix.size() || token.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string_view digits = token.substr(prefix.size());
  if (digits.size() != 1 || !std::isdigit(static_cast<unsigned char>(digits[0]))) return std::nullopt;
  const std::size_t v = static_cast<std::size_t>(digits[0] - '0');
  if (v < first || v >= first + count) return std::nullopt;
  return v - first;
}

}  // namespace detail

/// Coordinates x0..x3.
inline VariableNaming coordinate_naming() {
  return {[](std::size_t i) { return "x" + std::to_string(i); },
          [](std::string_view t) { return detail::parse_prefixed_index(t, "x", 0, 4); }};
}

/// Surface parameters l1..l4.
inline VariableNaming parameter_naming() {
  return {[](std::size_t i) { return "l" + std::to_string(i + 1); },
          [](std::string_view t) { return detail::parse_prefixed_index(t, "l", 1, 4); }};
}

template <std::size_t N>
class Polynomial {
 public:
  using Key = Exponents<N>;
  using TermMap = std::map<Key, Rational, GradedDescending<N>>;

  static constexpr std::size_t kVariables = N;

  Polynomial() = default;
  Polynomial(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (sgn(c) != 0) terms_.emplace(Key{}, c);
  }
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static Polynomial variable(std::size_t slot) {
    if (slot >= N) throw std::out_of_range("variable slot out of range");
    Key k{};
    k[slot] = 1;
    return monomial(k, Rational(1));
  }

  static Polynomial monomial(const Key& exponents, const Rational& coeff) {
    Polynomial p;
    if (sgn(coeff) != 0) p.terms_.emplace(exponents, coeff);
    return p;
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree<N>(terms_.begin()->first) == 0);
  }

  /// Coefficient of the monomial with the given exponents (zero if absent).
  Rational coefficient(const Key& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(Key{}); }

  unsigned degree() const { return terms_.empty() ? 0 : total_degree<N>(terms_.begin()->first); }

  /// True when no term involves a variable at or beyond `slot`.
  bool uses_only_first(std::size_t count) const {
    for (const auto& [k, c] : terms_)
      for (std::size_t i = count; i < N; ++i)
        if (k[i] != 0) return false;
    return true;
  }

  void add_term(const Key& k, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (sgn(s) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) {
    *this = *this * o;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) {
    for (auto& [k, c] : a.terms_) c = -c;
    return a;
  }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    if (a.is_zero() || b.is_zero()) return r;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        Key k;
        for (std::size_t i = 0; i < N; ++i) {
          const unsigned e = unsigned(ka[i]) + unsigned(kb[i]);
          if (e > 255) throw std::overflow_error("polynomial exponent overflow");
          k[i] = static_cast<std::uint8_t>(e);
        }
        auto [it, inserted] = r.terms_.try_emplace(k);
        it->second += ca * cb;
      }
    }
    std::erase_if(r.terms_, [](const auto& kv) { return sgn(kv.second) == 0; });
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Formal partial derivative with respect to variable `axis`.
  Polynomial partial(std::size_t axis) const {
    if (axis >= N) throw std::out_of_range("partial: axis out of range");
    Polynomial r;
    for (const auto& [k, c] : terms_) {
      if (k[axis] == 0) continue;
      Key nk = k;
      nk[axis] -= 1;
      r.terms_.emplace(nk, c * Rational(k[axis]));
    }
    return r;
  }

  Rational evaluate(std::span<const Rational> point) const {
    if (point.size() < N) {
      // Missing trailing coordinates only matter if they are used.
      if (!uses_only_first(point.size())) throw std::invalid_argument("evaluate: too few coordinates");
    }
    Rational sum = 0;
    for (const auto& [k, c] : terms_) {
      Rational term = c;
      for (std::size_t i = 0; i < N; ++i)
        if (k[i] != 0) term *= fvx::pow(point[i], k[i]);
      sum += term;
    }
    return sum;
  }

  /// Homotopy kernel: the integral over t in [0,1] of t^power * p(t x).
  /// A monomial of total degree d picks up the factor 1/(power + d + 1).
  Polynomial scale_integrate(unsigned power) const {
    Polynomial r;
    for (const auto& [k, c] : terms_)
      r.terms_.emplace(k, c / Rational(power + total_degree<N>(k) + 1));
    return r;
  }

  /// Applies `f` to every coefficient; zero results are dropped.
  template <class F>
  Polynomial map_coefficients(F&& f) const {
    Polynomial r;
    for (const auto& [k, c] : terms_) r.add_term(k, f(c));
    return r;
  }

  std::string to_string(const VariableNaming& naming) const;

 private:
  TermMap terms_;
};

using Poly = Polynomial<4>;

/// Substitutes `images[i]` for variable i of `p`.
template <std::size_t N, std::size_t M>
Polynomial<M> compose(const Polynomial<N>& p, const std::array<Polynomial<M>, N>& images) {
  // powers[i][e] = images[i]^e, built on demand.
  std::array<std::vector<Polynomial<M>>, N> powers;
  auto power = [&](std::size_t i, unsigned e) -> const Polynomial<M>& {
    auto& cache = powers[i];
    if (cache.empty()) cache.emplace_back(Rational(1));
    while (cache.size() <= e) cache.push_back(cache.back() * images[i]);
    return cache[e];
  };
  Polynomial<M> result;
  for (const auto& [k, c] : p.terms()) {
    Polynomial<M> term(c);
    for (std::size_t i = 0; i < N && !term.is_zero(); ++i)
      if (k[i] != 0) term = term * power(i, k[i]);
    result += term;
  }
  return result;
}

/// Exact integral over the box prod [lo_k, hi_k] in the first box.size() variables.
/// Variables beyond the box must not appear.
template <std::size_t N>
Rational integrate_over_box(const Polynomial<N>& p, std::span<const std::pair<Rational, Rational>> box) {
  if (!p.uses_only_first(box.size())) throw std::invalid_argument("integrand depends on variables outside the box");
  Rational total = 0;
  for (const auto& [k, c] : p.terms()) {
    Rational term = c;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const unsigned e = k[i] + 1u;
      term *= (fvx::pow(box[i].second, e) - fvx::pow(box[i].first, e)) / Rational(e);
    }
    total += term;
  }
  return total;
}

template <std::size_t N>
std::string Polynomial<N>::to_string(const VariableNaming& naming) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    const bool negative = sgn(c) < 0;
    const Rational mag = abs(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < N; ++i) {
      if (k[i] == 0) continue;
      if (!mono.empty()) mono += ' ';
      mono += naming.name(i);
      if (k[i] > 1) mono += "^" + std::to_string(k[i]);
    }
    if (mono.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += mono;
    } else {
      out += mag.get_str() + " " + mono;
    }
  }
  return out;
}

/// Parses the text grammar: signed terms, each a product of rational numbers
/// and variables with optional `^` powers, factors juxtaposed or joined by `*`.
/// Example: `3/2 x0^2 x1 - x3`.
template <std::size_t N>
Polynomial<N> parse_polynomial(std::string_view text, const VariableNaming& naming) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void {
    throw std::invalid_argument("polynomial parse error at column " + std::to_string(pos + 1) + ": " + what +
                                " in '" + std::string(text) + "'");
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_uint = [&]() -> std::string {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    return std::string(text.substr(start, pos - start));
  };

  Polynomial<N> result;
  skip_ws();
  if (pos == text.size()) fail("empty polynomial");
  bool first_term = true;
  while (true) {
    skip_ws();
    if (pos == text.size()) break;
    int sgn_term = 1;
    bool had_sign = false;
    while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') sgn_term = -sgn_term;
      had_sign = true;
      ++pos;
      skip_ws();
    }
    if (!first_term && !had_sign) fail("expected '+' or '-'");
    first_term = false;

    Rational coeff(sgn_term);
    typename Polynomial<N>::Key key{};
    bool any_factor = false;
    while (true) {
      skip_ws();
      if (pos == text.size() || text[pos] == '+' || text[pos] == '-') break;
      if (any_factor && text[pos] == '*') {
        ++pos;
        skip_ws();
      }
      if (pos == text.size()) fail("dangling '*'");
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num = read_uint();
        std::string den = "1";
        if (pos < text.size() && text[pos] == '/') {
          ++pos;
          den = read_uint();
          if (den.empty()) fail("missing denominator");
        }
        Integer d(den, 10);
        if (d == 0) fail("zero denominator");
        Rational q(Integer(num, 10), d);
        q.canonicalize();
        coeff *= q;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
          ++pos;
        std::string_view name = text.substr(start, pos - start);
        auto slot = naming.slot(name);
        if (!slot || *slot >= N) {
          pos = start;
          fail("unknown variable '" + std::string(name) + "'");
        }
        unsigned e = 1;
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip_ws();
          std::string digits = read_uint();
          if (digits.empty()) fail("missing exponent");
          e = static_cast<unsigned>(std::stoul(digits));
        }
        const unsigned total = key[*slot] + e;
        if (total > 255) fail("exponent too large");
        key[*slot] = static_cast<std::uint8_t>(total);
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      any_factor = true;
    }
    if (!any_factor) fail("empty term");
    result.add_term(key, coeff);
  }
  return result;
}

inline Poly parse_poly(std::string_view text) { return parse_polynomial<4>(text, coordinate_naming()); }

inline std::string to_string(const Poly& p) { return p.to_string(coordinate_naming()); }

/// The coordinate function x^axis.
inline Poly coordinate(std::size_t axis) { return Poly::variable(axis); }

}  // namespace fvx

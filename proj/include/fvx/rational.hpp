#pragma once

/// @file rational.hpp
/// Arbitrary-precision rationals. Thin layer over GMP's mpq_class, which keeps
/// values in lowest terms with a positive denominator after every operation.

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fvx {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long numerator, long denominator = 1) {
  if (denominator == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(numerator, denominator);
  q.canonicalize();
  return q;
}

inline int sign(const Rational& q) { return sgn(q); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses `[+-]digits[/digits]` with optional surrounding whitespace.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto valid_integer = [](std::string_view s, bool allow_sign) {
    if (allow_sign && !s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = trim(text.substr(0, slash));
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : trim(text.substr(slash + 1));
  if (!valid_integer(num, true) || !valid_integer(den, false))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  std::string num_str(num);
  if (!num_str.empty() && num_str.front() == '+') num_str.erase(0, 1);
  Integer n(num_str, 10);
  Integer d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// Exact square root when `q` is the square of a rational; throws otherwise.
inline Rational exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) throw std::domain_error("square root of a negative rational");
  Integer n = q.get_num();
  Integer d = q.get_den();
  Integer rn = sqrt(n);
  Integer rd = sqrt(d);
  if (rn * rn != n || rd * rd != d) throw std::domain_error("non-rational normalization");
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

inline bool is_perfect_square(const Rational& q) {
  if (sgn(q) < 0) return false;
  Integer rn = sqrt(Integer(q.get_num()));
  Integer rd = sqrt(Integer(q.get_den()));
  return rn * rn == q.get_num() && rd * rd == q.get_den();
}

/// q^e for a nonnegative integer exponent.
inline Rational pow(const Rational& q, unsigned e) {
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), q.get_den_mpz_t(), e);
  Rational r(n, d);
  r.canonicalize();
  return r;
}

}  // namespace fvx

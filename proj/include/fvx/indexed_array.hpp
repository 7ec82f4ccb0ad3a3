#pragma once

/// @file indexed_array.hpp
/// Dense multi-index arrays and slot antisymmetrization, including the
/// index transposition identity for arrays whose indices run over exactly
/// as many values as there are antisymmetrized slots.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fvx/rational.hpp"

namespace fvx {

/// Sign of a permutation given as a sequence of distinct integers 0..n-1.
inline int permutation_sign(std::span<const int> perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

inline long factorial(int n) {
  long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Array of `arity` slots, every slot ranging over the same list of index values.
template <class T>
class IndexedArray {
 public:
  IndexedArray(std::size_t arity, std::vector<int> values)
      : arity_(arity), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("IndexedArray: empty index set");
    std::size_t n = 1;
    for (std::size_t i = 0; i < arity_; ++i) n *= values_.size();
    data_.assign(n, T(0));
  }

  std::size_t arity() const { return arity_; }
  const std::vector<int>& values() const { return values_; }
  std::size_t size() const { return data_.size(); }

  /// Entry addressed by index values (not positions).
  const T& at(std::span<const int> tuple) const { return data_[offset(tuple)]; }
  T& at(std::span<const int> tuple) { return data_[offset(tuple)]; }
  const T& at(std::initializer_list<int> tuple) const { return at(std::span<const int>(tuple.begin(), tuple.size())); }
  T& at(std::initializer_list<int> tuple) { return at(std::span<const int>(tuple.begin(), tuple.size())); }

  /// Entry by flat position; `tuple_at` recovers the index values.
  const T& flat(std::size_t i) const { return data_[i]; }
  T& flat(std::size_t i) { return data_[i]; }

  std::vector<int> tuple_at(std::size_t flat_index) const {
    std::vector<int> t(arity_);
    const std::size_t k = values_.size();
    for (std::size_t s = arity_; s-- > 0;) {
      t[s] = values_[flat_index % k];
      flat_index /= k;
    }
    return t;
  }

  friend bool operator==(const IndexedArray& a, const IndexedArray& b) {
    return a.arity_ == b.arity_ && a.values_ == b.values_ && a.data_ == b.data_;
  }

 private:
  std::size_t offset(std::span<const int> tuple) const {
    if (tuple.size() != arity_) throw std::invalid_argument("IndexedArray: wrong tuple length");
    std::size_t off = 0;
    for (int v : tuple) {
      auto it = std::find(values_.begin(), values_.end(), v);
      if (it == values_.end()) throw std::out_of_range("IndexedArray: index value " + std::to_string(v) + " not in range");
      off = off * values_.size() + static_cast<std::size_t>(it - values_.begin());
    }
    return off;
  }

  std::size_t arity_;
  std::vector<int> values_;
  std::vector<T> data_;
};

/// Average over signed permutations of the listed slots.
template <class T>
IndexedArray<T> antisymmetrize(const IndexedArray<T>& s, std::span<const std::size_t> slots) {
  if (slots.empty()) throw std::invalid_argument("antisymmetrize: no slots given");
  for (std::size_t slot : slots)
    if (slot >= s.arity()) throw std::out_of_range("antisymmetrize: slot out of range");

  const int p = static_cast<int>(slots.size());
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  std::vector<int> signs;
  do {
    perms.push_back(perm);
    signs.push_back(permutation_sign(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  const Rational weight(1, factorial(p));

  IndexedArray<T> r(s.arity(), s.values());
  std::vector<int> source;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::vector<int> tuple = r.tuple_at(i);
    T acc(0);
    for (std::size_t q = 0; q < perms.size(); ++q) {
      source = tuple;
      for (int j = 0; j < p; ++j) source[slots[j]] = tuple[slots[perms[q][j]]];
      if (signs[q] > 0) {
        acc += s.at(source);
      } else {
        acc -= s.at(source);
      }
    }
    r.flat(i) = acc * weight;
  }
  return r;
}

template <class T>
IndexedArray<T> antisymmetrize(const IndexedArray<T>& s, std::initializer_list<std::size_t> slots) {
  return antisymmetrize(s, std::span<const std::size_t>(slots.begin(), slots.size()));
}

template <class T>
bool is_antisymmetric_in(const IndexedArray<T>& s, std::span<const std::size_t> slots) {
  return antisymmetrize(s, slots) == s;
}

/// Checks S_{i j1..jm} = m (-1)^{m+1} S_{[j1..jm] i} entrywise.
///
/// Preconditions: arity m+1, exactly m index values, antisymmetric in the
/// last m slots. Violations throw std::invalid_argument naming the condition.
template <class T>
bool transposition_identity_check(const IndexedArray<T>& s, int m) {
  if (m < 2 || m > 5) throw std::invalid_argument("transposition identity: m must be in 2..5");
  if (s.arity() != static_cast<std::size_t>(m + 1))
    throw std::invalid_argument("transposition identity: array arity must be m+1");
  if (s.values().size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("transposition identity: indices must run over exactly m values");
  std::vector<std::size_t> tail(m);
  std::iota(tail.begin(), tail.end(), std::size_t{1});
  if (!is_antisymmetric_in(s, std::span<const std::size_t>(tail)))
    throw std::invalid_argument("transposition identity: array is not antisymmetric in its last m slots");

  std::vector<std::size_t> head(m);
  std::iota(head.begin(), head.end(), std::size_t{0});
  const IndexedArray<T> a = antisymmetrize(s, std::span<const std::size_t>(head));
  const Rational factor = Rational(m) * Rational(m % 2 == 1 ? 1 : -1);

  std::vector<int> moved(m + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<int> t = s.tuple_at(i);  // (i, j1..jm)
    for (int k = 0; k < m; ++k) moved[k] = t[k + 1];
    moved[m] = t[0];  // (j1..jm, i)
    if (!(s.flat(i) == a.at(moved) * factor)) return false;
  }
  return true;
}

}  // namespace fvx

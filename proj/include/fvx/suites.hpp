#pragma once

/// @file suites.hpp
/// Identity suites over seeded random instances, with an operator table that
/// can be corrupted one operator at a time (mutation mode), greedy
/// counterexample shrinking, and text / json-lines reports.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fvx/calculus.hpp"
#include "fvx/forms.hpp"
#include "fvx/indexed_array.hpp"
#include "fvx/integration.hpp"
#include "fvx/io.hpp"
#include "fvx/lagrange.hpp"
#include "fvx/metric_dual.hpp"
#include "fvx/random.hpp"

namespace fvx {

// -- operator table --

/// The operators the identities are written against. Mutation mode negates
/// the output of exactly one of them.
struct OperatorTable {
  std::function<FourForm(const FourForm&)> d4;
  std::function<FiveForm(const FiveForm&)> d5;
  std::function<FiveForm(const FiveForm&)> bd;
  std::function<FiveForm(const FiveForm&)> bdstar;
  std::function<FiveForm(const FiveForm&, const FiveForm&)> wedge;
  std::function<FiveForm(const FiveForm&, const MetricConfig&)> dual;
  std::function<Rational(const FiveForm&, const ParamSurface&)> integrate_m;
  std::function<Rational(const FiveForm&, const ParamSurface&)> integrate_deg;

  static OperatorTable reference() {
    OperatorTable t;
    t.d4 = [](const FourForm& s) { return fvx::d4(s); };
    t.d5 = [](const FiveForm& s) { return fvx::d5(s); };
    t.bd = [](const FiveForm& s) { return fvx::bd(s); };
    t.bdstar = [](const FiveForm& s) { return fvx::bdstar(s); };
    t.wedge = [](const FiveForm& a, const FiveForm& b) { return detail::wedge_unchecked(a, b); };
    t.dual = [](const FiveForm& w, const MetricConfig& cfg) { return fvx::dual(w, cfg); };
    t.integrate_m = [](const FiveForm& s, const ParamSurface& v) { return fvx::integrate_m(s, v); };
    t.integrate_deg = [](const FiveForm& s, const ParamSurface& v) { return fvx::integrate_deg(s, v); };
    return t;
  }

  static const std::vector<std::string>& operator_names() {
    static const std::vector<std::string> names = {"d4",   "d5",   "bd",          "bdstar",
                                                   "wedge", "dual", "integrate_m", "integrate_deg"};
    return names;
  }

  /// Reference table with the output of operator `name` negated.
  static OperatorTable mutated(std::string_view name) {
    OperatorTable t = reference();
    auto negate1 = [](auto f) { return [f](const auto& x) { return -f(x); }; };
    auto negate2 = [](auto f) { return [f](const auto& x, const auto& y) { return -f(x, y); }; };
    if (name == "d4") {
      t.d4 = negate1(t.d4);
    } else if (name == "d5") {
      t.d5 = negate1(t.d5);
    } else if (name == "bd") {
      t.bd = negate1(t.bd);
    } else if (name == "bdstar") {
      t.bdstar = negate1(t.bdstar);
    } else if (name == "wedge") {
      t.wedge = negate2(t.wedge);
    } else if (name == "dual") {
      t.dual = negate2(t.dual);
    } else if (name == "integrate_m") {
      t.integrate_m = [f = t.integrate_m](const FiveForm& s, const ParamSurface& v) { return Rational(-f(s, v)); };
    } else if (name == "integrate_deg") {
      t.integrate_deg = [f = t.integrate_deg](const FiveForm& s, const ParamSurface& v) { return Rational(-f(s, v)); };
    } else {
      throw std::invalid_argument("unknown operator '" + std::string(name) + "' for --mutate");
    }
    return t;
  }
};

inline Rational integral_with(const OperatorTable& ops, const FiveForm& form, const ParamSurface& v) {
  if (form.rank() == v.dim()) return ops.integrate_m(form, v);
  if (form.rank() == v.dim() + 1) return ops.integrate_deg(form, v);
  throw std::invalid_argument("integral: form rank incompatible with dimension");
}

inline Rational boundary_flux_with(const OperatorTable& ops, const FiveForm& form, const ParamSurface& v) {
  Rational total = 0;
  for (const auto& face : boundary_faces(v)) {
    const Rational value = integral_with(ops, form, face.surface);
    if (face.sign > 0) {
      total += value;
    } else {
      total -= value;
    }
  }
  return total;
}

// -- instances --

struct Instance {
  std::vector<FiveForm> forms;
  std::vector<FourForm> four_forms;
  std::vector<MultiVector> vectors;
  std::vector<ParamSurface> surfaces;
  std::vector<Poly> polys;
  std::optional<LagrangianSpec> lagrangian;
  std::optional<MetricConfig> metric;
  std::vector<int> ints;
  std::vector<Rational> scalars;
};

inline Json to_json(const Instance& inst) {
  Json j = Json::object();
  auto list = [&](const char* key, const auto& items) {
    if (items.empty()) return;
    Json a = Json::array();
    for (const auto& x : items) a.push_back(to_json(x));
    j[key] = a;
  };
  list("forms", inst.forms);
  list("four_forms", inst.four_forms);
  list("vectors", inst.vectors);
  list("surfaces", inst.surfaces);
  if (!inst.polys.empty()) j["polys"] = fields_to_json(inst.polys);
  if (inst.lagrangian) j["lagrangian"] = to_json(*inst.lagrangian);
  if (inst.metric) j["metric"] = to_json(*inst.metric);
  if (!inst.ints.empty()) j["ints"] = inst.ints;
  if (!inst.scalars.empty()) {
    Json a = Json::array();
    for (const auto& q : inst.scalars) a.push_back(q.get_str());
    j["scalars"] = a;
  }
  return j;
}

struct Context {
  const OperatorTable& ops;
  MetricConfig metric;
  RandomOptions options;
};

struct Identity {
  std::string suite;
  std::string name;
  std::function<Instance(Rng&, int, const Context&)> generate;
  std::function<bool(const Instance&, const Context&)> check;
};

// -- shrinking --

namespace detail {

template <std::size_t N>
std::vector<Polynomial<N>> drop_one_term(const Polynomial<N>& p) {
  std::vector<Polynomial<N>> out;
  for (const auto& [k, c] : p.terms()) {
    Polynomial<N> q;
    for (const auto& [k2, c2] : p.terms())
      if (k2 != k) q.add_term(k2, c2);
    out.push_back(std::move(q));
  }
  return out;
}

template <class G>
std::vector<G> graded_candidates(const G& g) {
  std::vector<G> out;
  for (const auto& [k, c] : g.components()) {
    for (auto& smaller : drop_one_term(c)) {
      G h = g;
      h.set(k, smaller);
      out.push_back(std::move(h));
    }
  }
  return out;
}

/// Every instance obtained by deleting a single monomial somewhere.
inline std::vector<Instance> shrink_candidates(const Instance& inst) {
  std::vector<Instance> out;
  auto vary = [&](auto member, auto candidates) {
    auto& items = inst.*member;
    for (std::size_t i = 0; i < items.size(); ++i)
      for (auto& c : candidates(items[i])) {
        Instance next = inst;
        (next.*member)[i] = std::move(c);
        out.push_back(std::move(next));
      }
  };
  vary(&Instance::forms, [](const FiveForm& f) { return graded_candidates(f); });
  vary(&Instance::four_forms, [](const FourForm& f) { return graded_candidates(f); });
  vary(&Instance::vectors, [](const MultiVector& f) { return graded_candidates(f); });
  vary(&Instance::polys, [](const Poly& p) { return drop_one_term(p); });
  if (inst.lagrangian)
    for (auto& d : drop_one_term(inst.lagrangian->density)) {
      Instance next = inst;
      next.lagrangian->density = std::move(d);
      out.push_back(std::move(next));
    }
  return out;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Whether `inst` passes; exceptions count as failures and fill `error`.
inline bool evaluate_instance(const Identity& id, const Instance& inst, const Context& ctx, std::string* error = nullptr) {
  try {
    return id.check(inst, ctx);
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return false;
  }
}

/// Greedily deletes monomials while the instance keeps failing.
inline Instance shrink(const Identity& id, Instance inst, const Context& ctx, int max_steps = 200) {
  for (int step = 0; step < max_steps; ++step) {
    bool reduced = false;
    for (auto& candidate : detail::shrink_candidates(inst)) {
      if (!evaluate_instance(id, candidate, ctx)) {
        inst = std::move(candidate);
        reduced = true;
        break;
      }
    }
    if (!reduced) break;
  }
  return inst;
}

/// Deterministic per-instance generator, independent of suite selection and order.
inline Rng instance_rng(std::uint64_t seed, const Identity& id, int index) {
  const std::uint64_t h = detail::fnv1a(id.suite + "/" + id.name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

// -- the identity catalogue --

namespace suites_detail {

inline int sign_pow(int k) { return k % 2 == 0 ? 1 : -1; }

inline FiveForm scalar_form(const Poly& f) { return FiveForm::scalar(f); }

/// Four-vector dual of a 2-form with eps_0123 = eta |g|^{1/2}, computed directly.
inline FourForm hodge4(const FourForm& s, const MetricConfig& cfg) {
  const Rational top = Rational(cfg.eta) * exact_sqrt(abs(cfg.det_g()));
  FourForm r(4 - s.rank());
  const IndexSubset all = IndexSubset::from_mask(0b01111);
  for (const auto& [k, c] : s.components()) {
    Rational raise = 1;
    for (int a : k.indices()) raise /= cfg.g[a];
    const IndexSubset rest = IndexSubset::from_mask(static_cast<std::uint8_t>(all.mask() & ~k.mask()));
    Rational f = top * raise;
    if (shuffle_sign(k, rest) < 0) f = -f;
    r.accumulate(rest, c * f);
  }
  return r;
}

/// Sum over H of the (bullet) partial of S^H_{rest} along H, for every rest tuple.
inline IndexedArray<Poly> divergence_first(const IndexedArray<Poly>& s) {
  IndexedArray<Poly> out(s.arity() - 1, s.values());
  std::vector<int> full(s.arity());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::vector<int> rest = out.tuple_at(i);
    std::copy(rest.begin(), rest.end(), full.begin() + 1);
    Poly acc;
    for (int h : s.values()) {
      full[0] = h;
      acc += bullet_partial(s.at(full), h);
    }
    out.flat(i) = acc;
  }
  return out;
}

/// D_{a rest} = (bullet) partial of T_{rest} along a.
inline IndexedArray<Poly> gradient_first(const IndexedArray<Poly>& t) {
  IndexedArray<Poly> out(t.arity() + 1, t.values());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::vector<int> tuple = out.tuple_at(i);
    out.flat(i) = bullet_partial(t.at(std::span<const int>(tuple).subspan(1)), tuple[0]);
  }
  return out;
}

/// S^H_{A..} = f^H * symbol(A..) over the given labels.
inline IndexedArray<Poly> vector_valued_top_form(const std::vector<Poly>& f, const std::vector<int>& values) {
  const std::size_t n = values.size();
  IndexedArray<Poly> s(n + 1, values);
  std::vector<int> positions(n);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<int> t = s.tuple_at(i);
    unsigned seen = 0;
    bool repeated = false;
    for (std::size_t k = 0; k < n; ++k) {
      const int pos = static_cast<int>(std::find(values.begin(), values.end(), t[k + 1]) - values.begin());
      if (seen & (1u << pos)) repeated = true;
      seen |= 1u << pos;
      positions[k] = pos;
    }
    if (repeated) continue;
    const int sign = permutation_sign(std::span<const int>(positions));
    const std::size_t h = static_cast<std::size_t>(std::find(values.begin(), values.end(), t[0]) - values.begin());
    s.flat(i) = f[h] * Rational(sign);
  }
  return s;
}

/// Checks (1/n!) div S = (1/(n-1)!) D_[a T_rest] entrywise, i.e. div S = n * antisym(grad T).
inline bool contraction_identity_holds(const IndexedArray<Poly>& s) {
  const std::size_t n = s.values().size();
  const IndexedArray<Poly> lhs = divergence_first(s);
  std::vector<std::size_t> slots(n);
  for (std::size_t k = 0; k < n; ++k) slots[k] = k;
  const IndexedArray<Poly> rhs = antisymmetrize(gradient_first(trace_first(s)), std::span<const std::size_t>(slots));
  for (std::size_t i = 0; i < lhs.size(); ++i)
    if (lhs.flat(i) != rhs.flat(i) * Rational(static_cast<long>(n))) return false;
  return true;
}

/// Rank-(m+1) array over m values, S_{i J} = f_i sym(J), antisymmetric in its last m slots.
inline IndexedArray<Rational> conforming_array(const std::vector<Rational>& f) {
  const int m = static_cast<int>(f.size());
  std::vector<int> values(f.size());
  for (int k = 0; k < m; ++k) values[static_cast<std::size_t>(k)] = k;
  IndexedArray<Rational> s(f.size() + 1, values);
  std::vector<int> tail(f.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<int> t = s.tuple_at(i);
    std::copy(t.begin() + 1, t.end(), tail.begin());
    std::vector<int> sorted = tail;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
    s.flat(i) = f[static_cast<std::size_t>(t[0])] * Rational(permutation_sign(std::span<const int>(tail)));
  }
  return s;
}

/// Lagrangian and field pair; index % 3 selects a guaranteed solution, a
/// harmonic field for a free scalar, or an unconstrained pair.
inline Instance random_el_instance(Rng& rng, int index, const RandomOptions& opt) {
  Instance inst;
  switch (index % 3) {
    case 0:
      inst.lagrangian = random_lagrangian(rng, opt, false);
      inst.polys = {random_linear_field(rng)};
      break;
    case 1: {
      std::array<Rational, 4> g;
      for (auto& ga : g) ga = random_rational(rng);
      inst.lagrangian = free_scalar(g);
      inst.polys = {random_multilinear_field(rng, opt)};
      break;
    }
    default:
      inst.lagrangian = random_lagrangian(rng, opt, true);
      inst.polys = {random_poly(rng, opt)};
      break;
  }
  return inst;
}

/// Orthonormal positively oriented metric with the time axis and sign of xi chosen by the caller.
inline MetricConfig orthonormal_metric(int time_axis, int xi_sign) {
  MetricConfig cfg;
  for (int a = 0; a < 4; ++a) cfg.g[a] = a == time_axis ? 1 : -1;
  cfg.xi = xi_sign;
  cfg.sigma = 1;
  cfg.eta = 1;
  return cfg;
}

}  // namespace suites_detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"algebra", "calculus", "stokes",  "flux",
                                                 "duality", "lagrange", "appendix"};
  return names;
}

inline std::vector<Identity> identity_catalogue() {
  using namespace suites_detail;
  std::vector<Identity> ids;
  auto add = [&](std::string suite, std::string name, auto generate, auto check) {
    ids.push_back({std::move(suite), std::move(name), generate, check});
  };

  // algebra

  add("algebra", "polynomial ring axioms",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        i.polys = {random_poly(rng, c.options), random_poly(rng, c.options), random_poly(rng, c.options)};
        return i;
      },
      [](const Instance& i, const Context&) {
        const Poly &a = i.polys[0], &b = i.polys[1], &c = i.polys[2];
        return (a + b) * c == a * c + b * c && a * b == b * a && (a * b) * c == a * (b * c) && (a - a).is_zero() &&
               a * Poly(1) == a;
      });

  add("algebra", "wedge associativity",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        const int p = uniform_int(rng, 0, 2), q = uniform_int(rng, 0, 2), r = uniform_int(rng, 0, 5 - p - q);
        i.forms = {random_five_form(rng, p, c.options), random_five_form(rng, q, c.options),
                   random_five_form(rng, r, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const auto& w = c.ops.wedge;
        return w(w(i.forms[0], i.forms[1]), i.forms[2]) == w(i.forms[0], w(i.forms[1], i.forms[2]));
      });

  add("algebra", "wedge graded commutativity",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        const int p = uniform_int(rng, 0, 5), q = uniform_int(rng, 0, 5 - p);
        i.forms = {random_five_form(rng, p, c.options), random_five_form(rng, q, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const auto& s = i.forms[0];
        const auto& t = i.forms[1];
        return c.ops.wedge(s, t) == c.ops.wedge(t, s) * Rational(sign_pow(s.rank() * t.rank()));
      });

  add("algebra", "basis pairing of wedge products",
      [](Rng& rng, int, const Context&) {
        Instance i;
        i.ints = {uniform_int(rng, 1, 31)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const IndexSubset k = IndexSubset::from_mask(static_cast<std::uint8_t>(i.ints[0]));
        FiveForm f = FiveForm::scalar(Poly(1));
        for (int a : k.indices()) f = c.ops.wedge(f, basis_form(a));
        return contract(f, MultiVector::basis(k)) == Poly(1);
      });

  add("algebra", "Z/E decomposition and the s/t correspondence",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.forms = {random_five_form(rng, index % 5, c.options)};
        return i;
      },
      [](const Instance& i, const Context&) {
        const FiveForm& s = i.forms[0];
        return z_part(s) + e_part(s) == s && s_from_t(t_from_s(s)) == z_part(s) &&
               t_from_s(s) == e_part(t_from_s(s));
      });

  // calculus

  add("calculus", "d4 nilpotent",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.four_forms = {random_four_form(rng, index % 5, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) { return c.ops.d4(c.ops.d4(i.four_forms[0])).is_zero(); });

  for (const char* op : {"d5", "bd", "bdstar"}) {
    const std::string which = op;
    add("calculus", which + " nilpotent",
        [](Rng& rng, int index, const Context& c) {
          Instance i;
          i.forms = {random_five_form(rng, index % 6, c.options)};
          return i;
        },
        [which](const Instance& i, const Context& c) {
          const auto& f = which == "d5" ? c.ops.d5 : which == "bd" ? c.ops.bd : c.ops.bdstar;
          return f(f(i.forms[0])).is_zero();
        });
  }

  add("calculus", "bd = d + jhat ^",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.forms = {random_five_form(rng, index % 6, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& t = i.forms[0];
        return c.ops.bd(t) == c.ops.d5(t) + c.ops.wedge(jhat(), t) && c.ops.bd(t) == bd_components(t);
      });

  add("calculus", "bdstar = d - jhat ^",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.forms = {random_five_form(rng, index % 6, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& t = i.forms[0];
        return c.ops.bdstar(t) == c.ops.d5(t) - c.ops.wedge(jhat(), t) && c.ops.bdstar(t) == bdstar_components(t);
      });

  add("calculus", "bd - bdstar = 2 jhat ^",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.forms = {random_five_form(rng, index % 6, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& t = i.forms[0];
        return c.ops.bd(t) - c.ops.bdstar(t) == c.ops.wedge(jhat(), t) * Rational(2);
      });

  add("calculus", "bd of scalars: bd 1 = jhat and the bullet-partial basis expansion",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        i.polys = {random_poly(rng, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const Poly& f = i.polys[0];
        FiveForm expected(1);
        for (int a : kAllIndices) expected.accumulate(IndexSubset::of({a}), bullet_partial(f, a));
        return c.ops.bd(FiveForm::scalar(Poly(1))) == jhat() && c.ops.bd(scalar_form(f)) == expected;
      });

  add("calculus", "bd o^A - bd 1 ^ o^A = 0",
      [](Rng&, int index, const Context&) {
        Instance i;
        i.ints = {kAllIndices[index % 5]};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm oa = basis_form(i.ints[0]);
        return (c.ops.bd(oa) - c.ops.wedge(c.ops.bd(FiveForm::scalar(Poly(1))), oa)).is_zero() &&
               c.ops.d5(jhat()).is_zero();
      });

  add("calculus", "Z-part of bd equals Z-part of d",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.forms = {random_five_form(rng, index % 6, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) { return z_part(c.ops.bd(i.forms[0])) == z_part(c.ops.d5(i.forms[0])); });

  add("calculus", "lift commutes with d",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.four_forms = {random_four_form(rng, index % 5, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        return lift(c.ops.d4(i.four_forms[0])) == c.ops.d5(lift(i.four_forms[0]));
      });

  add("calculus", "Leibniz rule for d4",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        const int p = uniform_int(rng, 0, 4), q = uniform_int(rng, 0, 4 - p);
        i.four_forms = {random_four_form(rng, p, c.options), random_four_form(rng, q, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FourForm &s = i.four_forms[0], &t = i.four_forms[1];
        auto w = [](const FourForm& a, const FourForm& b) { return detail::wedge_unchecked(a, b); };
        return c.ops.d4(w(s, t)) == w(c.ops.d4(s), t) + w(s, c.ops.d4(t)) * Rational(sign_pow(s.rank()));
      });

  struct LeibnizVariant {
    const char* name;
    int lhs;     // 0 = d5, 1 = bd
    int left;    // operator on s: 0 = d5, 1 = bd, 2 = bdstar
    int right;   // operator on t
    bool jhat_correction;
  };
  for (const LeibnizVariant v : {LeibnizVariant{"Leibniz rule for d5", 0, 0, 0, false},
                                 LeibnizVariant{"Leibniz rule for bd", 1, 1, 1, true},
                                 LeibnizVariant{"mixed Leibniz rule d(s^t) = bd s ^ t + s ^ bdstar t", 0, 1, 2, false},
                                 LeibnizVariant{"mixed Leibniz rule d(s^t) = bdstar s ^ t + s ^ bd t", 0, 2, 1, false}}) {
    add("calculus", v.name,
        [](Rng& rng, int, const Context& c) {
          Instance i;
          const int p = uniform_int(rng, 0, 5), q = uniform_int(rng, 0, 5 - p);
          i.forms = {random_five_form(rng, p, c.options), random_five_form(rng, q, c.options)};
          return i;
        },
        [v](const Instance& i, const Context& c) {
          auto op = [&](int which) { return which == 0 ? c.ops.d5 : which == 1 ? c.ops.bd : c.ops.bdstar; };
          const FiveForm &s = i.forms[0], &t = i.forms[1];
          const auto& w = c.ops.wedge;
          FiveForm rhs = w(op(v.left)(s), t) + w(s, op(v.right)(t)) * Rational(sign_pow(s.rank()));
          if (v.jhat_correction) rhs -= w(jhat(), w(s, t));
          return op(v.lhs)(w(s, t)) == rhs;
        });
  }

  add("calculus", "d4 potential of a closed form",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.four_forms = {d4(random_four_form(rng, index % 4, c.options))};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FourForm& s = i.four_forms[0];
        if (!d4(s).is_zero()) return true;  // shrinking may break closedness
        return c.ops.d4(poincare_potential_4(s)) == s;
      });

  add("calculus", "d5 potential of a closed form",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        // ranks 2..5, and the rank-1 Z branch
        const int rank = index % 5 == 4 ? 1 : 2 + index % 4;
        if (rank == 1) {
          i.forms = {d5(random_z_form(rng, 0, c.options))};
        } else {
          i.forms = {d5(random_five_form(rng, rank - 1, c.options))};
        }
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& s = i.forms[0];
        if (!d5(s).is_zero() || (s.rank() == 1 && !e_part(s).is_zero())) return true;
        return c.ops.d5(poincare_potential_5(s)) == s;
      });

  add("calculus", "bd potential of a closed form",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        const int rank = index % 6;
        i.forms = {rank == 0 ? FiveForm(0) : bd(random_five_form(rng, rank - 1, c.options))};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& s = i.forms[0];
        if (!bd(s).is_zero()) return true;
        const FiveForm t = poincare_potential_bd(s);
        if (s.rank() == 0) return t.is_zero() && t.rank() == 0;
        return c.ops.bd(t) == s;
      });

  add("calculus", "rank-1 E-defect has no d5 potential",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        i.scalars = {random_rational(rng)};
        i.polys = {random_poly(rng, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm s = c.ops.d5(scalar_form(i.polys[0])) + jhat() * i.scalars[0];
        try {
          poincare_potential_5(s);
        } catch (const EDefectError& e) {
          return e.constant() == i.scalars[0];
        }
        return false;
      });

  add("calculus", "bracket identity for bd of 1-forms",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        i.forms = {random_five_form(rng, 1, c.options)};
        i.vectors = {random_multivector(rng, 1, c.options), random_multivector(rng, 1, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& t = i.forms[0];
        const MultiVector &u = i.vectors[0], &v = i.vectors[1];
        const Poly lhs = contract(c.ops.bd(t), wedge(u, v));
        const Poly rhs = bullet_directional(u, contract(t, v)) - bullet_directional(v, contract(t, u)) -
                         contract(t, commutator(u, v));
        return lhs == rhs;
      });

  // stokes

  for (int m = 1; m <= 4; ++m) {
    add("stokes", "four-vector Stokes via lift, m=" + std::to_string(m),
        [m](Rng& rng, int, const Context& c) {
          Instance i;
          i.four_forms = {random_four_form(rng, m - 1, c.options)};
          i.surfaces = {random_surface(rng, m, c.options)};
          return i;
        },
        [](const Instance& i, const Context& c) {
          const FourForm& s = i.four_forms[0];
          const ParamSurface& v = i.surfaces[0];
          const Rational interior = integrate_four(c.ops.d4(s), v);
          return boundary_flux_four(s, v) == interior && c.ops.integrate_m(c.ops.d5(lift(s)), v) == interior;
        });
  }
  for (int m = 1; m <= 4; ++m) {
    for (int plus = 0; plus <= 1; ++plus) {
      add("stokes", std::string("Stokes, ") + (plus ? "rank = dim+1" : "rank = dim") + ", m=" + std::to_string(m),
          [m, plus](Rng& rng, int, const Context& c) {
            Instance i;
            i.forms = {random_five_form(rng, m - 1 + plus, c.options)};
            i.surfaces = {random_surface(rng, m, c.options)};
            return i;
          },
          [](const Instance& i, const Context& c) {
            const FiveForm& f = i.forms[0];
            const ParamSurface& v = i.surfaces[0];
            return boundary_flux_with(c.ops, f, v) == integral_with(c.ops, c.ops.d5(f), v);
          });
    }
  }

  add("stokes", "degenerate-volume integral equals integral of s_from_t",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        const int m = index % 5;
        i.forms = {random_five_form(rng, m + 1, c.options)};
        i.surfaces = {random_surface(rng, m, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        return c.ops.integrate_deg(i.forms[0], i.surfaces[0]) == c.ops.integrate_m(s_from_t(i.forms[0]), i.surfaces[0]);
      });

  add("stokes", "integral invariant under affine reparametrization",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        const int m = 1 + index % 4;
        i.forms = {random_five_form(rng, m, c.options)};
        i.surfaces = {random_surface(rng, m, c.options)};
        auto [params, box] = random_affine_reparametrization(rng, i.surfaces[0]);
        i.surfaces.push_back(i.surfaces[0].reparametrize(params, box));
        return i;
      },
      [](const Instance& i, const Context& c) {
        return c.ops.integrate_m(i.forms[0], i.surfaces[0]) == c.ops.integrate_m(i.forms[0], i.surfaces[1]);
      });

  add("stokes", "curve term along 1 depends on the parametrization",
      [](Rng& rng, int, const Context&) {
        Instance i;
        i.scalars = {random_rational(rng)};
        // x0 = l on [0,1] and x0 = 2l on [0,1/2] trace the same segment.
        i.surfaces = {ParamSurface(1, {Poly::variable(0), Poly(), Poly(), Poly()}, {{Rational(0), Rational(1)}}),
                      ParamSurface(1, {Poly::variable(0) * Poly(2), Poly(), Poly(), Poly()},
                                   {{Rational(0), Rational(1, 2)}})};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm s = jhat() * i.scalars[0];
        const Rational a = non_invariant_term(s, i.surfaces[0]);
        const Rational b = non_invariant_term(s, i.surfaces[1]);
        return a != b && c.ops.integrate_m(basis_form(0), i.surfaces[0]) == c.ops.integrate_m(basis_form(0), i.surfaces[1]);
      });

  // flux

  for (int m = 1; m <= 4; ++m) {
    add("flux", "five-vector flux equals integral of bd, m=" + std::to_string(m),
        [m](Rng& rng, int, const Context& c) {
          Instance i;
          i.forms = {random_five_form(rng, m, c.options)};
          i.surfaces = {random_surface(rng, m, c.options)};
          return i;
        },
        [m](const Instance& i, const Context& c) {
          const FiveForm& s = i.forms[0];
          const ParamSurface& v = i.surfaces[0];
          const Rational flux = boundary_flux_with(c.ops, s, v) + c.ops.integrate_m(s, v) * Rational(sign_pow(m));
          return c.ops.integrate_deg(c.ops.bd(s), v) == flux;
        });
  }

  struct ByParts {
    const char* name;
    int first;
    int second;
  };
  for (const ByParts bp : {ByParts{"integration by parts with d", 0, 0}, ByParts{"integration by parts with bd and bdstar", 1, 2},
                           ByParts{"integration by parts with bdstar and bd", 2, 1}}) {
    add("flux", bp.name,
        [](Rng& rng, int, const Context& c) {
          Instance i;
          const int r = uniform_int(rng, 0, 3);
          const int p = uniform_int(rng, 0, r);
          const int dim = r == 0 ? 1 : r + uniform_int(rng, 0, 1);
          i.forms = {random_five_form(rng, p, c.options), random_five_form(rng, r - p, c.options)};
          i.surfaces = {random_surface(rng, std::min(dim, 4), c.options)};
          return i;
        },
        [bp](const Instance& i, const Context& c) {
          auto op = [&](int which) { return which == 0 ? c.ops.d5 : which == 1 ? c.ops.bd : c.ops.bdstar; };
          const FiveForm &s = i.forms[0], &t = i.forms[1];
          const ParamSurface& v = i.surfaces[0];
          const Rational lhs = integral_with(c.ops, c.ops.wedge(op(bp.first)(s), t), v);
          const Rational inner = integral_with(c.ops, c.ops.wedge(s, op(bp.second)(t)), v);
          return lhs == boundary_flux_with(c.ops, c.ops.wedge(s, t), v) - inner * Rational(sign_pow(s.rank()));
        });
  }

  // duality

  add("duality", "epsilon contraction identity",
      [](Rng& rng, int index, const Context&) {
        Instance i;
        i.metric = random_metric(rng, (index / 6) % 2 == 0 ? 1 : -1);
        i.ints = {index % 6};
        return i;
      },
      [](const Instance& i, const Context&) { return epsilon_contraction_check(i.ints[0], *i.metric); });

  add("duality", "epsilon normalization and full contraction",
      [](Rng& rng, int index, const Context&) {
        Instance i;
        i.metric = orthonormal_metric(uniform_int(rng, 0, 3), index % 2 == 0 ? 1 : -1);
        return i;
      },
      [](const Instance& i, const Context&) {
        const EpsilonTensor lo = epsilon_lower(*i.metric), up = epsilon_upper(*i.metric);
        std::array<int, 5> p = {0, 1, 2, 3, 5};
        Rational full = 0;
        do {
          full += lo.at(std::span<const int>(p)) * up.at(std::span<const int>(p));
        } while (std::next_permutation(p.begin(), p.end()));
        return lo.top() == 1 && full == Rational(-120 * sgn(i.metric->xi));
      });

  add("duality", "double dual is -sign(xi)",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.metric = random_metric(rng);
        i.forms = {random_five_form(rng, index % 6, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& w = i.forms[0];
        return c.ops.dual(c.ops.dual(w, *i.metric), *i.metric) == w * Rational(-sgn(i.metric->xi));
      });

  add("duality", "s ^ dual t = dual s ^ t = h(s,t) eps",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.metric = random_metric(rng);
        const int m = index % 6;
        i.forms = {random_five_form(rng, m, c.options), random_five_form(rng, m, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const MetricConfig& cfg = *i.metric;
        const FiveForm &s = i.forms[0], &t = i.forms[1];
        const FiveForm expected = epsilon_form(cfg) * inner_product(s, t, cfg);
        return c.ops.wedge(s, c.ops.dual(t, cfg)) == expected && c.ops.wedge(c.ops.dual(s, cfg), t) == expected;
      });

  add("duality", "dual exchanges Z and E parts",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.metric = random_metric(rng);
        i.forms = {random_five_form(rng, index % 6, c.options)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const FiveForm& w = i.forms[0];
        const FiveForm dz = c.ops.dual(z_part(w), *i.metric);
        const FiveForm de = c.ops.dual(e_part(w), *i.metric);
        return e_part(dz) == dz && z_part(de) == de;
      });

  add("duality", "theta_epsilon pairing and theta_h inverse",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.metric = random_metric(rng);
        const int m = index % 6;
        i.vectors = {random_multivector(rng, m, c.options), random_multivector(rng, 5 - m, c.options)};
        return i;
      },
      [](const Instance& i, const Context&) {
        const MetricConfig& cfg = *i.metric;
        const MultiVector &w = i.vectors[0], &v = i.vectors[1];
        return contract(theta_epsilon(w, cfg), v) == contract(epsilon_form(cfg), wedge(w, v)) &&
               theta_h_inverse(theta_h(w, cfg), cfg) == w;
      });

  add("duality", "E-free 2-form dual matches the four-vector dual",
      [](Rng& rng, int index, const Context& c) {
        Instance i;
        i.metric = random_metric(rng);
        const auto keys = subsets_of_size(4, 2);
        if (index < 6) {
          i.forms = {FiveForm::basis(keys[static_cast<std::size_t>(index)])};
        } else {
          i.forms = {random_z_form(rng, 2, c.options)};
        }
        return i;
      },
      [](const Instance& i, const Context& c) {
        const MetricConfig& cfg = *i.metric;
        const FiveForm& w = i.forms[0];
        const FiveForm via_dual = s_from_t(c.ops.dual(w, cfg)) * Rational(1 / cfg.varpi());
        const FiveForm oracle = lift(hodge4(project(w), cfg));
        const FiveForm twice = lift(hodge4(hodge4(project(w), cfg), cfg));
        return via_dual == oracle && dual2_zfree(w, cfg) == oracle && dual2_zfree(oracle, cfg) == twice;
      });

  // lagrange

  add("lagrange", "three formulations of the Euler-Lagrange equations agree",
      [](Rng& rng, int index, const Context& c) { return random_el_instance(rng, index, c.options); },
      [](const Instance& i, const Context& c) {
        const LagrangianSpec& lagrangian = *i.lagrangian;
        const FieldSet& fields = i.polys;
        const bool solution = el_residual(lagrangian, fields, 0).is_zero();
        const bool c51 = c.ops.d4(J_form(lagrangian, fields, 0)) == K_form(lagrangian, fields, 0);
        const FiveForm lambda = Lambda_form(lagrangian, fields, 0);
        const FiveForm reflected = Lambda_form_reflected(lagrangian, fields, 0);
        const bool c55a = c.ops.bd(lambda).is_zero();
        const bool c55b = c.ops.bdstar(reflected).is_zero();
        return reflected == flip_z_sign(lambda) && c51 == solution && c55a == solution && c55b == solution;
      });

  add("lagrange", "defects equal the residual times the volume forms",
      [](Rng& rng, int index, const Context& c) { return random_el_instance(rng, index, c.options); },
      [](const Instance& i, const Context& c) {
        const LagrangianSpec& lagrangian = *i.lagrangian;
        const FieldSet& fields = i.polys;
        const Poly r = el_residual(lagrangian, fields, 0);
        return c.ops.d4(J_form(lagrangian, fields, 0)) - K_form(lagrangian, fields, 0) == volume4() * r &&
               c.ops.bd(Lambda_form(lagrangian, fields, 0)) == volume5() * r &&
               c.ops.bdstar(Lambda_form_reflected(lagrangian, fields, 0)) == volume5() * r;
      });

  add("lagrange", "flux of Lambda through a 4-box equals the integrated residual",
      [](Rng& rng, int index, const Context& c) {
        Instance i = random_el_instance(rng, index, c.options);
        std::vector<Interval> box;
        for (int k = 0; k < 4; ++k) {
          const Rational a = make_rational(uniform_int(rng, -2, 2), uniform_int(rng, 1, 2));
          box.emplace_back(a, a + make_rational(uniform_int(rng, 1, 2), uniform_int(rng, 1, 2)));
        }
        i.surfaces = {ParamSurface::coordinate_box(std::move(box))};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const LagrangianSpec& lagrangian = *i.lagrangian;
        const ParamSurface& v = i.surfaces[0];
        const FiveForm lambda = Lambda_form(lagrangian, i.polys, 0);
        const Rational flux = boundary_flux_with(c.ops, lambda, v) + c.ops.integrate_m(lambda, v);
        const Rational expected =
            integrate_over_box(el_residual(lagrangian, i.polys, 0), std::span<const Interval>(v.box()));
        return flux == expected;
      });

  add("lagrange", "free scalar reference solutions",
      [](Rng& rng, int, const Context&) {
        Instance i;
        i.scalars = {random_rational(rng)};
        return i;
      },
      [](const Instance& i, const Context& c) {
        const LagrangianSpec lagrangian = free_scalar();
        const Rational k = i.scalars[0];
        const FieldSet harmonic = {parse_poly("x0 x1") * Poly(k)};
        const FieldSet quadratic = {parse_poly("x0^2") * Poly(k)};
        const ParamSurface cube = ParamSurface::unit_cube(4);
        auto flux = [&](const FieldSet& f) -> Rational {
          const FiveForm lambda = Lambda_form(lagrangian, f, 0);
          return boundary_flux_with(c.ops, lambda, cube) + c.ops.integrate_m(lambda, cube);
        };
        const Rational two_k = k * 2;
        return c.ops.d4(J_form(lagrangian, harmonic, 0)) == K_form(lagrangian, harmonic, 0) &&
               c.ops.bd(Lambda_form(lagrangian, harmonic, 0)).is_zero() && sgn(flux(harmonic)) == 0 &&
               c.ops.d4(J_form(lagrangian, quadratic, 0)) - K_form(lagrangian, quadratic, 0) ==
                   volume4() * Poly(two_k) &&
               c.ops.bd(Lambda_form(lagrangian, quadratic, 0)) == volume5() * Poly(two_k) && flux(quadratic) == two_k;
      });

  // appendix

  for (int m = 2; m <= 5; ++m) {
    add("appendix", "index transposition identity, m=" + std::to_string(m),
        [m](Rng& rng, int, const Context&) {
          Instance i;
          i.ints = {m};
          for (int k = 0; k < m; ++k) i.scalars.push_back(random_rational(rng));
          return i;
        },
        [m](const Instance& i, const Context&) {
          return transposition_identity_check(conforming_array(i.scalars), m);
        });
  }

  add("appendix", "four-vector contraction identity",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        for (int k = 0; k < 4; ++k) i.polys.push_back(random_poly(rng, c.options));
        return i;
      },
      [](const Instance& i, const Context&) { return contraction_identity_holds(vector_valued_top_form(i.polys, {0, 1, 2, 3})); });

  add("appendix", "five-vector contraction identity",
      [](Rng& rng, int, const Context& c) {
        Instance i;
        for (int k = 0; k < 5; ++k) i.polys.push_back(random_poly(rng, c.options));
        return i;
      },
      [](const Instance& i, const Context&) {
        return contraction_identity_holds(vector_valued_top_form(i.polys, {0, 1, 2, 3, 5}));
      });

  add("appendix", "J and Lambda are the contracted momentum forms",
      [](Rng& rng, int index, const Context& c) { return random_el_instance(rng, index, c.options); },
      [](const Instance& i, const Context& c) {
        const LagrangianSpec& lagrangian = *i.lagrangian;
        const IndexedArray<Poly> s4 = momentum_four_form(lagrangian, i.polys, 0);
        const IndexedArray<Poly> s5 = momentum_five_form(lagrangian, i.polys, 0);
        const Poly div4 = divergence_first(s4).at({0, 1, 2, 3});
        const Poly div5 = divergence_first(s5).at({0, 1, 2, 3, 5});
        return c.ops.d4(J_form(lagrangian, i.polys, 0))[IndexSubset::from_mask(0b01111)] == div4 &&
               c.ops.bd(Lambda_form(lagrangian, i.polys, 0))[IndexSubset::from_mask(0b11111)] == div5;
      });

  return ids;
}

// -- running and reporting --

struct SuiteConfig {
  std::uint64_t seed = 1;
  int trials = 50;
  int max_degree = 3;
  MetricConfig metric;
  std::vector<std::string> suites = suite_names();

  void validate() const {
    if (suites.empty()) throw std::invalid_argument("no suites selected");
    for (const auto& s : suites)
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
        throw std::invalid_argument("unknown suite '" + s + "'");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (max_degree < 1) throw std::invalid_argument("max-degree must be at least 1");
    metric.validate();
  }
};

struct InstanceRecord {
  int index;
  bool pass;
  std::string error;
  std::optional<Json> counterexample;
};

struct IdentityResult {
  std::string suite;
  std::string name;
  std::vector<InstanceRecord> records;

  int failures() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.pass; }));
  }
};

struct Report {
  SuiteConfig config;
  std::string mutation;
  std::vector<IdentityResult> results;

  int failures() const {
    int n = 0;
    for (const auto& r : results) n += r.failures();
    return n;
  }
  bool passed() const { return failures() == 0; }
};

inline IdentityResult run_identity(const Identity& id, const Context& ctx, std::uint64_t seed, int trials) {
  IdentityResult result{id.suite, id.name, {}};
  bool shrunk = false;
  for (int k = 0; k < trials; ++k) {
    Rng rng = instance_rng(seed, id, k);
    InstanceRecord rec{k, true, {}, std::nullopt};
    Instance inst;
    try {
      inst = id.generate(rng, k, ctx);
    } catch (const std::exception& e) {
      rec.pass = false;
      rec.error = std::string("instance generation failed: ") + e.what();
      result.records.push_back(std::move(rec));
      continue;
    }
    rec.pass = evaluate_instance(id, inst, ctx, &rec.error);
    if (!rec.pass) {
      if (!shrunk) {
        inst = shrink(id, std::move(inst), ctx);
        shrunk = true;
      }
      rec.counterexample = to_json(inst);
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

/// Runs every identity of the selected suites, in catalogue order.
inline Report run_suites(const SuiteConfig& cfg, const OperatorTable& ops, std::string mutation = {}) {
  cfg.validate();
  Context ctx{ops, cfg.metric, RandomOptions{cfg.max_degree, 3}};
  Report report{cfg, std::move(mutation), {}};
  const std::set<std::string> selected(cfg.suites.begin(), cfg.suites.end());
  for (const auto& id : identity_catalogue())
    if (selected.count(id.suite)) report.results.push_back(run_identity(id, ctx, cfg.seed, cfg.trials));
  return report;
}

inline void emit_text(const Report& report, std::ostream& out) {
  out << "fvx check: seed " << report.config.seed << ", " << report.config.trials << " trials, max degree "
      << report.config.max_degree;
  if (!report.mutation.empty()) out << ", mutated operator " << report.mutation;
  out << "\n";
  std::string suite;
  for (const auto& r : report.results) {
    if (r.suite != suite) {
      suite = r.suite;
      out << "\n[" << suite << "]\n";
    }
    const int n = static_cast<int>(r.records.size());
    out << (r.failures() == 0 ? "  pass  " : "  FAIL  ") << r.name << "  (" << n - r.failures() << "/" << n << ")\n";
    for (const auto& rec : r.records) {
      if (rec.pass) continue;
      out << "        instance " << rec.index;
      if (!rec.error.empty()) out << ": " << rec.error;
      out << "\n";
      if (rec.counterexample) out << "        counterexample: " << rec.counterexample->dump() << "\n";
      break;
    }
  }
  std::size_t instances = 0;
  for (const auto& r : report.results) instances += r.records.size();
  out << "\n" << report.results.size() << " identities, " << instances << " instances, " << report.failures()
      << " failures\n";
}

inline void emit_json_lines(const Report& report, std::ostream& out) {
  for (const auto& r : report.results) {
    for (const auto& rec : r.records) {
      Json j{{"suite", r.suite}, {"identity", r.name}, {"instance", rec.index}, {"pass", rec.pass}};
      if (!rec.error.empty()) j["error"] = rec.error;
      if (rec.counterexample) j["counterexample"] = *rec.counterexample;
      out << j.dump() << "\n";
    }
  }
}

}  // namespace fvx

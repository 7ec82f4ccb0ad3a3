#pragma once

/// @file io.hpp
/// JSON text formats for forms, surfaces, metrics, Lagrangians and field sets.
///
///   form:       { "rank": 2, "coeffs": { "015": "3/2 x0^2 x1 - x3", ... } }
///   surface:    { "dim": 2, "map": ["l1", "l2", "0", "l1 l2"], "box": [["0","1"], ["0","1/2"]] }
///   metric:     { "g": [1,-1,-1,-1], "xi": "-1", "sigma": "1", "eta": 1 }
///   lagrangian: { "N": 1, "density": "1/2 p0_0^2 - 1/2 p0_1^2 - ..." }
///   fields:     [ "x0 x1", ... ]
///   box:        [["0","1"], ["0","1"], ["0","1"], ["0","1"]]

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fvx/forms.hpp"
#include "fvx/integration.hpp"
#include "fvx/lagrange.hpp"
#include "fvx/metric_dual.hpp"
#include "fvx/polynomial.hpp"

namespace fvx {

using Json = nlohmann::ordered_json;

/// Input that fails to parse or validate; the message carries the location.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Rational rational_from_json(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      throw InputError(what + ": " + e.what());
    }
  }
  throw InputError(what + ": expected an integer or a rational string");
}

inline const Json& require(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(what + ": missing key \"" + key + "\"");
  return *it;
}

template <std::size_t N>
Polynomial<N> poly_from_json(const Json& j, const VariableNaming& naming, const std::string& what) {
  if (j.is_number_integer()) return Polynomial<N>(Rational(j.get<long>()));
  if (!j.is_string()) throw InputError(what + ": expected a polynomial string");
  try {
    return parse_polynomial<N>(j.get<std::string>(), naming);
  } catch (const std::invalid_argument& e) {
    throw InputError(what + ": " + e.what());
  }
}

}  // namespace detail

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ": " + detail::line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": invalid JSON");
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot write file");
  out << text;
}

// -- forms --

template <int Dim, Variance V>
Json to_json(const Graded<Dim, V>& g) {
  Json coeffs = Json::object();
  for (const auto& [k, c] : g.components()) coeffs[k.to_string()] = to_string(c);
  return Json{{"rank", g.rank()}, {"coeffs", coeffs}};
}

inline FiveForm form_from_json(const Json& j) {
  const Json& rank_j = detail::require(j, "rank", "form");
  if (!rank_j.is_number_integer() || rank_j.get<int>() < 0 || rank_j.get<int>() > 5)
    throw InputError("form: rank must be an integer 0..5");
  FiveForm f(rank_j.get<int>());
  const Json& coeffs = detail::require(j, "coeffs", "form");
  if (!coeffs.is_object()) throw InputError("form: \"coeffs\" must be an object");
  for (const auto& [key, value] : coeffs.items()) {
    IndexSubset k;
    try {
      k = IndexSubset::parse(key);
    } catch (const std::exception& e) {
      throw InputError(std::string("form: ") + e.what());
    }
    if (k.size() != f.rank())
      throw InputError("form: key '" + key + "' has " + std::to_string(k.size()) + " indices but rank is " +
                       std::to_string(f.rank()));
    f.accumulate(k, detail::poly_from_json<4>(value, coordinate_naming(), "form component '" + key + "'"));
  }
  return f;
}

// -- surfaces --

inline Json to_json(const ParamSurface& v) {
  Json map = Json::array();
  for (const auto& p : v.map()) map.push_back(p.to_string(parameter_naming()));
  Json box = Json::array();
  for (const auto& [a, b] : v.box()) box.push_back(Json::array({a.get_str(), b.get_str()}));
  return Json{{"dim", v.dim()}, {"map", map}, {"box", box}};
}

inline std::vector<Interval> box_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": box must be a list of [a, b] pairs");
  std::vector<Interval> box;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& pair = j[i];
    const std::string where = what + " interval " + std::to_string(i + 1);
    if (!pair.is_array() || pair.size() != 2) throw InputError(where + ": expected [a, b]");
    box.emplace_back(detail::rational_from_json(pair[0], where), detail::rational_from_json(pair[1], where));
  }
  return box;
}

inline ParamSurface surface_from_json(const Json& j) {
  const Json& dim_j = detail::require(j, "dim", "surface");
  if (!dim_j.is_number_integer()) throw InputError("surface: dim must be an integer");
  const Json& map_j = detail::require(j, "map", "surface");
  if (!map_j.is_array() || map_j.size() != 4) throw InputError("surface: map must list four polynomials");
  std::array<Poly, 4> map;
  for (std::size_t a = 0; a < 4; ++a)
    map[a] = detail::poly_from_json<4>(map_j[a], parameter_naming(), "surface map component " + std::to_string(a));
  try {
    return ParamSurface(dim_j.get<int>(), std::move(map), box_from_json(detail::require(j, "box", "surface"), "surface"));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("surface: ") + e.what());
  }
}

// -- metric --

inline Json to_json(const MetricConfig& cfg) {
  Json g = Json::array();
  for (const auto& ga : cfg.g) g.push_back(ga.get_str());
  return Json{{"g", g}, {"xi", cfg.xi.get_str()}, {"sigma", cfg.sigma.get_str()}, {"eta", cfg.eta}};
}

inline MetricConfig metric_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("metric: expected an object");
  MetricConfig cfg;
  if (auto it = j.find("g"); it != j.end()) {
    if (!it->is_array() || it->size() != 4) throw InputError("metric: g must list four entries");
    for (std::size_t a = 0; a < 4; ++a) cfg.g[a] = detail::rational_from_json((*it)[a], "metric g");
  }
  if (auto it = j.find("xi"); it != j.end()) cfg.xi = detail::rational_from_json(*it, "metric xi");
  if (auto it = j.find("sigma"); it != j.end()) cfg.sigma = detail::rational_from_json(*it, "metric sigma");
  if (auto it = j.find("eta"); it != j.end()) {
    if (!it->is_number_integer()) throw InputError("metric: eta must be +1 or -1");
    cfg.eta = it->get<int>();
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw InputError(std::string("metric: ") + e.what());
  }
  return cfg;
}

// -- Lagrangians and fields --

inline Json to_json(const LagrangianSpec& spec) {
  return Json{{"N", spec.n_fields}, {"density", spec.density.to_string(jet_naming())}};
}

inline LagrangianSpec lagrangian_from_json(const Json& j) {
  LagrangianSpec spec;
  const Json& n = detail::require(j, "N", "lagrangian");
  if (!n.is_number_integer()) throw InputError("lagrangian: N must be an integer");
  spec.n_fields = n.get<int>();
  spec.density = detail::poly_from_json<5 * kMaxFields>(detail::require(j, "density", "lagrangian"), jet_naming(),
                                                        "lagrangian density");
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  return spec;
}

inline Json fields_to_json(const FieldSet& fields) {
  Json out = Json::array();
  for (const auto& f : fields) out.push_back(to_string(f));
  return out;
}

inline FieldSet fields_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("fields: expected a list of polynomials");
  FieldSet fields;
  for (std::size_t i = 0; i < j.size(); ++i)
    fields.push_back(detail::poly_from_json<4>(j[i], coordinate_naming(), "field " + std::to_string(i)));
  return fields;
}

}  // namespace fvx

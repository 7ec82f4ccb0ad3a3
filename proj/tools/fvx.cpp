// fvx: command-line driver for the five-vector exterior calculus engine.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fvx/fvx.hpp"

namespace {

using namespace fvx;

SuiteConfig config_from_file(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.is_object()) throw InputError(path + ": config must be an object");
  SuiteConfig cfg;
  for (const auto& [key, value] : j.items()) {
    const std::string where = path + ": key \"" + key + "\"";
    if (key == "seed") {
      if (!value.is_number_unsigned()) throw InputError(where + " must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "trials") {
      if (!value.is_number_integer()) throw InputError(where + " must be an integer");
      cfg.trials = value.get<int>();
    } else if (key == "max_degree") {
      if (!value.is_number_integer()) throw InputError(where + " must be an integer");
      cfg.max_degree = value.get<int>();
    } else if (key == "suites") {
      if (!value.is_array()) throw InputError(where + " must be a list of suite names");
      cfg.suites.clear();
      for (const auto& s : value) {
        if (!s.is_string()) throw InputError(where + " must be a list of suite names");
        cfg.suites.push_back(s.get<std::string>());
      }
    } else if (key == "metric") {
      try {
        cfg.metric = metric_from_json(value);
      } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
      }
    } else {
      throw InputError(where + " is not a config key");
    }
  }
  return cfg;
}

FiveForm load_form(const std::string& path) {
  try {
    return form_from_json(read_json_file(path));
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + msg);
  }
}

ParamSurface load_surface(const std::string& path) {
  try {
    return surface_from_json(read_json_file(path));
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + msg);
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::string form_text(const FiveForm& f) { return to_json(f).dump(2) + "\n"; }

std::string sides_text(const char* lhs_name, const char* rhs_name, const IdentitySides& sides) {
  std::ostringstream s;
  s << lhs_name << ": " << sides.lhs << "\n" << rhs_name << ": " << sides.rhs << "\n"
    << (sides.holds() ? "EQUAL" : "NOT EQUAL") << "\n";
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact five-vector exterior calculus: operators, integrals and identity checks."};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "Run identity suites on seeded random instances");
  std::vector<std::string> suites;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, max_degree;
  std::string config_path, format = "text", mutate;
  check->add_option("--suite", suites, "Suites to run (default: all)")
      ->check(CLI::IsMember(suite_names()))
      ->expected(0, -1);
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--trials", trials, "Instances per identity");
  check->add_option("--max-degree", max_degree, "Polynomial degree cap");
  check->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json-lines"}));
  check->add_option("--mutate", mutate, "Negate the output of one operator")
      ->check(CLI::IsMember(OperatorTable::operator_names()));

  // single-form operators
  std::string form_path, surface_path, out_path, metric_path;
  for (const char* name : {"d", "bd", "bdstar", "dual"}) {
    auto* sub = app.add_subcommand(name, std::string("Apply ") + name + " to a form");
    sub->add_option("--form", form_path, "Form file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Write the result here instead of stdout");
    if (std::string(name) == "dual") sub->add_option("--config", metric_path, "Metric file")->check(CLI::ExistingFile);
  }
  for (const auto& [name, help] : {std::pair{"integrate", "Integrate a form over a parametrized surface"},
                                   std::pair{"stokes", "Compare boundary flux with the integral of d"},
                                   std::pair{"flux", "Compare five-vector flux with the integral of bd"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--form", form_path, "Form file")->required()->check(CLI::ExistingFile);
    sub->add_option("--surface", surface_path, "Surface file")->required()->check(CLI::ExistingFile);
  }

  // el
  auto* el = app.add_subcommand("el", "Euler-Lagrange residual and the three checks");
  std::string lagrangian_path, fields_path, box_path;
  el->add_option("--lagrangian", lagrangian_path, "Lagrangian file")->required()->check(CLI::ExistingFile);
  el->add_option("--fields", fields_path, "Field file")->required()->check(CLI::ExistingFile);
  el->add_option("--box", box_path, "4-box file for the flux check")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();

    if (cmd == "check") {
      SuiteConfig cfg = config_path.empty() ? SuiteConfig{} : config_from_file(config_path);
      if (check->count("--suite")) cfg.suites = suites;
      if (seed) cfg.seed = *seed;
      if (trials) cfg.trials = *trials;
      if (max_degree) cfg.max_degree = *max_degree;
      const OperatorTable ops = mutate.empty() ? OperatorTable::reference() : OperatorTable::mutated(mutate);
      const Report report = run_suites(cfg, ops, mutate);
      if (format == "json-lines") {
        emit_json_lines(report, std::cout);
      } else {
        emit_text(report, std::cout);
      }
      return report.passed() ? 0 : 1;
    }

    if (cmd == "d" || cmd == "bd" || cmd == "bdstar" || cmd == "dual") {
      const FiveForm form = load_form(form_path);
      FiveForm result;
      if (cmd == "d") {
        result = d5(form);
      } else if (cmd == "bd") {
        result = bd(form);
      } else if (cmd == "bdstar") {
        result = bdstar(form);
      } else {
        const MetricConfig cfg = metric_path.empty() ? MetricConfig{} : metric_from_json(read_json_file(metric_path));
        result = dual(form, cfg);
      }
      emit(form_text(result), out_path);
      return 0;
    }

    if (cmd == "integrate" || cmd == "stokes" || cmd == "flux") {
      const FiveForm form = load_form(form_path);
      const ParamSurface surface = load_surface(surface_path);
      if (cmd == "integrate") {
        std::cout << integral(form, surface) << "\n";
      } else if (cmd == "stokes") {
        const auto variant =
            form.rank() == surface.dim() ? StokesVariant::kRankExceedsDim : StokesVariant::kRankEqualsDim;
        std::cout << sides_text("boundary flux", "integral of d", stokes_check(form, surface, variant));
      } else {
        std::cout << sides_text("integral of bd", "boundary flux + (-1)^m interior", five_flux_check(form, surface));
      }
      return 0;
    }

    // el
    const LagrangianSpec lagrangian = lagrangian_from_json(read_json_file(lagrangian_path));
    const FieldSet fields = fields_from_json(read_json_file(fields_path));
    std::optional<ParamSurface> probe;
    if (!box_path.empty()) {
      probe = ParamSurface::coordinate_box(box_from_json(read_json_file(box_path), box_path));
      if (probe->dim() != 4) throw InputError(box_path + ": box must have four intervals");
    }
    bool all = true;
    for (int field = 0; field < lagrangian.n_fields; ++field) {
      const ELReport r = el_report(lagrangian, fields, field, probe);
      const bool solution = r.residual.is_zero();
      all = all && solution;
      Json j{{"field", field},
             {"residual", to_string(r.residual)},
             {"J", to_json(r.J)},
             {"K", to_json(r.K)},
             {"Lambda", to_json(r.Lambda)},
             {"check_51", r.check51},
             {"check_55_bd", r.check55.direct},
             {"check_55_bdstar", r.check55.reflected},
             {"flux", r.unit_cube_flux.get_str()},
             {"check_57", sgn(r.unit_cube_flux) == 0}};
      if (r.witness) j["witness_box"] = to_json(*r.witness)["box"];
      std::cout << j.dump(2) << "\n";
    }
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "fvx: " << e.what() << "\n";
    return 2;
  }
}

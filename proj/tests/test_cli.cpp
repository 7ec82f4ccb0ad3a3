#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>
#include <sstream>

#include "fvx/fvx.hpp"

using namespace fvx;

namespace {

struct ProcessResult {
  int status;
  std::string out;
};

ProcessResult run_fvx(const std::string& args) {
  const std::string cmd = std::string(FVX_BINARY) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const char* name) { return std::string(FVX_DATA_DIR) + "/" + name; }

SuiteConfig small_config(std::vector<std::string> suites, int trials = 3) {
  SuiteConfig cfg;
  cfg.trials = trials;
  cfg.suites = std::move(suites);
  return cfg;
}

std::string json_lines(const Report& r) {
  std::ostringstream out;
  emit_json_lines(r, out);
  return out.str();
}

}  // namespace

TEST(Config, Validation) {
  EXPECT_NO_THROW(SuiteConfig{}.validate());
  try {
    small_config({}).validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "no suites selected");
  }
  EXPECT_THROW(small_config({"topology"}).validate(), std::invalid_argument);
  EXPECT_THROW(small_config({"algebra"}, 0).validate(), std::invalid_argument);
  EXPECT_THROW(run_suites(small_config({}), OperatorTable::reference()), std::invalid_argument);
}

TEST(Catalogue, EverySuiteHasIdentities) {
  const auto ids = identity_catalogue();
  for (const auto& s : suite_names())
    EXPECT_TRUE(std::any_of(ids.begin(), ids.end(), [&](const Identity& id) { return id.suite == s; })) << s;
  std::set<std::string> names;
  for (const auto& id : ids) EXPECT_TRUE(names.insert(id.suite + "/" + id.name).second) << id.name;
}

TEST(RunSuites, RecordCountAndDeterminism) {
  const SuiteConfig cfg = small_config({"algebra", "calculus"});
  const Report a = run_suites(cfg, OperatorTable::reference());
  const Report b = run_suites(cfg, OperatorTable::reference());
  std::size_t records = 0;
  for (const auto& r : a.results) records += r.records.size();
  EXPECT_EQ(records, a.results.size() * 3);
  EXPECT_TRUE(a.passed());
  const std::string lines = json_lines(a);
  EXPECT_EQ(lines, json_lines(b));
  EXPECT_EQ(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')), records);
  SuiteConfig reseeded = small_config({"calculus"});
  const std::string mutated = json_lines(run_suites(reseeded, OperatorTable::mutated("d5"), "d5"));
  EXPECT_EQ(mutated, json_lines(run_suites(reseeded, OperatorTable::mutated("d5"), "d5")));
  reseeded.seed = 2;
  EXPECT_NE(mutated, json_lines(run_suites(reseeded, OperatorTable::mutated("d5"), "d5")));
}

TEST(RunSuites, MutationProducesShrunkCounterexample) {
  const Report r = run_suites(small_config({"calculus"}), OperatorTable::mutated("bd"), "bd");
  EXPECT_FALSE(r.passed());
  for (const auto& res : r.results)
    for (const auto& rec : res.records)
      if (!rec.pass) EXPECT_TRUE(rec.counterexample.has_value()) << res.name;
  std::ostringstream text;
  emit_text(r, text);
  EXPECT_NE(text.str().find("mutated operator bd"), std::string::npos);
  EXPECT_NE(text.str().find("counterexample"), std::string::npos);
  EXPECT_THROW(OperatorTable::mutated("grad"), std::invalid_argument);
}

TEST(Io, FormRoundTrip) {
  const FiveForm f = form_from_json(read_json_file(data("f.form")));
  EXPECT_EQ(f.rank(), 1);
  EXPECT_EQ(f[IndexSubset::of({1})], parse_poly("3/2 x0^2 - x3"));
  EXPECT_EQ(form_from_json(to_json(f)), f);
  EXPECT_THROW(form_from_json(Json::parse(R"({"rank": 2, "coeffs": {"0": "1"}})")), InputError);
  EXPECT_THROW(form_from_json(Json::parse(R"({"rank": 1, "coeffs": {"4": "1"}})")), InputError);
  EXPECT_THROW(form_from_json(Json::parse(R"({"rank": 1, "coeffs": {"0": "x9"}})")), InputError);
  EXPECT_THROW(form_from_json(Json::parse(R"({"coeffs": {}})")), InputError);
}

TEST(Io, SurfaceMetricLagrangianRoundTrip) {
  const ParamSurface v = surface_from_json(read_json_file(data("square.surf")));
  EXPECT_EQ(v.dim(), 2);
  const ParamSurface w = surface_from_json(to_json(v));
  EXPECT_EQ(w.map(), v.map());
  EXPECT_EQ(w.box(), v.box());
  EXPECT_THROW(surface_from_json(Json::parse(R"({"dim": 1, "map": ["l1", "0", "0"], "box": [[0, 1]]})")), InputError);
  EXPECT_THROW(surface_from_json(Json::parse(R"({"dim": 1, "map": ["l1", "0", "0", "0"], "box": [[1, 0]]})")),
               InputError);

  const MetricConfig m = metric_from_json(Json::parse(R"({"g": [4, -1, -9, -1], "xi": "-4", "sigma": 2})"));
  EXPECT_EQ(m.xi, -4);
  const MetricConfig m2 = metric_from_json(to_json(m));
  EXPECT_EQ(m2.g, m.g);
  EXPECT_EQ(m2.sigma, m.sigma);
  EXPECT_THROW(metric_from_json(Json::parse(R"({"g": [2, -1, -1, -1]})")), InputError);

  const LagrangianSpec l = lagrangian_from_json(read_json_file(data("free_scalar.lagr")));
  EXPECT_EQ(l.density, free_scalar().density);
  EXPECT_EQ(lagrangian_from_json(to_json(l)).density, l.density);
  EXPECT_THROW(lagrangian_from_json(Json::parse(R"({"N": 1, "density": "p1_0"})")), InputError);
  const FieldSet fields = fields_from_json(Json::parse(R"(["x0 x1", 3])"));
  EXPECT_EQ(fields_from_json(fields_to_json(fields)), fields);
}

TEST(Io, ParseErrorsCarryLineContext) {
  try {
    parse_json_text("{\n  \"rank\": 1,\n  \"coeffs\" {}\n}", "bad.form");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.form: line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_json_file(data("missing.form")), InputError);
}

TEST(Cli, OperatorsAndStokes) {
  ProcessResult r = run_fvx("bd --form " + data("const1.form"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(form_from_json(Json::parse(r.out)), jhat());
  r = run_fvx("dual --form " + data("jhat.form"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(form_from_json(Json::parse(r.out)), dual(jhat(), MetricConfig{}));
  r = run_fvx("stokes --form " + data("f.form") + " --surface " + data("square.surf"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("EQUAL"), std::string::npos);
}

TEST(Cli, EulerLagrange) {
  const std::string base = "el --lagrangian " + data("free_scalar.lagr") + " --box " + data("unit4.box") + " --fields ";
  ProcessResult r = run_fvx(base + data("harmonic.fields"));
  EXPECT_EQ(r.status, 0) << r.out;
  r = run_fvx(base + data("quadratic.fields"));
  EXPECT_EQ(r.status, 1) << r.out;
  EXPECT_NE(r.out.find("witness"), std::string::npos);
}

TEST(Cli, CheckAndErrors) {
  ProcessResult r = run_fvx("check --suite algebra --trials 2");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("0 failures"), std::string::npos);
  r = run_fvx("check --suite calculus --trials 2 --mutate d5");
  EXPECT_EQ(r.status, 1);
  r = run_fvx("check --suite algebra --trials 2 --format json-lines --seed 7");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(Json::parse(r.out.substr(0, r.out.find('\n')))["suite"], "algebra");
  r = run_fvx("bd --form " + data("square.surf"));
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(r.out.rfind("fvx: ", 0), 0u) << r.out;
  r = run_fvx("bd --form " + data("missing.form"));
  EXPECT_NE(r.status, 0);
  r = run_fvx("check --suite nosuch");
  EXPECT_NE(r.status, 0);
}

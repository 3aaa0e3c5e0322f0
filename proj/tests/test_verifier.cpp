#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "paracurv/errors.hpp"
#include "paracurv/verifier.hpp"
#include "support.hpp"

using namespace paracurv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with stdout captured, stderr discarded.
Run cli(const std::string& args) {
  const std::string cmd = std::string(PARACURV_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "paracurv_test_verifier";
  fs::create_directories(dir);
  return dir / name;
}

std::string field_of(const std::string& text) {
  try {
    (void)parse_manifest(text);
  } catch (const ManifestError& e) {
    return e.field();
  }
  return "(accepted)";
}

double number_after(const std::string& text, const std::string& label) {
  const auto pos = text.find(label);
  REQUIRE(pos != std::string::npos);
  return std::strtod(text.c_str() + pos + label.size(), nullptr);
}

}  // namespace

TEST_CASE("SHA-256 of a known message") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("stable serialization sorts keys and keeps full precision") {
  const nlohmann::json j = {{"b", 0.1}, {"a", {1, 2.5}}, {"c", {{"z", true}, {"y", nullptr}}}, {"d", 3.0}};
  const std::string s = dump_stable(j);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("\"y\"") < s.find("\"z\""));
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("3.0") != std::string::npos);
  CHECK(s.back() == '\n');
  CHECK(nlohmann::json::parse(s) == j);
  CHECK(dump_stable({{"x", std::nan("")}}).find("null") != std::string::npos);
}

TEST_CASE("manifest errors name the offending field") {
  CHECK(field_of("{") == "(document)");
  CHECK(field_of(R"({"schema":"other/1","manifold":{"builtin":{"name":"heisenberg","n":1}}})") == "schema");
  CHECK(field_of(R"({"schema":"paracurv.manifest/1","manifold":{"builtin":{"name":"heisenberg","n":1}},"tolerance":-1})") ==
        "tolerance");
  CHECK(field_of(R"({"schema":"paracurv.manifest/1","manifold":{"builtin":{"name":"heisenberg","n":1}},"bogus":1})") !=
        "(accepted)");
  CHECK(field_of(slurp(support::manifest_path("invalid/phi_row_count.json"))) == "manifold.custom.phi");
  CHECK(field_of(slurp(support::manifest_path("invalid/negative_alpha.json"))) == "transform.alpha");
  CHECK(field_of(slurp(support::manifest_path("invalid/asymmetric_metric.json"))).rfind("manifold.custom.g", 0) == 0);
  CHECK(field_of(slurp(support::manifest_path("invalid/bad_expression.json"))).rfind("manifold.custom.phi", 0) == 0);
  CHECK(field_of(slurp(support::manifest_path("heisenberg_n2.json"))) == "(accepted)");
}

TEST_CASE("reports are byte-stable for a fixed seed") {
  const auto m = load_manifest(support::manifest_path("heisenberg_n1.json"));
  RunOptions opt;
  const auto a = report_json(run_manifest(m, opt), m, opt);
  const auto b = report_json(run_manifest(m, opt), m, opt);
  CHECK(a == b);
  const auto j = nlohmann::json::parse(a);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["manifest_digest"] == "sha256:" + sha256_hex(slurp(support::manifest_path("heisenberg_n1.json"))));
  CHECK(j["pass"] == true);
  CHECK_FALSE(j.contains("wall_time_seconds"));
  RunOptions other;
  other.seed = 12345;
  CHECK(report_json(run_manifest(m, other), m, other) != a);
}

TEST_CASE("transform composes the homothety constant") {
  const auto m = load_manifest(support::manifest_path("hyperboloid_n2.json"));
  const auto t = parse_manifest(dump_stable(transform_manifest(m, 2.0)));
  REQUIRE(t.alpha.has_value());
  CHECK(*t.alpha == 2.0);
  const auto s = build_structure(t);
  const auto fit = space_form_fit(s, sample_points(s, 1, 5));
  CHECK(fit.k_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(transform_manifest(m, 0.0), InvalidAlpha);
  const auto back = parse_manifest(dump_stable(transform_manifest(t, 0.5)));
  CHECK_FALSE(back.alpha.has_value());
}

TEST_CASE("transform rewrites custom tables to the D-homothetic structure") {
  const auto m = load_manifest(support::manifest_path("warped_n1.json"));
  const auto t = parse_manifest(dump_stable(transform_manifest(m, 1.7)));
  CHECK_FALSE(t.alpha.has_value());
  const auto rewritten = build_structure(t);
  const auto direct = d_homothetic(build_structure(m), 1.7);
  for (const auto& p : sample_points(direct, 3, 5)) {
    const auto a = rewritten.fields(p), b = direct.fields(p);
    CHECK(max_abs(values(a.g) - values(b.g)) < 1e-13);
    CHECK(max_abs(values(a.xi) - values(b.xi)) < 1e-15);
    CHECK(max_abs(values(a.eta) - values(b.eta)) < 1e-14);
    CHECK(max_abs(riemann(rewritten, p).riem_down - riemann(direct, p).riem_down) < 1e-11);
  }
}

TEST_CASE("point parsing") {
  CHECK(parse_point("0.1, -2,3e-1") == std::vector<double>{0.1, -2.0, 0.3});
  CHECK_THROWS_AS(parse_point("0.1,,2"), ManifestError);
  CHECK_THROWS_AS(parse_point("x"), ManifestError);
}

TEST_CASE("CLI exit codes") {
  const auto out = scratch("report.json");
  fs::remove(out);
  SUBCASE("a passing manifest exits 0 and writes a report") {
    CHECK(cli("check " + support::manifest_path("heisenberg_n1.json") + " --out " + out.string()).code == 0);
    CHECK(nlohmann::json::parse(slurp(out))["pass"] == true);
  }
  SUBCASE("a failing check exits 1") {
    CHECK(cli("check " + support::manifest_path("negative_metric_scaled.json") + " --out " + out.string()).code == 1);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["pass"] == false);
    bool axiom_iv_failed = false;
    for (const auto& c : j["checks"])
      if (c["name"] == "axiom_iv") axiom_iv_failed = c["pass"] == false && c["residual_max"].get<double>() > 1e-2;
    CHECK(axiom_iv_failed);
  }
  SUBCASE("invalid input exits 2 with an error report") {
    CHECK(cli("check " + support::manifest_path("invalid/bad_expression.json") + " --out " + out.string()).code == 2);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["pass"] == false);
    CHECK(j["error"]["kind"] == "manifest");
    CHECK(cli("check /nonexistent/manifest.json").code == 2);
    CHECK(cli("check").code == 2);
    CHECK(cli("frobnicate").code == 2);
  }
  SUBCASE("transform output is a valid manifest") {
    const auto t = scratch("half.json");
    CHECK(cli("transform " + support::manifest_path("hyperboloid_n2.json") + " --alpha 0.5 --out " + t.string()).code == 0);
    CHECK_NOTHROW(load_manifest(t));
    CHECK(cli("transform " + support::manifest_path("hyperboloid_n2.json") + " --alpha -2 --out " + t.string()).code == 2);
  }
  SUBCASE("version and builtins") {
    const auto v = cli("--version");
    CHECK(v.code == 0);
    CHECK(v.out.find(kToolVersion) != std::string::npos);
    const auto b = cli("builtins");
    CHECK(b.out.find("heisenberg") != std::string::npos);
    CHECK(b.out.find("hyperboloid") != std::string::npos);
  }
}

TEST_CASE("curvature summaries") {
  const auto hyp = cli("curvature " + support::manifest_path("hyperboloid_n2.json") + " --point 0.1,0.2,-0.1,0.3,0");
  CHECK(hyp.code == 0);
  CHECK(number_after(hyp.out, "scalar curvature s: ") == doctest::Approx(-20.0).epsilon(1e-10));
  const auto heis = cli("curvature " + support::manifest_path("heisenberg_n1.json") + " --point 0.2,0.1,0 --christoffel");
  CHECK(heis.code == 0);
  CHECK(number_after(heis.out, "scalar curvature s: ") == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(heis.out.find("Gamma^") != std::string::npos);
  CHECK(cli("curvature " + support::manifest_path("heisenberg_n1.json") + " --point 0.2,0.1").code == 2);
  CHECK(cli("curvature " + support::manifest_path("hyperboloid_n2.json") + " --point 1,0,0,0,0").code == 2);
}

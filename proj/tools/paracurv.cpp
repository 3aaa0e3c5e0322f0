// paracurv: verify paracontact / paraSasakian structures described by a
// manifest. Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input
// or an evaluation error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "paracurv/errors.hpp"
#include "paracurv/verifier.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kInvalid = 2;

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

std::string kind_of(const std::exception& e) {
  if (dynamic_cast<const paracurv::ManifestError*>(&e)) return "manifest";
  if (dynamic_cast<const paracurv::EvaluationError*>(&e)) return "evaluation";
  if (dynamic_cast<const paracurv::DomainError*>(&e)) return "domain";
  return "input";
}

void print_error(const std::exception& e) {
  std::cerr << "paracurv: error: " << e.what() << "\n";
  if (const auto* ev = dynamic_cast<const paracurv::EvaluationError*>(&e)) {
    std::cerr << "  at point (";
    for (std::size_t i = 0; i < ev->point().size(); ++i) std::fprintf(stderr, "%s%.17g", i ? ", " : "", ev->point()[i]);
    std::cerr << ")\n";
  }
}

int cmd_check(const std::string& path, const std::string& out, std::optional<double> tol,
              std::optional<std::uint64_t> seed, bool timing) {
  std::string digest;
  try {
    const paracurv::Manifest m = paracurv::load_manifest(path);
    digest = m.digest;
    paracurv::RunOptions opt;
    opt.tolerance = tol;
    opt.seed = seed;
    opt.timing = timing;
    const paracurv::RunResult r = paracurv::run_manifest(m, opt);
    const std::string text = paracurv::report_json(r, m, opt);
    if (!out.empty()) {
      if (!write_file(out, text)) {
        std::cerr << "paracurv: error: cannot write " << out << "\n";
        return kInvalid;
      }
    } else {
      std::cout << text;
    }
    const auto failing = r.report.failing();
    std::cerr << r.structure << ": " << r.report.entries.size() - failing.size() << "/" << r.report.entries.size()
              << " checks pass";
    if (!failing.empty()) {
      std::cerr << "; failing:";
      for (const auto& f : failing) std::cerr << " " << f;
    }
    std::cerr << "\n";
    return failing.empty() ? kPass : kCheckFailure;
  } catch (const std::exception& e) {
    print_error(e);
    if (!out.empty()) write_file(out, paracurv::error_report_json(kind_of(e), e.what(), digest));
    return kInvalid;
  }
}

int cmd_curvature(const std::string& path, const std::string& point, bool christoffel) {
  try {
    const paracurv::Manifest m = paracurv::load_manifest(path);
    const auto p = paracurv::parse_point(point);
    std::cout << paracurv::curvature_summary(m, p, christoffel);
    return kPass;
  } catch (const std::exception& e) {
    print_error(e);
    return kInvalid;
  }
}

int cmd_transform(const std::string& path, double alpha, const std::string& out) {
  try {
    const paracurv::Manifest m = paracurv::load_manifest(path);
    const std::string text = paracurv::dump_stable(paracurv::transform_manifest(m, alpha));
    // The output must itself be a valid manifest.
    paracurv::parse_manifest(text);
    if (!write_file(out, text)) {
      std::cerr << "paracurv: error: cannot write " << out << "\n";
      return kInvalid;
    }
    return kPass;
  } catch (const std::exception& e) {
    print_error(e);
    return kInvalid;
  }
}

int cmd_builtins() {
  for (const auto& name : paracurv::builtin_names()) {
    std::cout << name << "\n";
  }
  std::cout << "check groups:";
  for (const auto& g : paracurv::suite_groups()) std::cout << " " << g;
  std::cout << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paracurv: numerical verification of paracontact metric structures"};
  app.set_version_flag("--version", std::string(paracurv::kToolVersion));
  app.require_subcommand(1);

  std::string manifest, out, point;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool timing = false, christoffel = false;
  double alpha = 0.0;

  auto* check = app.add_subcommand("check", "run the manifest's checks and write a report");
  check->add_option("manifest", manifest, "manifest file")->required();
  check->add_option("--out", out, "report file (default: stdout)");
  check->add_option("--tol", tol, "override the manifest tolerance");
  check->add_option("--seed", seed, "override the sampling seed");
  check->add_flag("--timing", timing, "include wall time in the report (breaks byte stability)");

  auto* curv = app.add_subcommand("curvature", "print a curvature summary at one point");
  curv->add_option("manifest", manifest, "manifest file")->required();
  curv->add_option("--point", point, "comma-separated coordinates")->required();
  curv->add_flag("--christoffel", christoffel, "also print the Christoffel symbols");

  auto* tr = app.add_subcommand("transform", "write the D-homothetic image of a manifest");
  tr->add_option("manifest", manifest, "manifest file")->required();
  tr->add_option("--alpha", alpha, "homothety constant, > 0")->required();
  tr->add_option("--out", out, "output manifest")->required();

  auto* bi = app.add_subcommand("builtins", "list builtin structures and check groups");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  if (*check) return cmd_check(manifest, out, tol, seed, timing);
  if (*curv) return cmd_curvature(manifest, point, christoffel);
  if (*tr) return cmd_transform(manifest, alpha, out);
  if (*bi) return cmd_builtins();
  return kInvalid;
}

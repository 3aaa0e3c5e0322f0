// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Residual thresholds are applied to the raw residuals, not
// to the report's pass flags, so each criterion uses its own bound.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "paracurv/analysis.hpp"
#include "paracurv/expr.hpp"
#include "paracurv/verifier.hpp"
#include "support.hpp"

using namespace paracurv;

namespace {

constexpr int kPoints = 200;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  /// Records value <= bound; the first failure goes into the detail line.
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "failed: " << what << "; ";
    pass = pass && ok;
  }
  void below(double value, double bound, const std::string& what) {
    std::ostringstream os;
    os << what << " = " << value << " (bound " << bound << ")";
    require(value <= bound, os.str());
  }
};

struct Suite {
  std::string label;
  CharteredStructure structure;
  CheckReport report;
  double seconds = 0.0;
};

double entry(const CheckReport& r, const std::string& name) {
  const CheckEntry* e = r.find(name);
  return e ? e->residual : NAN;
}

double constant(const CheckReport& r, const std::string& name) {
  const auto it = r.constants.find(name);
  return it == r.constants.end() ? NAN : it->second;
}

Suite full_suite(const std::string& label, const CharteredStructure& s) {
  SuiteOptions opt;
  opt.groups = {suite_groups().begin(), suite_groups().end()};
  opt.seed = kSeed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = sample_points(s, kSeed, kPoints);
  CheckReport r = run_suite(s, pts, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {label, s, std::move(r), secs};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PARACURV_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  std::vector<Suite> suites;
  double total_seconds = 0.0;
  std::string setup_error;
  try {
    for (int n = 1; n <= 3; ++n) suites.push_back(full_suite("heisenberg n=" + std::to_string(n), builtin_heisenberg(n)));
    for (int n = 1; n <= 2; ++n) suites.push_back(full_suite("hyperboloid n=" + std::to_string(n), builtin_hyperboloid(n)));
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  for (const auto& s : suites) total_seconds += s.seconds;
  auto find = [&](const std::string& label) -> const Suite& {
    for (const auto& s : suites)
      if (s.label == label) return s;
    throw std::runtime_error("missing suite " + label);
  };

  std::map<int, std::function<void(Outcome&)>> criteria;

  criteria[1] = [&](Outcome& o) {
    o.require(setup_error.empty(), "suite setup: " + setup_error);
    o.require(suites.size() == 5, "five builtin suites");
    for (const auto& s : suites) {
      for (const char* a : {"axiom_i", "axiom_ii", "axiom_iii", "axiom_iv"}) o.below(entry(s.report, a), 1e-9, s.label + " " + a);
      o.below(entry(s.report, "signature"), 0.0, s.label + " signature");
      o.require(s.report.point_count == kPoints, s.label + " point count");
    }
    o.below(total_seconds, 60.0, "full-suite wall time [s]");
    o.detail << "5 builtins x " << kPoints << " points, full suite " << total_seconds << " s";
  };

  criteria[2] = [&](Outcome& o) {
    double worst = 0.0;
    for (const auto& s : suites) {
      o.below(entry(s.report, "paraSasakian_nijenhuis"), 1e-9, s.label + " Nijenhuis");
      o.below(entry(s.report, "paraSasakian_nabla_phi"), 1e-9, s.label + " nabla phi");
      o.below(entry(s.report, "h_vanishes"), 1e-10, s.label + " h");
      o.below(entry(s.report, "paraSasakian_criteria_agree"), 1e-10, s.label + " criteria agreement");
      o.require(s.report.verdicts.at("paraSasakian"), s.label + " verdict");
      worst = std::max({worst, entry(s.report, "paraSasakian_nijenhuis"), entry(s.report, "paraSasakian_nabla_phi")});
    }
    o.detail << "max criterion residual " << worst;
  };

  criteria[3] = [&](Outcome& o) {
    double worst = 0.0;
    for (const auto& s : suites) {
      o.below(entry(s.report, "xi_sectional_minus_one"), 1e-8, s.label + " |K(xi,u) + 1|");
      worst = std::max(worst, entry(s.report, "xi_sectional_minus_one"));
    }
    o.detail << "max |K(xi,u) + 1| = " << worst;
  };

  auto phsc_criterion = [&](Outcome& o, const Suite& s, double k) {
    const double kh = constant(s.report, "k_hat");
    o.below(std::abs(kh - k), 1e-8, s.label + " |k_hat - k|");
    o.below(entry(s.report, "phsc_constant") + std::abs(kh - k), 1e-8, s.label + " max |phsc - k|");
    o.below(entry(s.report, "space_form_model"), 1e-8, s.label + " space-form model");
    o.detail << s.label << ": k_hat = " << kh << "; ";
  };
  criteria[4] = [&](Outcome& o) {
    for (int n = 1; n <= 3; ++n) phsc_criterion(o, find("heisenberg n=" + std::to_string(n)), 3.0);
  };
  criteria[5] = [&](Outcome& o) {
    phsc_criterion(o, find("hyperboloid n=2"), -1.0);
    phsc_criterion(o, find("hyperboloid n=1"), -1.0);
  };

  criteria[6] = [&](Outcome& o) {
    for (const double alpha : {0.5, 2.0, 3.0}) {
      const auto s = d_homothetic(builtin_hyperboloid(2), alpha);
      SuiteOptions opt;
      opt.groups = {"axioms", "classify", "sectional", "space_form"};
      opt.seed = kSeed;
      const auto r = run_suite(s, sample_points(s, kSeed, kPoints), opt);
      const double want = (-1.0 - 3.0) / alpha + 3.0;
      const std::string l = "alpha=" + std::to_string(alpha);
      o.below(std::abs(constant(r, "k_hat") - want), 1e-8, l + " |k_hat - (k-3)/alpha - 3|");
      for (const char* a : {"axiom_i", "axiom_ii", "axiom_iii", "axiom_iv"}) o.below(entry(r, a), 1e-9, l + " " + a);
      o.below(entry(r, "paraSasakian_nijenhuis"), 1e-9, l + " Nijenhuis");
      o.below(entry(r, "paraSasakian_nabla_phi"), 1e-9, l + " nabla phi");
      o.below(entry(r, "h_vanishes"), 1e-10, l + " h");
      o.below(entry(r, "xi_sectional_minus_one"), 1e-8, l + " xi-sectional");
      o.detail << l.substr(0, 9) << ": k_hat = " << constant(r, "k_hat") << "; ";
    }
  };

  criteria[7] = [&](Outcome& o) {
    for (const char* l : {"heisenberg n=2", "hyperboloid n=2"}) {
      const auto& s = find(l);
      o.below(entry(s.report, "bochner_vanishes"), 1e-8, s.label + " |B|");
      o.below(entry(s.report, "bochner_homothety"), 1e-8, s.label + " |B'/alpha - B|");
    }
    const auto w = support::manifest_structure("warped_n2.json");
    SuiteOptions opt;
    opt.groups = {"bochner", "bochner_homothety"};
    opt.seed = kSeed;
    const auto r = run_suite(w, sample_points(w, kSeed, 50), opt);
    o.below(entry(r, "bochner_symmetries"), 1e-10, "non-constant phsc example symmetries");
    o.below(entry(r, "bochner_homothety"), 1e-8, "non-constant phsc example |B'/alpha - B|");
    o.detail << "|B| on the non-constant example = " << entry(r, "bochner_vanishes");
  };

  criteria[8] = [&](Outcome& o) {
    const auto& h = find("heisenberg n=2");
    const auto& q = find("hyperboloid n=2");
    o.below(std::abs(constant(h.report, "a") - 2.0), 1e-8, "Heisenberg a");
    o.below(std::abs(constant(h.report, "b") + 6.0), 1e-8, "Heisenberg b");
    o.below(std::abs(constant(q.report, "a") + 4.0), 1e-8, "hyperboloid a");
    o.below(std::abs(constant(q.report, "b") - 0.0), 1e-8, "hyperboloid b");
    for (const auto& s : suites) {
      const int n = s.structure.n();
      o.below(std::abs(constant(s.report, "a") + constant(s.report, "b") + 2.0 * n), 1e-10, s.label + " |a + b + 2n|");
      o.below(entry(s.report, "eta_einstein"), 1e-8, s.label + " eta-Einstein fit");
    }
    o.detail << "Heisenberg (" << constant(h.report, "a") << ", " << constant(h.report, "b") << "), hyperboloid ("
             << constant(q.report, "a") << ", " << constant(q.report, "b") << ")";
  };

  criteria[9] = [&](Outcome& o) {
    double worst = 0.0;
    for (const auto& s : suites) {
      worst = std::max({worst, entry(s.report, "nabla_tilde_g"), entry(s.report, "nabla_tilde_phi"),
                        entry(s.report, "nabla_tilde_torsion"), entry(s.report, "nabla_tilde_riemann_tilde")});
      for (const char* c : {"nabla_tilde_g", "nabla_tilde_xi", "nabla_tilde_eta", "nabla_tilde_phi"})
        o.below(entry(s.report, c), 1e-9, s.label + " " + c);
      o.below(entry(s.report, "riemann_tilde_relation"), 1e-8, s.label + " canonical curvature relation");
      o.below(entry(s.report, "nabla_tilde_torsion"), 1e-8, s.label + " nabla~T");
      o.below(entry(s.report, "nabla_tilde_riemann_tilde"), 1e-8, s.label + " nabla~R~");
      o.below(entry(s.report, "torsion_closed_form"), 1e-8, s.label + " torsion closed form");
      if (s.label.rfind("heisenberg", 0) == 0) o.below(constant(s.report, "riemann_tilde_max"), 1e-9, s.label + " |R~|");
      if (s.label.rfind("hyperboloid", 0) == 0)
        o.below(entry(s.report, "riemann_tilde_space_form"), 1e-8, s.label + " R~ space-form model");
    }
    o.detail << "max parallelism residual " << worst;
  };

  criteria[10] = [&](Outcome& o) {
    const char* names[] = {"nabla_eta_equals_phi", "nabla_xi_equals_minus_phi", "nabla_phi_identity",
                           "second_nabla_eta",     "second_nabla_xi",           "curvature_xi_contraction",
                           "phi_curvature_identity_1", "phi_curvature_identity_2", "phi_curvature_identity_3",
                           "ricci_tilde_relation", "ricci_tilde_parasasakian",  "ricci_tilde_horizontal",
                           "space_form_ricci",     "space_form_scalar"};
    double worst = 0.0;
    for (const auto& s : suites) {
      for (const char* c : names) {
        o.below(entry(s.report, c), 1e-8, s.label + " " + c);
        worst = std::max(worst, entry(s.report, c));
      }
      o.below(entry(s.report, "phsc_quartic_form"), 1e-9, s.label + " quartic phsc form");
    }
    o.detail << "worst identity residual " << worst;
  };

  criteria[11] = [&](Outcome& o) {
    for (const auto& s : suites) o.below(entry(s.report, "wpc_equals_bochner"), 1e-8, s.label + " |W - B|");
    const auto w = support::manifest_structure("warped_n2.json");
    SuiteOptions opt;
    opt.groups = {"wpc"};
    opt.seed = kSeed;
    const auto r = run_suite(w, sample_points(w, kSeed, 50), opt);
    o.below(entry(r, "wpc_equals_bochner"), 1e-8, "non-constant phsc example |W - B|");
    o.detail << "non-constant phsc example |W - B| = " << entry(r, "wpc_equals_bochner");
  };

  criteria[12] = [&](Outcome& o) {
    const auto m = load_manifest(support::manifest_path("negative_metric_scaled.json"));
    const auto r = run_manifest(m);
    o.require(entry(r.report, "axiom_iv") > 1e-2, "scaled metric axiom (iv) residual > 1e-2");
    o.require(run_cli("check " + support::manifest_path("negative_metric_scaled.json")) == 1, "scaled metric exit code 1");
    StructureOverrides ov;
    ov.phi_perturb = StructureOverrides::PhiPerturbation{0, 2, 1e-2};
    const auto bent = with_overrides(builtin_heisenberg(1), ov);
    const auto c = classify(bent, sample_points(bent, kSeed, 50));
    o.require(!c.paraSasakian, "perturbed phi reported non-paraSasakian");
    o.require(run_cli("check " + support::manifest_path("negative_phi_perturbed.json")) == 1, "perturbed phi exit code 1");
    o.detail << "axiom (iv) residual under g*1.1 = " << entry(r.report, "axiom_iv");
  };

  criteria[13] = [&](Outcome& o) {
    const auto& coords = support::corpus_coords();
    const auto& p = support::corpus_point();
    double w1 = 0.0, w2 = 0.0;
    for (const auto& text : support::corpus()) {
      const auto ast = parse(text, coords);
      const Jet j = eval_jet(ast, p);
      support::Fn f = [&](const std::vector<double>& y) { return evaluate(ast, y); };
      for (int a = 0; a < 3; ++a) {
        w1 = std::max(w1, support::rel_err(j.d1(a), support::fd_partial(f, p, {a}, 1e-3)));
        for (int b = 0; b < 3; ++b) w2 = std::max(w2, support::rel_err(j.d2(a, b), support::fd_partial(f, p, {a, b}, 1e-2)));
      }
    }
    o.require(support::corpus().size() == 20, "20-expression corpus");
    o.below(w1, 1e-5, "order-1 relative error");
    o.below(w2, 1e-4, "order-2 relative error");
    double wc = 0.0;
    for (int n = 1; n <= 2; ++n) {
      const auto s = builtin_hyperboloid(n);
      for (const auto& q : sample_points(s, kSeed, 10))
        wc = std::max(wc, support::max_diff(christoffel(s, q).values(), support::fd_christoffel(s, q)));
    }
    o.below(wc, 1e-5, "hyperboloid Christoffel vs finite differences");
    o.detail << "order 1: " << w1 << ", order 2: " << w2 << ", Christoffel: " << wc;
  };

  int failures = 0;
  for (auto& [k, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "paracurv/analysis.hpp"
#include "paracurv/errors.hpp"
#include "paracurv/verifier.hpp"
#include "support.hpp"

using namespace paracurv;

namespace {

std::vector<Point> points_for(const CharteredStructure& s, int count = 12, std::uint64_t seed = 2024) {
  return sample_points(s, seed, count);
}

/// Horizontal vector: v − η(v)ξ.
Vec horizontal(const PointCurvature& c, Vec v) {
  const double e = pairing(c.eta, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= e * c.xi[i];
  return v;
}

}  // namespace

TEST_CASE("both builtins are paraSasakian and para-CR") {
  for (const auto& s : {builtin_heisenberg(2), builtin_hyperboloid(2)}) {
    CAPTURE(s.name());
    const auto c = classify(s, points_for(s));
    CHECK(c.paracontact_metric);
    CHECK(c.paraSasakian);
    CHECK(c.para_CR);
    CHECK(c.details.pass());
    REQUIRE(c.details.find("h_vanishes") != nullptr);
    CHECK(c.details.find("h_vanishes")->residual < 1e-10);
  }
}

TEST_CASE("scaling the metric breaks the compatibility axioms") {
  StructureOverrides o;
  o.metric_scale = 1.1;
  const auto s = with_overrides(builtin_heisenberg(1), o);
  const auto r = check_axioms(s, points_for(s));
  CHECK_FALSE(r.pass());
  REQUIRE(r.find("axiom_iv") != nullptr);
  CHECK(r.find("axiom_iv")->residual > 1e-2);
  CHECK_FALSE(r.verdicts.at("paracontact_metric"));
}

TEST_CASE("a perturbed phi is not paraSasakian") {
  StructureOverrides o;
  o.phi_perturb = StructureOverrides::PhiPerturbation{0, 2, 0.01};
  const auto s = with_overrides(builtin_heisenberg(1), o);
  const auto c = classify(s, points_for(s));
  CHECK_FALSE(c.paraSasakian);
  CHECK_FALSE(c.details.pass());
}

TEST_CASE("constant paraholomorphic sectional curvature of the builtins") {
  SUBCASE("Heisenberg") {
    for (int n = 1; n <= 3; ++n) {
      const auto s = builtin_heisenberg(n);
      const auto fit = space_form_fit(s, points_for(s, 6));
      CHECK(fit.k_hat == doctest::Approx(3.0).epsilon(1e-10));
      CHECK(fit.residual_max < 1e-8);
    }
  }
  SUBCASE("hyperboloid") {
    for (int n = 1; n <= 2; ++n) {
      const auto s = builtin_hyperboloid(n);
      const auto fit = space_form_fit(s, points_for(s, 6));
      CHECK(fit.k_hat == doctest::Approx(-1.0).epsilon(1e-10));
      CHECK(fit.residual_max < 1e-8);
      CHECK(fit.ricci_residual < 1e-8);
      CHECK(fit.scalar_residual < 1e-8);
    }
  }
}

TEST_CASE("phsc is constant on random sections and both formulas agree") {
  const auto s = builtin_hyperboloid(2);
  std::mt19937_64 rng(77);
  for (const auto& p : points_for(s, 5)) {
    PointGeometry geo(s, p);
    for (int k = 0; k < 10; ++k) {
      const auto v = random_phsc_vector(geo, rng);
      const double a = phsc(geo, v);
      CHECK(a == doctest::Approx(-1.0).epsilon(1e-9));
      CHECK(std::abs(phsc_quartic(geo, v) - a) < 1e-9);
      const auto u = random_horizontal(geo, rng);
      CHECK(xi_sectional(geo, u.u) == doctest::Approx(-1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("sections that cannot be normalized are rejected") {
  const auto s = builtin_heisenberg(1);
  const std::vector<double> p = {0.0, 0.0, 0.0};
  PointGeometry geo(s, p);
  // At the origin ∂u ± ∂v are horizontal and null.
  CHECK_THROWS_AS(xi_sectional(geo, std::vector<double>{1.0, 1.0, 0.0}), IsotropicVector);
  CHECK_THROWS_AS(xi_sectional(geo, std::vector<double>{1.0, 0.0, 1.0}), NotHorizontal);
  CHECK_THROWS_AS(phsc(geo, std::vector<double>{1.0, 1.0, 0.0}), IsotropicSection);
  CHECK_THROWS_AS(sectional_curvature(geo, std::vector<double>{1.0, 0.0, 0.0}, std::vector<double>{2.0, 0.0, 0.0}),
                  IsotropicSection);
}

TEST_CASE("D-homothety moves the constant as (k - 3)/alpha + 3") {
  const auto base = builtin_hyperboloid(2);
  for (const double alpha : {0.5, 2.0, 3.0}) {
    CAPTURE(alpha);
    const auto s = d_homothetic(base, alpha);
    const auto pts = points_for(s, 6);
    const auto fit = space_form_fit(s, pts);
    CHECK(std::abs(fit.k_hat - ((-1.0 - 3.0) / alpha + 3.0)) < 1e-8);
    CHECK(fit.residual_max < 1e-8);
    const auto c = classify(s, pts);
    CHECK(c.paraSasakian);
  }
}

TEST_CASE("eta-Einstein constants") {
  const auto h = builtin_heisenberg(2);
  const auto fh = eta_einstein_fit(h, points_for(h, 6));
  CHECK(fh.a == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fh.b == doctest::Approx(-6.0).epsilon(1e-10));
  const auto q = builtin_hyperboloid(2);
  const auto fq = eta_einstein_fit(q, points_for(q, 6));
  CHECK(std::abs(fq.a + 4.0) < 1e-8);
  CHECK(std::abs(fq.b) < 1e-8);
  CHECK(std::abs(fq.a + fq.b + 4.0) < 1e-10);
  CHECK(fq.a_closed_form_residual < 1e-8);
  CHECK(fq.b_closed_form_residual < 1e-8);
}

TEST_CASE("the PC-Bochner tensor") {
  SUBCASE("vanishes for constant phsc") {
    for (const auto& s : {builtin_heisenberg(2), builtin_hyperboloid(2)}) {
      for (const auto& p : points_for(s, 4)) CHECK(max_abs(pc_bochner(s, p).B) < 1e-8);
    }
  }
  SUBCASE("keeps its symmetries where it does not vanish") {
    const auto s = support::manifest_structure("warped_n2.json");
    double largest = 0.0;
    for (auto& c : point_curvatures(s, points_for(s, 8))) {
      const auto b = pc_bochner(c);
      largest = std::max(largest, max_abs(b.B));
      const auto sym = bochner_symmetries(c, b.B);
      CHECK(sym.max() < 1e-10);
    }
    CHECK(largest > 1e-3);  // the example is not trivially Bochner-flat
  }
  SUBCASE("is invariant under D-homothety up to alpha") {
    const auto s = support::manifest_structure("warped_n2.json");
    const auto r = bochner_homothety_check(s, 3.0, points_for(s, 6));
    CHECK(r.pass());
  }
}

TEST_CASE("W^pc equals B on horizontal vectors") {
  const auto s = support::manifest_structure("warped_n2.json");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& c : point_curvatures(s, points_for(s, 5))) {
    const auto B = pc_bochner(c).B;
    for (int k = 0; k < 10; ++k) {
      std::vector<Vec> v(4, Vec(5));
      for (auto& x : v) {
        for (auto& e : x) e = u(rng);
        x = horizontal(c, x);
      }
      const double w = wpc(c, v[0], v[1], v[2], v[3]);
      const double b = quadrilinear(B, v[0], v[1], v[2], v[3]);
      CHECK(std::abs(w - b) < 1e-8);
    }
    CHECK_THROWS_AS(wpc(c, c.xi.data(), c.xi.data(), c.xi.data(), c.xi.data()), NotHorizontal);
  }
}

TEST_CASE("the identity suite passes on paraSasakian inputs") {
  for (const auto& s : {builtin_heisenberg(1), builtin_hyperboloid(1), support::manifest_structure("warped_n1.json")}) {
    CAPTURE(s.name());
    const auto r = identity_suite(s, points_for(s, 8));
    const bool constant_phsc = s.name().rfind("custom", 0) != 0;
    for (const auto& e : r.entries) {
      CAPTURE(e.name);
      // The custom example has non-constant phsc; every other identity holds.
      if (e.name == "phsc_constant") {
        CHECK(e.pass == constant_phsc);
      } else {
        CHECK(e.pass);
      }
    }
  }
}

TEST_CASE("full suite results do not depend on the thread count") {
  const auto s = builtin_hyperboloid(1);
  const auto pts = points_for(s, 9);
  SuiteOptions opt;
  opt.groups = {suite_groups().begin(), suite_groups().end()};
  opt.seed = 8;
  setenv("PARACURV_THREADS", "1", 1);
  const auto one = run_suite(s, pts, opt);
  setenv("PARACURV_THREADS", "4", 1);
  const auto four = run_suite(s, pts, opt);
  unsetenv("PARACURV_THREADS");
  REQUIRE(one.entries.size() == four.entries.size());
  for (std::size_t k = 0; k < one.entries.size(); ++k) {
    CHECK(one.entries[k].name == four.entries[k].name);
    CHECK(one.entries[k].residual == four.entries[k].residual);
  }
  CHECK(one.constants == four.constants);
  CHECK(one.verdicts == four.verdicts);
  CHECK(one.pass());
}

TEST_CASE("evaluation failures report the point") {
  const std::string manifest = R"json({
    "schema": "paracurv.manifest/1",
    "manifold": {"custom": {
      "coords": ["u1", "v1", "t"],
      "g": [["v1^2 + sqrt(1 + 4*u1)", "-v1*u1", "-v1"], ["-v1*u1", "u1^2 - 1", "u1"], ["-v1", "u1", "1"]],
      "phi": [["", "1", ""], ["1", "", ""], ["-u1", "v1", ""]],
      "xi": ["", "", "1"],
      "eta": ["-v1", "u1", "1"]}}
  })json";
  const auto m = parse_manifest(manifest);
  const auto s = build_structure(m);
  const std::vector<Point> pts = {{0.1, 0.1, 0.1}, {-0.5, 0.2, 0.3}};
  try {
    (void)check_axioms(s, pts);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(e.point() == pts[1]);
  }
}

TEST_CASE("even-dimensional input is refused") {
  const auto amb = AmbientParaKaehler(2).as_structure();
  CHECK_THROWS_AS(classify(amb, points_for(amb, 2)), NotParacontact);
  CHECK_THROWS_AS(space_form_fit(amb, points_for(amb, 2)), NotParacontact);
}

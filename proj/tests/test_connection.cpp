#include <doctest.h>

#include <cmath>
#include <vector>

#include "paracurv/analysis.hpp"
#include "paracurv/connection.hpp"
#include "paracurv/errors.hpp"
#include "paracurv/sampling.hpp"
#include "support.hpp"

using namespace paracurv;

TEST_CASE("hyperboloid Christoffel symbols match a finite-difference oracle") {
  for (int n = 1; n <= 2; ++n) {
    const auto s = builtin_hyperboloid(n);
    for (const auto& p : sample_points(s, 5, 10)) {
      const auto jet = christoffel(s, p).values();
      const auto fd = support::fd_christoffel(s, p);
      CHECK(support::max_diff(jet, fd) < 1e-5);
    }
  }
}

TEST_CASE("Riemann tensor matches differences of the Christoffel symbols") {
  const auto s = support::manifest_structure("warped_n2.json");
  const int d = s.dim();
  for (const auto& p : sample_points(s, 8, 4)) {
    const auto gam = christoffel(s, p).values();
    const auto R = riemann(s, p).riem_up;
    std::vector<TensorValue> dgam;  // dgam[m] = ∂_m Γ
    for (int m = 0; m < d; ++m) {
      std::vector<double> a = p, b = p;
      const double h = 1e-4;
      a[static_cast<std::size_t>(m)] += h;
      b[static_cast<std::size_t>(m)] -= h;
      dgam.push_back((christoffel(s, a).values() - christoffel(s, b).values()) * (0.5 / h));
    }
    double worst = 0.0;
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k) {
            double want = dgam[static_cast<std::size_t>(i)].at({l, j, k}) - dgam[static_cast<std::size_t>(j)].at({l, i, k});
            for (int m = 0; m < d; ++m) want += gam.at({l, i, m}) * gam.at({m, j, k}) - gam.at({l, j, m}) * gam.at({m, i, k});
            worst = std::max(worst, std::abs(R.at({l, i, j, k}) - want));
          }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("Heisenberg sectional curvature of the contact plane") {
  const auto s = builtin_heisenberg(1);
  const std::vector<double> p = {0.25, -0.5, 0.1};
  const double u = p[0], v = p[1];
  const std::vector<double> U = {1.0, 0.0, v}, V = {0.0, 1.0, -u};
  const auto c = riemann(s, p);
  CHECK(quadrilinear(c.riem_down, U, V, V, U) == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(c.scalar == doctest::Approx(2.0).epsilon(1e-12));
  PointGeometry geo(s, p);
  CHECK(sectional_curvature(geo, U, V) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("curvature symmetries hold on every structure") {
  for (const auto& s : {builtin_hyperboloid(2), support::manifest_structure("warped_n2.json"), builtin_heisenberg(2)}) {
    CAPTURE(s.name());
    const int d = s.dim();
    for (const auto& p : sample_points(s, 3, 3)) {
      const auto c = riemann(s, p);
      const auto& R = c.riem_down;
      const double scale = 1.0 + max_abs(R);
      double worst = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
              const double r = R.at({i, j, k, l});
              worst = std::max({worst, std::abs(r + R.at({j, i, k, l})), std::abs(r + R.at({i, j, l, k})),
                                std::abs(r - R.at({k, l, i, j})), std::abs(r + R.at({j, k, i, l}) + R.at({k, i, j, l}))});
            }
      CHECK(worst / scale < 1e-12);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) CHECK(c.ricci.at({i, j}) == doctest::Approx(c.ricci.at({j, i})).epsilon(1e-12));
    }
  }
}

TEST_CASE("the canonical connection is metric and preserves the structure") {
  for (const auto& s : {builtin_heisenberg(2), builtin_hyperboloid(2), support::manifest_structure("warped_n2.json")}) {
    CAPTURE(s.name());
    for (const auto& p : sample_points(s, 17, 3)) {
      PointGeometry geo(s, p);
      const auto& can = geo.canonical();
      CHECK(max_abs(covariant_derivative_value(geo.jets().g, can)) < 1e-10);
      CHECK(max_abs(covariant_derivative_value(geo.jets().xi, can)) < 1e-10);
      CHECK(max_abs(covariant_derivative_value(geo.jets().eta, can)) < 1e-10);
      CHECK(max_abs(covariant_derivative_value(geo.jets().phi, can)) < 1e-10);
      const auto T = torsion(can);
      CHECK(max_abs(T - torsion_closed_form(geo)) < 1e-10);
      CHECK(max_abs(geo.curvature(ConnectionKind::canonical).riem_up - riemann_tilde_from_levi_civita(geo)) /
                (1.0 + max_abs(geo.curvature(ConnectionKind::canonical).riem_up)) <
            1e-10);
    }
  }
}

TEST_CASE("Heisenberg is flat for the canonical connection") {
  const auto s = builtin_heisenberg(2);
  for (const auto& p : sample_points(s, 1, 5)) CHECK(max_abs(riemann_tilde(s, p).riem_down) < 1e-12);
}

TEST_CASE("Levi-Civita torsion is rejected") {
  const auto s = builtin_heisenberg(1);
  CHECK_THROWS_AS(torsion(christoffel(s, std::vector<double>{0.0, 0.0, 0.0})), DimensionError);
}

TEST_CASE("torsion and canonical curvature are parallel") {
  const auto s = builtin_hyperboloid(1);
  const auto r = parallel_check(s, sample_points(s, 2, 10));
  CHECK(r.pass());
  CHECK(r.find("nabla_tilde_torsion") != nullptr);
  CHECK(r.find("nabla_tilde_riemann_tilde") != nullptr);
  const auto amb = AmbientParaKaehler(1).as_structure();
  CHECK_THROWS_AS(parallel_check(amb, sample_points(amb, 2, 2)), NotParacontact);
}

TEST_CASE("h vanishes on paraSasakian structures") {
  const auto s = support::manifest_structure("warped_n1.json");
  for (const auto& p : sample_points(s, 4, 5)) CHECK(max_abs(lie_derivative_h(s, p)) < 1e-12);
}

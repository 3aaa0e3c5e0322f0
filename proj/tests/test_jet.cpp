#include <doctest.h>

#include <cmath>
#include <random>

#include "paracurv/errors.hpp"
#include "paracurv/jet.hpp"
#include "paracurv/tensor.hpp"
#include "support.hpp"

using namespace paracurv;

TEST_CASE("products of constants have no partials") {
  const Jet a = Jet::constant(2, 2.0);
  const Jet b = Jet::constant(2, 3.0);
  const Jet c = a * b;
  CHECK(c.value() == 6.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(c.d1(i) == 0.0);
    for (int j = 0; j < 2; ++j) CHECK(c.d2(i, j) == 0.0);
  }
}

TEST_CASE("product rule at order one") {
  const Jet u = Jet::variable(2, 0, 2.0, 1);
  const Jet v = Jet::variable(2, 1, 3.0, 1);
  const Jet w = u * v;
  CHECK(w.order() == 1);
  CHECK(w.value() == 6.0);
  CHECK(w.d1(0) == 3.0);
  CHECK(w.d1(1) == 2.0);
}

TEST_CASE("sqrt(1+u^2) first derivative against a central difference") {
  const Jet u = Jet::variable(1, 0, 0.5);
  const Jet r = sqrt(1.0 + u * u);
  const double h = 1e-5;
  const double fd = (std::sqrt(1 + (0.5 + h) * (0.5 + h)) - std::sqrt(1 + (0.5 - h) * (0.5 - h))) / (2 * h);
  CHECK(std::abs(r.d1(0) - fd) / std::abs(fd) < 1e-6);
}

TEST_CASE("binary operations take the lower order") {
  const Jet a = Jet::variable(3, 0, 0.2, 1);
  const Jet b = Jet::variable(3, 1, 0.4, 3);
  CHECK((a * b).order() == 1);
  CHECK((a + b).order() == 1);
  CHECK((b / a).order() == 1);
  CHECK((b * b).order() == 3);
}

TEST_CASE("a zero-dimensional jet acts as a constant") {
  const Jet x = Jet::variable(2, 0, 1.5);
  const Jet k = Jet::constant(0, 4.0);
  const Jet y = x * k + k;
  CHECK(y.dim() == 2);
  CHECK(y.value() == doctest::Approx(10.0));
  CHECK(y.d1(0) == doctest::Approx(4.0));
}

TEST_CASE("second and third partials are exactly symmetric") {
  const int d = 3;
  const Jet x = Jet::variable(d, 0, 0.3), y = Jet::variable(d, 1, -0.2), z = Jet::variable(d, 2, 0.7);
  const Jet f = exp(x * y) * sinh(z - x) / (2.0 + y * z * z) + log(3.0 + x * y * z);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CHECK(f.d2(i, j) == f.d2(j, i));
      for (int k = 0; k < d; ++k) {
        CHECK(f.d3(i, j, k) == f.d3(j, i, k));
        CHECK(f.d3(i, j, k) == f.d3(k, j, i));
        CHECK(f.d3(i, j, k) == f.d3(i, k, j));
      }
    }
}

TEST_CASE("partial() shifts derivatives down one order") {
  const Jet x = Jet::variable(2, 0, 0.4), y = Jet::variable(2, 1, 0.9);
  const Jet f = pow(x, 3) * y + cosh(x * y);
  const Jet fx = f.partial(0);
  CHECK(fx.order() == 2);
  CHECK(fx.value() == doctest::Approx(f.d1(0)));
  CHECK(fx.d1(1) == doctest::Approx(f.d2(0, 1)));
  CHECK(fx.d2(0, 1) == doctest::Approx(f.d3(0, 0, 1)));
}

TEST_CASE("domain errors carry the offending value") {
  const Jet x = Jet::variable(1, 0, -2.0);
  try {
    (void)sqrt(x);
    FAIL("sqrt of a negative value must throw");
  } catch (const DomainError& e) {
    CHECK(e.offending_value() == -2.0);
  }
  CHECK_THROWS_AS((void)log(x + 2.0), DomainError);
  CHECK_THROWS_AS((void)(Jet::constant(1, 1.0) / (x + 2.0)), DomainError);
  CHECK_THROWS_AS((void)pow(x + 2.0, -1), DomainError);
}

TEST_CASE("all supported functions agree with finite differences up to order three") {
  using Unary = Jet (*)(const Jet&);
  struct Case {
    const char* name;
    Unary jet;
    double (*plain)(double);
    double at;
  };
  const Case cases[] = {
      {"sqrt", [](const Jet& a) { return sqrt(a); }, [](double v) { return std::sqrt(v); }, 1.3},
      {"exp", [](const Jet& a) { return exp(a); }, [](double v) { return std::exp(v); }, 0.4},
      {"log", [](const Jet& a) { return log(a); }, [](double v) { return std::log(v); }, 1.7},
      {"sinh", [](const Jet& a) { return sinh(a); }, [](double v) { return std::sinh(v); }, -0.6},
      {"cosh", [](const Jet& a) { return cosh(a); }, [](double v) { return std::cosh(v); }, 0.8},
      {"reciprocal", [](const Jet& a) { return reciprocal(a); }, [](double v) { return 1.0 / v; }, 1.4},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    // Feed a non-trivial inner function so the chain rule is exercised.
    const Jet x = Jet::variable(2, 0, 0.3), y = Jet::variable(2, 1, -0.2);
    const Jet inner = c.at + x * y + 0.5 * x;
    const Jet f = c.jet(inner);
    support::Fn plain = [&](const std::vector<double>& p) { return c.plain(c.at + p[0] * p[1] + 0.5 * p[0]); };
    const std::vector<double> p = {0.3, -0.2};
    CHECK(support::rel_err(f.d1(0), support::fd_partial(plain, p, {0}, 1e-3)) < 1e-7);
    CHECK(support::rel_err(f.d2(0, 1), support::fd_partial(plain, p, {0, 1}, 1e-2)) < 1e-6);
    CHECK(support::rel_err(f.d3(0, 0, 1), support::fd_partial(plain, p, {0, 0, 1}, 2e-2)) < 1e-4);
  }
}

TEST_CASE("integer powers match repeated multiplication") {
  const Jet x = Jet::variable(2, 0, 0.7), y = Jet::variable(2, 1, 1.1);
  const Jet b = x + y * y;
  const Jet p4 = pow(b, 4);
  const Jet m4 = b * b * b * b;
  for (std::size_t k = 0; k < p4.coefficients().size(); ++k) {
    CHECK(p4.coefficients()[k] == doctest::Approx(m4.coefficients()[k]).epsilon(1e-13));
  }
  const Jet pm2 = pow(b, -2);
  const Jet inv2 = reciprocal(b * b);
  for (std::size_t k = 0; k < pm2.coefficients().size(); ++k) {
    CHECK(pm2.coefficients()[k] == doctest::Approx(inv2.coefficients()[k]).epsilon(1e-13));
  }
  CHECK(pow(b, 0).value() == 1.0);
  CHECK(pow(b, 0).d1(0) == 0.0);
}

TEST_CASE("LU inversion over jets reproduces the identity jet") {
  const int d = 3, n = 4;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Jet> vars;
  for (int i = 0; i < d; ++i) vars.push_back(Jet::variable(d, i, u(rng)));
  std::vector<Jet> a;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet e = Jet::constant(d, i == j ? 3.0 : u(rng));
      for (int k = 0; k < d; ++k) e += u(rng) * vars[static_cast<std::size_t>(k)] * vars[static_cast<std::size_t>((k + i + j) % d)];
      a.push_back(e);
    }
  LuDecomposition<Jet> lu(a, n);
  const auto inv = lu.inverse(Jet::constant(d, 0.0), Jet::constant(d, 1.0));
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc = Jet::constant(d, 0.0);
      for (int k = 0; k < n; ++k) acc += a[static_cast<std::size_t>(i * n + k)] * inv[static_cast<std::size_t>(k * n + j)];
      const auto c = acc.coefficients();
      for (std::size_t q = 0; q < c.size(); ++q) {
        const double want = (q == 0 && i == j) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(c[q] - want));
      }
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("singular matrices are rejected") {
  std::vector<double> a = {1, 2, 2, 4};
  CHECK_THROWS_AS(LuDecomposition<double>(a, 2), SingularMetric);
}

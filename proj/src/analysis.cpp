#include "paracurv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "paracurv/errors.hpp"

namespace paracurv {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

// NaN dominates so a broken evaluation can never pass.
void update_max(double& m, double v) {
  if (std::isnan(v) || v > m) m = v;
}

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

TensorValue make(int d, Valence v) { return TensorValue(d, v, 0.0); }

template <class F>
void for2(int d, F&& f) {
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) f(a, b);
}
template <class F>
void for3(int d, F&& f) {
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) f(a, b, c);
}
template <class F>
void for4(int d, F&& f) {
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) f(a, b, c, e);
}

/// Horizontal projector P^a_b = δ^a_b − ξ^a η_b.
TensorValue projector(const TensorValue& xi, const TensorValue& eta) {
  const int d = xi.dim();
  TensorValue p = make(d, {1, 1});
  for2(d, [&](int a, int b) { p.at({a, b}) = delta(a, b) - xi.at({a}) * eta.at({b}); });
  return p;
}

/// Restricts every covariant slot of a (p,q) tensor to the horizontal
/// distribution: T(P·, P·, ...).
TensorValue project_lower(const TensorValue& t, const TensorValue& P) {
  TensorValue cur = t;
  const int d = t.dim();
  const Valence v = t.valence();
  std::vector<int> idx(sz(v.rank()));
  for (int slot = v.up; slot < v.rank(); ++slot) {
    TensorValue next = make(d, v);
    for (std::size_t f = 0; f < cur.size(); ++f) {
      next.unflatten(f, idx);
      const int b = idx[sz(slot)];
      double acc = 0.0;
      for (int a = 0; a < d; ++a) {
        idx[sz(slot)] = a;
        acc += cur.at(std::span<const int>(idx)) * P.at({a, b});
      }
      next[f] = acc;
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

double normalized_residual(const TensorValue& lhs, const TensorValue& rhs) {
  lhs.require_same_shape(rhs);
  double diff = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) update_max(diff, std::abs(lhs[k] - rhs[k]));
  return diff / (1.0 + max_abs(lhs) + max_abs(rhs));
}

double normalized_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
}

Vec apply_map(const TensorValue& t, std::span<const double> x) {
  const int d = t.dim();
  Vec r(sz(d), 0.0);
  for2(d, [&](int i, int j) { r[sz(i)] += t.at({i, j}) * x[sz(j)]; });
  return r;
}

double bilinear(const TensorValue& b, std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for2(b.dim(), [&](int i, int j) { acc += b.at({i, j}) * x[sz(i)] * y[sz(j)]; });
  return acc;
}

double pairing(const TensorValue& w, std::span<const double> x) {
  double acc = 0.0;
  for (int i = 0; i < w.dim(); ++i) acc += w.at({i}) * x[sz(i)];
  return acc;
}

double quadrilinear(const TensorValue& t, std::span<const double> x, std::span<const double> y,
                    std::span<const double> z, std::span<const double> w) {
  double acc = 0.0;
  for4(t.dim(), [&](int i, int j, int k, int l) { acc += t.at({i, j, k, l}) * x[sz(i)] * y[sz(j)] * z[sz(k)] * w[sz(l)]; });
  return acc;
}

// --- axioms ----------------------------------------------------------------------

TensorValue d_eta(const PointGeometry& geo) {
  const int d = geo.dim();
  const auto& eta = geo.jets().eta;
  TensorValue r = make(d, {0, 2});
  for2(d, [&](int i, int j) { r.at({i, j}) = 0.5 * (eta.at({j}).d1(i) - eta.at({i}).d1(j)); });
  return r;
}

AxiomResiduals axiom_residuals(PointGeometry& geo) {
  const int d = geo.dim();
  const auto& g = geo.g();
  const auto& phi = geo.phi();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  AxiomResiduals r;

  TensorValue phixi = make(d, {1, 0}), etaphi = make(d, {0, 1});
  for2(d, [&](int i, int s) {
    phixi.at({i}) += phi.at({i, s}) * xi.at({s});
    etaphi.at({i}) += eta.at({s}) * phi.at({s, i});
  });
  r.i = std::max(normalized_residual(phixi, make(d, {1, 0})), normalized_residual(etaphi, make(d, {0, 1})));

  TensorValue phi2 = make(d, {1, 1}), id_minus = make(d, {1, 1});
  for3(d, [&](int i, int j, int s) { phi2.at({i, j}) += phi.at({i, s}) * phi.at({s, j}); });
  for2(d, [&](int i, int j) { id_minus.at({i, j}) = delta(i, j) - xi.at({i}) * eta.at({j}); });
  double eta_xi = 0.0;
  for (int i = 0; i < d; ++i) eta_xi += eta.at({i}) * xi.at({i});
  r.ii = std::max(normalized_residual(eta_xi, 1.0), normalized_residual(phi2, id_minus));

  TensorValue gphiphi = make(d, {0, 2}), rhs3 = make(d, {0, 2});
  const auto& phil = geo.phi_lower();
  for3(d, [&](int i, int j, int a) { gphiphi.at({i, j}) += phi.at({a, i}) * phil.at({a, j}); });
  for2(d, [&](int i, int j) { rhs3.at({i, j}) = -g.at({i, j}) + eta.at({i}) * eta.at({j}); });
  r.iii = normalized_residual(gphiphi, rhs3);

  r.iv = normalized_residual(phil, d_eta(geo));
  return r;
}

TensorValue nijenhuis(const PointGeometry& geo) {
  const int d = geo.dim();
  const auto& pj = geo.jets().phi;
  const auto& phi = geo.phi();
  TensorValue N = make(d, {1, 2});
  // dphi(s, k, j) = ∂_s φ^k_j
  auto dphi = [&](int s, int k, int j) { return pj.at({k, j}).d1(s); };
  for3(d, [&](int k, int i, int j) {
    double acc = 0.0;
    for (int s = 0; s < d; ++s) {
      acc += phi.at({s, i}) * dphi(s, k, j) - phi.at({s, j}) * dphi(s, k, i);
      acc += phi.at({k, s}) * dphi(j, s, i) - phi.at({k, s}) * dphi(i, s, j);
    }
    N.at({k, i, j}) = acc;
  });
  return N;
}

TensorValue nijenhuis(const CharteredStructure& s, std::span<const double> p) {
  PointGeometry geo(s, p);
  return nijenhuis(geo);
}

StructureResiduals structure_residuals(PointGeometry& geo) {
  const int d = geo.dim();
  const auto& g = geo.g();
  const auto& phi = geo.phi();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  StructureResiduals r;

  const TensorValue N = nijenhuis(geo);
  const TensorValue deta = d_eta(geo);
  TensorValue target = make(d, {1, 2});
  for3(d, [&](int k, int i, int j) { target.at({k, i, j}) = 2.0 * deta.at({i, j}) * xi.at({k}); });
  r.nijenhuis = normalized_residual(N, target);

  const auto& nphi = geo.nabla_phi();
  TensorValue rhs = make(d, {1, 2});
  for3(d, [&](int s, int rr, int i) { rhs.at({s, rr, i}) = eta.at({i}) * delta(s, rr) - xi.at({s}) * g.at({rr, i}); });
  r.nabla_phi = normalized_residual(nphi, rhs);

  r.h = max_abs(values(geo.h_jets()));

  // Integrability on D: the horizontal part of N_φ(X,Y) and η([φX,Y]+[X,φY])
  // = −2(dη(φX,Y) + dη(X,φY)) for X, Y in D.
  const TensorValue P = projector(xi, eta);
  TensorValue PN = make(d, {1, 2});
  for3(d, [&](int k, int i, int j) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) acc += P.at({k, c}) * N.at({c, i, j});
    PN.at({k, i, j}) = acc;
  });
  const TensorValue horizN = project_lower(PN, P);
  TensorValue bracket = make(d, {0, 2});
  for3(d, [&](int i, int j, int a) {
    bracket.at({i, j}) += deta.at({a, j}) * phi.at({a, i}) + deta.at({i, a}) * phi.at({a, j});
  });
  const TensorValue horizB = project_lower(bracket, P);
  r.para_cr_bracket = std::max(max_abs(horizN) / (1.0 + max_abs(N)), max_abs(horizB) / (1.0 + max_abs(deta)));

  r.nabla_tilde_phi = max_abs(covariant_derivative_value(geo.jets().phi, geo.canonical()));
  return r;
}

namespace {

Point to_point(std::span<const double> p) { return Point(p.begin(), p.end()); }

/// Evaluation failures at a point become EvaluationError with the point.
template <class F>
auto at_point(std::span<const double> p, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const EvaluationError&) {
    throw;
  } catch (const Error& e) {
    throw EvaluationError(e.what(), to_point(p));
  }
}

}  // namespace

CheckReport check_axioms(const CharteredStructure& s, std::span<const Point> points, double tol) {
  SuiteOptions opt;
  opt.groups = {"axioms"};
  opt.tol = tol;
  return run_suite(s, points, opt);
}

Classification classify(const CharteredStructure& s, std::span<const Point> points, double tol) {
  SuiteOptions opt;
  opt.groups = {"axioms", "classify"};
  opt.tol = tol;
  Classification c;
  c.details = run_suite(s, points, opt);
  c.paracontact_metric = c.details.verdicts["paracontact_metric"];
  c.paraSasakian = c.details.verdicts["paraSasakian"];
  c.para_CR = c.details.verdicts["para_CR"];
  return c;
}

// --- sections --------------------------------------------------------------------

SectionSample random_horizontal(const PointGeometry& geo, std::mt19937_64& rng) {
  const int d = geo.dim();
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec w(sz(d));
    for (auto& x : w) x = uniform(rng, -1.0, 1.0);
    const double ew = pairing(geo.eta(), w);
    for (int i = 0; i < d; ++i) w[sz(i)] -= ew * geo.xi().at({i});
    const double q = bilinear(geo.g(), w, w);
    if (std::abs(q) < 1e-6) continue;
    const double scale = 1.0 / std::sqrt(std::abs(q));
    for (auto& x : w) x *= scale;
    return {std::move(w), q > 0 ? 1.0 : -1.0, std::abs(q)};
  }
  throw SamplingExhausted("no non-null horizontal vector in 100 attempts");
}

Vec random_phsc_vector(const PointGeometry& geo, std::mt19937_64& rng) {
  const int d = geo.dim();
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec w(sz(d));
    for (auto& x : w) x = uniform(rng, -1.0, 1.0);
    const Vec a = apply_map(geo.phi(), w);
    if (std::abs(bilinear(geo.g(), a, a)) >= 1e-6) return w;
  }
  throw SamplingExhausted("no vector with non-null φυ in 100 attempts");
}

double xi_sectional(PointGeometry& geo, std::span<const double> u_in) {
  const auto& g = geo.g();
  Vec u(u_in.begin(), u_in.end());
  const double q = bilinear(g, u, u);
  if (std::abs(q) < 1e-6) throw IsotropicVector("xi_sectional: g(u,u) = " + std::to_string(q) + " is null");
  if (std::abs(pairing(geo.eta(), u)) > 1e-10 * (1.0 + std::sqrt(std::abs(q)))) {
    throw NotHorizontal("xi_sectional: u is not horizontal");
  }
  const double scale = 1.0 / std::sqrt(std::abs(q));
  for (auto& x : u) x *= scale;
  const Vec xi(geo.xi().data().begin(), geo.xi().data().end());
  const auto& R = geo.curvature(ConnectionKind::levi_civita).riem_down;
  const double gux = bilinear(g, u, xi);
  const double Q = bilinear(g, u, u) * bilinear(g, xi, xi) - gux * gux;
  return quadrilinear(R, u, xi, xi, u) / Q;
}

double phsc(PointGeometry& geo, std::span<const double> v) {
  const auto& g = geo.g();
  const Vec a = apply_map(geo.phi(), v);
  const Vec b = apply_map(geo.phi(), a);
  const double ga = bilinear(g, a, a);
  const double gb = bilinear(g, b, b);
  if (std::abs(ga) < 1e-6 || std::abs(gb) < 1e-6) {
    throw IsotropicSection("phsc: φυ is null (g(φυ,φυ) = " + std::to_string(ga) + ")");
  }
  const auto& R = geo.curvature(ConnectionKind::levi_civita).riem_down;
  return quadrilinear(R, a, b, b, a) / (ga * gb);
}

double phsc_quartic(PointGeometry& geo, std::span<const double> w) {
  const auto& g = geo.g();
  const auto& phi = geo.phi();
  const auto& eta = geo.eta();
  const auto& R = geo.curvature(ConnectionKind::levi_civita).riem_down;
  const double ew = pairing(eta, w);
  const double Pw = bilinear(g, w, w) - ew * ew;
  if (std::abs(Pw) < 1e-6) throw IsotropicSection("phsc: horizontal part of υ is null");
  // Σ φ^a_k φ^b_i R_{a j h b} w^k w^j w^h w^i = R(φw, w, w, φw)
  const Vec pw = apply_map(phi, w);
  const double num = quadrilinear(R, pw, w, w, pw) - ew * ew * Pw;
  return -num / (Pw * Pw);
}

double sectional_curvature(PointGeometry& geo, std::span<const double> x, std::span<const double> y) {
  const auto& g = geo.g();
  const double gxy = bilinear(g, x, y);
  const double Q = bilinear(g, x, x) * bilinear(g, y, y) - gxy * gxy;
  if (std::abs(Q) < 1e-6) throw IsotropicSection("sectional_curvature: degenerate plane (Q = " + std::to_string(Q) + ")");
  const auto& R = geo.curvature(ConnectionKind::levi_civita).riem_down;
  return quadrilinear(R, x, y, y, x) / Q;
}

// --- point curvature and fits -------------------------------------------------------

PointCurvature point_curvature(PointGeometry& geo) {
  PointCurvature c;
  c.point = geo.point();
  c.n = geo.n();
  c.g = geo.g();
  c.ginv = geo.ginv();
  c.phi = geo.phi();
  c.phil = geo.phi_lower();
  c.xi = geo.xi();
  c.eta = geo.eta();
  const auto& lc = geo.curvature(ConnectionKind::levi_civita);
  c.riem_down = lc.riem_down;
  c.ricci = lc.ricci;
  c.scalar = lc.scalar;
  const auto& ct = geo.curvature(ConnectionKind::canonical);
  c.riem_down_tilde = ct.riem_down;
  c.ricci_tilde = ct.ricci;
  c.scalar_tilde = ct.scalar;
  return c;
}

std::vector<PointCurvature> point_curvatures(const CharteredStructure& s, std::span<const Point> points) {
  s.n();
  std::vector<PointCurvature> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = at_point(points[i], [&] {
      PointGeometry geo(s, points[i]);
      return point_curvature(geo);
    });
  });
  return out;
}

namespace {

/// Terms of the constant-phsc model: R = a·G1 + b·G2 with a = (k−3)/4 and
/// b = (k+1)/4.
void model_parts(const PointCurvature& c, TensorValue& G1, TensorValue& G2) {
  const int d = c.g.dim();
  const auto& g = c.g;
  const auto& e = c.eta;
  const auto& f = c.phil;
  G1 = make(d, {0, 4});
  G2 = make(d, {0, 4});
  for4(d, [&](int m, int j, int h, int l) {
    G1.at({m, j, h, l}) = g.at({m, l}) * g.at({h, j}) - g.at({j, l}) * g.at({h, m});
    G2.at({m, j, h, l}) = g.at({h, m}) * e.at({j}) * e.at({l}) + g.at({l, j}) * e.at({m}) * e.at({h}) -
                          g.at({l, m}) * e.at({j}) * e.at({h}) - g.at({h, j}) * e.at({l}) * e.at({m}) +
                          f.at({h, j}) * f.at({m, l}) - f.at({h, m}) * f.at({j, l}) + 2.0 * f.at({m, j}) * f.at({h, l});
  });
}

}  // namespace

TensorValue space_form_model(const PointCurvature& c, double k) {
  TensorValue G1, G2;
  model_parts(c, G1, G2);
  return G1 * ((k - 3.0) / 4.0) + G2 * ((k + 1.0) / 4.0);
}

TensorValue space_form_model_tilde(const PointCurvature& c, double k) {
  TensorValue G1, G2;
  model_parts(c, G1, G2);
  return (G1 + G2) * ((k - 3.0) / 4.0);
}

SpaceFormFit space_form_fit(std::span<const PointCurvature> data) {
  if (data.empty()) throw DimensionError("space_form_fit: needs at least one point");
  // R − M(0) = k·(M(1) − M(0)); closed-form one-parameter least squares.
  double num = 0.0, den = 0.0;
  for (const auto& c : data) {
    const TensorValue M0 = space_form_model(c, 0.0);
    const TensorValue M1 = space_form_model(c, 1.0) - M0;
    for (std::size_t k = 0; k < M0.size(); ++k) {
      num += (c.riem_down[k] - M0[k]) * M1[k];
      den += M1[k] * M1[k];
    }
  }
  SpaceFormFit fit;
  fit.k_hat = den > 0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  const double k = fit.k_hat;
  for (const auto& c : data) {
    const double res = normalized_residual(c.riem_down, space_form_model(c, k));
    fit.residuals.push_back(res);
    update_max(fit.residual_max, res);
    const int d = c.g.dim();
    const double n = c.n;
    TensorValue lhs = c.ricci * 2.0;
    TensorValue rhs = make(d, {0, 2});
    for2(d, [&](int j, int h) {
      rhs.at({j, h}) = (n * (k - 3.0) + k + 1.0) * c.g.at({h, j}) - (n + 1.0) * (k + 1.0) * c.eta.at({j}) * c.eta.at({h});
    });
    update_max(fit.ricci_residual, normalized_residual(lhs, rhs));
    update_max(fit.scalar_residual,
               normalized_residual(2.0 * c.scalar, n * (2.0 * n + 1.0) * (k - 3.0) + n * (k + 1.0)));
  }
  return fit;
}

SpaceFormFit space_form_fit(const CharteredStructure& s, std::span<const Point> points) {
  const auto data = point_curvatures(s, points);
  return space_form_fit(data);
}

EtaEinsteinFit eta_einstein_fit(std::span<const PointCurvature> data) {
  if (data.empty()) throw DimensionError("eta_einstein_fit: needs at least one point");
  // Normal equations for r ≈ a·g + b·η⊗η over all components and points.
  double gg = 0, ge = 0, ee = 0, rg = 0, re = 0;
  for (const auto& c : data) {
    const int d = c.g.dim();
    for2(d, [&](int i, int j) {
      const double G = c.g.at({i, j});
      const double E = c.eta.at({i}) * c.eta.at({j});
      const double r = c.ricci.at({i, j});
      gg += G * G;
      ge += G * E;
      ee += E * E;
      rg += r * G;
      re += r * E;
    });
  }
  const double det = gg * ee - ge * ge;
  EtaEinsteinFit fit;
  fit.a = (rg * ee - re * ge) / det;
  fit.b = (gg * re - ge * rg) / det;
  for (const auto& c : data) {
    const int d = c.g.dim();
    TensorValue model = make(d, {0, 2});
    for2(d, [&](int i, int j) { model.at({i, j}) = fit.a * c.g.at({i, j}) + fit.b * c.eta.at({i}) * c.eta.at({j}); });
    update_max(fit.residual_max, normalized_residual(c.ricci, model));
    const double n = c.n;
    update_max(fit.a_closed_form_residual, normalized_residual(fit.a, c.scalar / (2.0 * n) + 1.0));
    update_max(fit.b_closed_form_residual, normalized_residual(fit.b, -c.scalar / (2.0 * n) - (2.0 * n + 1.0)));
  }
  return fit;
}

EtaEinsteinFit eta_einstein_fit(const CharteredStructure& s, std::span<const Point> points) {
  const auto data = point_curvatures(s, points);
  return eta_einstein_fit(data);
}

// --- PC-Bochner --------------------------------------------------------------------

BochnerData pc_bochner(const PointCurvature& c) {
  const int d = c.g.dim();
  const double n = c.n;
  const auto& R = c.riem_down;
  const auto& r = c.ricci;
  const auto& g = c.g;
  const auto& f = c.phil;
  const auto& e = c.eta;
  BochnerData out;
  out.kappa_B = -(c.scalar - 2.0 * n) / (2.0 * n + 2.0);
  const double kB = out.kappa_B;
  const double w = 1.0 / (2.0 * n + 4.0);
  // rphi(i,k) = r_{sk} φ^s_i
  TensorValue rphi = make(d, {0, 2});
  for3(d, [&](int i, int k, int s) { rphi.at({i, k}) += r.at({s, k}) * c.phi.at({s, i}); });
  out.B = make(d, {0, 4});
  for4(d, [&](int i, int j, int k, int l) {
    const double ric = r.at({i, k}) * g.at({j, l}) - r.at({j, k}) * g.at({i, l}) + r.at({j, l}) * g.at({i, k}) -
                       r.at({i, l}) * g.at({j, k}) + rphi.at({i, k}) * f.at({j, l}) - rphi.at({j, k}) * f.at({i, l}) +
                       rphi.at({j, l}) * f.at({i, k}) - rphi.at({i, l}) * f.at({j, k}) +
                       2.0 * rphi.at({i, j}) * f.at({k, l}) + 2.0 * rphi.at({k, l}) * f.at({i, j}) -
                       r.at({i, k}) * e.at({j}) * e.at({l}) + r.at({j, k}) * e.at({i}) * e.at({l}) -
                       r.at({j, l}) * e.at({i}) * e.at({k}) + r.at({i, l}) * e.at({j}) * e.at({k});
    const double ff = f.at({i, k}) * f.at({j, l}) - f.at({j, k}) * f.at({i, l}) + 2.0 * f.at({i, j}) * f.at({k, l});
    const double gg = g.at({i, k}) * g.at({j, l}) - g.at({j, k}) * g.at({i, l});
    const double ge = g.at({i, k}) * e.at({j}) * e.at({l}) - g.at({j, k}) * e.at({i}) * e.at({l}) +
                      g.at({j, l}) * e.at({i}) * e.at({k}) - g.at({i, l}) * e.at({j}) * e.at({k});
    out.B.at({i, j, k, l}) =
        R.at({i, j, k, l}) + w * ric - (kB + 2.0 * n) * w * ff + (kB - 4.0) * w * gg - kB * w * ge;
  });
  return out;
}

BochnerData pc_bochner(const CharteredStructure& s, std::span<const double> p) {
  PointGeometry geo(s, p);
  return pc_bochner(point_curvature(geo));
}

double BochnerSymmetries::max() const {
  double m = 0.0;
  for (double v : {antisymmetry, pair, bianchi, trace, xi, phi}) update_max(m, v);
  return m;
}

BochnerSymmetries bochner_symmetries(const PointCurvature& c, const TensorValue& B) {
  const int d = B.dim();
  BochnerSymmetries s;
  const double scale = 1.0 + max_abs(B);
  for4(d, [&](int i, int j, int k, int l) {
    update_max(s.antisymmetry, std::abs(B.at({i, j, k, l}) + B.at({j, i, k, l})) / scale);
    update_max(s.pair, std::abs(B.at({i, j, k, l}) - B.at({k, l, i, j})) / scale);
    update_max(s.bianchi, std::abs(B.at({i, j, k, l}) + B.at({j, k, i, l}) + B.at({k, i, j, l})) / scale);
    double ph = 0.0;
    for (int q = 0; q < d; ++q) ph += B.at({q, j, k, l}) * c.phi.at({q, i}) + B.at({i, q, k, l}) * c.phi.at({q, j});
    update_max(s.phi, std::abs(ph) / scale);
  });
  for3(d, [&](int j, int k, int l) {
    double x = 0.0;
    for (int i = 0; i < d; ++i) x += c.xi.at({i}) * B.at({i, j, k, l});
    update_max(s.xi, std::abs(x) / scale);
  });
  // g^{il} B_{ijkl} has free indices j, k.
  for2(d, [&](int j, int k) {
    double t = 0.0;
    for (int i = 0; i < d; ++i)
      for (int m = 0; m < d; ++m) t += c.ginv.at({i, m}) * B.at({i, j, k, m});
    update_max(s.trace, std::abs(t) / scale);
  });
  return s;
}

CheckReport bochner_homothety_check(const CharteredStructure& s, double alpha, std::span<const Point> points,
                                    double tol) {
  SuiteOptions opt;
  opt.groups = {"bochner_homothety"};
  opt.tol = tol;
  opt.bochner_alpha = alpha;
  return run_suite(s, points, opt);
}

double wpc(const PointCurvature& c, std::span<const double> X, std::span<const double> Y, std::span<const double> Z,
           std::span<const double> W) {
  for (auto v : {X, Y, Z, W}) {
    if (std::abs(pairing(c.eta, v)) > 1e-10) throw NotHorizontal("wpc: arguments must lie in ker η");
  }
  const double n = c.n;
  const auto& g = c.g;
  const auto& rt = c.ricci_tilde;
  const double st = c.scalar_tilde;
  auto G = [&](std::span<const double> a, std::span<const double> b) { return bilinear(g, a, b); };
  auto F = [&](std::span<const double> a, std::span<const double> b) { return bilinear(g, apply_map(c.phi, a), b); };
  auto r = [&](std::span<const double> a, std::span<const double> b) { return bilinear(rt, a, b); };
  const Vec pY = apply_map(c.phi, Y), pZ = apply_map(c.phi, Z), pW = apply_map(c.phi, W);
  const double c1 = st / (4.0 * (n + 1.0) * (n + 2.0));
  const double c2 = 1.0 / (2.0 * (n + 2.0));
  return quadrilinear(c.riem_down_tilde, X, Y, Z, W) - c1 * (G(X, Z) * G(Y, W) - G(Y, Z) * G(X, W)) +
         c1 * (F(X, Z) * F(Y, W) - F(Y, Z) * F(X, W) + 2.0 * F(X, Y) * F(Z, W)) +
         c2 * (G(X, Z) * r(Y, W) - G(Y, Z) * r(X, W) + G(Y, W) * r(X, Z) - G(X, W) * r(Y, Z)) +
         c2 * (F(X, Z) * r(Y, pW) - F(Y, Z) * r(X, pW) + F(Y, W) * r(X, pZ) - F(X, W) * r(Y, pZ)) +
         c2 * (2.0 * F(X, Y) * r(Z, pW) + 2.0 * F(Z, W) * r(X, pY));
}

// --- suites ---------------------------------------------------------------------------

const std::vector<std::string>& suite_groups() {
  static const std::vector<std::string> groups = {"axioms",    "classify", "sectional",   "space_form",
                                                  "eta_einstein", "canonical", "parallel", "identities",
                                                  "bochner",   "bochner_homothety", "wpc"};
  return groups;
}

namespace {

/// Residuals collected at one point, in insertion order.
struct PointResult {
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<double> xi_sectional;  // sampled K(ξ,u)
  std::vector<double> phsc;          // sampled phsc
  std::vector<double> sections;      // sampled sectional curvature of random planes
  PointCurvature curvature;
  bool has_curvature = false;
  double kappa_B = 0.0;
  void add(const std::string& name, double v) { residuals.emplace_back(name, v); }
};

void identity_residuals(PointGeometry& geo, PointResult& out) {
  const int d = geo.dim();
  const auto& g = geo.g();
  const auto& phi = geo.phi();
  const auto& phil = geo.phi_lower();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  const auto& lc = geo.levi_civita();
  const auto& R = geo.curvature(ConnectionKind::levi_civita).riem_down;

  // ∇_iη_j = φ_ij and ∇_iξ^j = −φ^j_i
  out.add("nabla_eta_equals_phi", normalized_residual(geo.nabla_eta(), phil));
  {
    TensorValue rhs = make(d, {1, 1});
    for2(d, [&](int j, int i) { rhs.at({j, i}) = -phi.at({j, i}); });
    out.add("nabla_xi_equals_minus_phi", normalized_residual(geo.nabla_xi(), rhs));
  }
  // ∇_rφ^s_i = η_iδ^s_r − ξ^s g_ri
  {
    TensorValue rhs = make(d, {1, 2});
    for3(d, [&](int s, int r, int i) { rhs.at({s, r, i}) = eta.at({i}) * delta(s, r) - xi.at({s}) * g.at({r, i}); });
    out.add("nabla_phi_identity", normalized_residual(geo.nabla_phi(), rhs));
  }
  // Second derivatives: ∇_k∇_iη_j = g_ik η_j − η_i g_kj and ∇_k∇_iξ^j = g_ik ξ^j − η_i δ^j_k
  {
    const JetTensor neta = covariant_derivative(geo.jets().eta, lc);  // [i][j]
    const TensorValue nn = covariant_derivative_value(neta, lc);      // [k][i][j]
    TensorValue rhs = make(d, {0, 3});
    for3(d, [&](int k, int i, int j) { rhs.at({k, i, j}) = g.at({i, k}) * eta.at({j}) - eta.at({i}) * g.at({k, j}); });
    out.add("second_nabla_eta", normalized_residual(nn, rhs));
    const JetTensor nxi = covariant_derivative(geo.jets().xi, lc);  // [j][i]
    const TensorValue nnx = covariant_derivative_value(nxi, lc);    // [j][k][i]
    TensorValue rhsx = make(d, {1, 2});
    for3(d, [&](int j, int k, int i) { rhsx.at({j, k, i}) = g.at({i, k}) * xi.at({j}) - eta.at({i}) * delta(j, k); });
    out.add("second_nabla_xi", normalized_residual(nnx, rhsx));
  }
  // R_kisl ξ^l = g_ks η_i − g_is η_k
  {
    TensorValue lhs = make(d, {0, 3}), rhs = make(d, {0, 3});
    for3(d, [&](int k, int i, int s) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l) acc += R.at({k, i, s, l}) * xi.at({l});
      lhs.at({k, i, s}) = acc;
      rhs.at({k, i, s}) = g.at({k, s}) * eta.at({i}) - g.at({i, s}) * eta.at({k});
    });
    out.add("curvature_xi_contraction", normalized_residual(lhs, rhs));
  }
  // φ-twisted curvature identities. A(x,y,h,k) = Σ_l φ^l_h R_{xylk},
  // C(m,i,h,k) = Σ_b φ^b_m A(b,i,h,k).
  {
    TensorValue A = make(d, {0, 4}), C = make(d, {0, 4});
    for4(d, [&](int x, int y, int h, int k) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l) acc += phi.at({l, h}) * R.at({x, y, l, k});
      A.at({x, y, h, k}) = acc;
    });
    for4(d, [&](int m, int i, int h, int k) {
      double acc = 0.0;
      for (int b = 0; b < d; ++b) acc += phi.at({b, m}) * A.at({b, i, h, k});
      C.at({m, i, h, k}) = acc;
    });
    // φ^a_jφ^b_iR_ablk = −R_jilk − φ_ikφ_lj + φ_ilφ_kj − g_kjg_il + g_ljg_ik
    TensorValue l1 = make(d, {0, 4}), r1 = make(d, {0, 4});
    for4(d, [&](int j, int i, int l, int k) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) acc += phi.at({a, j}) * phi.at({b, i}) * R.at({a, b, l, k});
      l1.at({j, i, l, k}) = acc;
      r1.at({j, i, l, k}) = -R.at({j, i, l, k}) - phil.at({i, k}) * phil.at({l, j}) + phil.at({i, l}) * phil.at({k, j}) -
                            g.at({k, j}) * g.at({i, l}) + g.at({l, j}) * g.at({i, k});
    });
    out.add("phi_curvature_identity_1", normalized_residual(l1, r1));
    // φ^b_mφ^l_hR_bilk − φ^b_iφ^l_hR_bmlk
    TensorValue l2 = make(d, {0, 4}), r2 = make(d, {0, 4});
    for4(d, [&](int m, int i, int h, int k) {
      l2.at({m, i, h, k}) = C.at({m, i, h, k}) - C.at({i, m, h, k});
      r2.at({m, i, h, k}) = g.at({k, m}) * g.at({i, h}) - g.at({m, h}) * g.at({i, k}) +
                            g.at({i, k}) * eta.at({m}) * eta.at({h}) - g.at({m, k}) * eta.at({i}) * eta.at({h}) +
                            phil.at({h, m}) * phil.at({i, k}) - phil.at({k, m}) * phil.at({i, h});
    });
    out.add("phi_curvature_identity_2", normalized_residual(l2, r2));
    // φ^b_iφ^l_hR_bmlk − φ^b_hφ^l_iR_bmlk
    TensorValue l3 = make(d, {0, 4}), r3 = make(d, {0, 4});
    for4(d, [&](int i, int h, int m, int k) {
      l3.at({i, h, m, k}) = C.at({i, m, h, k}) - C.at({h, m, i, k});
      r3.at({i, h, m, k}) = -R.at({i, h, m, k}) - g.at({k, i}) * g.at({m, h}) + g.at({m, i}) * g.at({h, k}) +
                            phil.at({h, m}) * phil.at({k, i}) - phil.at({h, k}) * phil.at({m, i});
    });
    out.add("phi_curvature_identity_3", normalized_residual(l3, r3));
  }
  // h-tensor properties: ∇ξ = −φ + φh, φh + hφ = 0, tr h = 0, hξ = 0
  {
    const TensorValue h = values(geo.h_jets());
    TensorValue phih = make(d, {1, 1}), hphi = make(d, {1, 1}), rhs = make(d, {1, 1}), hxi = make(d, {1, 0});
    for3(d, [&](int a, int b, int s) {
      phih.at({a, b}) += phi.at({a, s}) * h.at({s, b});
      hphi.at({a, b}) += h.at({a, s}) * phi.at({s, b});
    });
    for2(d, [&](int j, int i) {
      rhs.at({j, i}) = -phi.at({j, i}) + phih.at({j, i});
      hxi.at({j}) += h.at({j, i}) * xi.at({i});
    });
    out.add("h_nabla_xi_relation", normalized_residual(geo.nabla_xi(), rhs));
    out.add("h_anticommutes_phi", max_abs(phih + hphi));
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += h.at({i, i});
    out.add("h_trace", std::abs(tr));
    out.add("h_xi", max_abs(hxi));
  }
}

void tilde_relations(PointGeometry& geo, PointResult& out) {
  const int d = geo.dim();
  const double n = geo.n();
  const auto& g = geo.g();
  const auto& eta = geo.eta();
  const auto& phil = geo.phi_lower();
  const auto& lc = geo.curvature(ConnectionKind::levi_civita);
  const auto& ct = geo.curvature(ConnectionKind::canonical);

  out.add("riemann_tilde_relation", normalized_residual(ct.riem_up, riemann_tilde_from_levi_civita(geo)));
  out.add("ricci_tilde_relation", normalized_residual(ct.ricci, ricci_tilde_from_levi_civita(geo)));

  TensorValue rt = make(d, {0, 2});
  for2(d, [&](int j, int k) {
    rt.at({j, k}) = lc.ricci.at({j, k}) - 2.0 * g.at({j, k}) + 2.0 * (n + 1.0) * eta.at({j}) * eta.at({k});
  });
  out.add("ricci_tilde_parasasakian", normalized_residual(ct.ricci, rt));

  TensorValue Rt = make(d, {0, 4});
  const auto& R = lc.riem_down;
  const auto& f = phil;
  for4(d, [&](int i, int j, int k, int l) {
    Rt.at({i, j, k, l}) = R.at({i, j, k, l}) - f.at({i, k}) * f.at({j, l}) + f.at({j, k}) * f.at({i, l}) -
                          2.0 * f.at({i, j}) * f.at({k, l}) - g.at({i, k}) * eta.at({j}) * eta.at({l}) +
                          g.at({j, k}) * eta.at({i}) * eta.at({l}) + g.at({i, l}) * eta.at({j}) * eta.at({k}) -
                          g.at({j, l}) * eta.at({i}) * eta.at({k});
  });
  out.add("riemann_tilde_parasasakian", normalized_residual(ct.riem_down, Rt));

  // Restricted to D the η-terms drop out.
  const TensorValue P = projector(geo.xi(), eta);
  TensorValue Rh = make(d, {0, 4});
  for4(d, [&](int i, int j, int k, int l) {
    Rh.at({i, j, k, l}) = R.at({i, j, k, l}) - f.at({i, k}) * f.at({j, l}) + f.at({j, k}) * f.at({i, l}) -
                          2.0 * f.at({i, j}) * f.at({k, l});
  });
  out.add("riemann_tilde_horizontal", normalized_residual(project_lower(ct.riem_down, P), project_lower(Rh, P)));
  TensorValue rh = lc.ricci - g * 2.0;
  out.add("ricci_tilde_horizontal", normalized_residual(project_lower(ct.ricci, P), project_lower(rh, P)));
  out.add("scalar_tilde", normalized_residual(ct.scalar, lc.scalar - 2.0 * n));
}

void canonical_residuals(PointGeometry& geo, PointResult& out) {
  const int d = geo.dim();
  const auto& g = geo.g();
  const auto& phi = geo.phi();
  const auto& phil = geo.phi_lower();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  const auto& can = geo.canonical();
  const auto& f = geo.jets();

  out.add("nabla_tilde_g", max_abs(covariant_derivative_value(f.g, can)));
  out.add("nabla_tilde_xi", max_abs(covariant_derivative_value(f.xi, can)));
  out.add("nabla_tilde_eta", max_abs(covariant_derivative_value(f.eta, can)));
  const TensorValue ntphi = covariant_derivative_value(f.phi, can);
  out.add("nabla_tilde_phi", max_abs(ntphi));

  // (∇̃_Xφ)Y = (∇_Xφ)Y + g(X − hX, Y)ξ − η(Y)(X − hX)
  const TensorValue h = values(geo.h_jets());
  {
    const auto& nphi = geo.nabla_phi();
    TensorValue rhs = make(d, {1, 2});
    for3(d, [&](int s, int r, int i) {
      double ghXY = 0.0;
      for (int a = 0; a < d; ++a) ghXY += h.at({a, r}) * g.at({a, i});
      rhs.at({s, r, i}) = nphi.at({s, r, i}) + (g.at({r, i}) - ghXY) * xi.at({s}) -
                          eta.at({i}) * (delta(s, r) - h.at({s, r}));
    });
    out.add("nabla_tilde_phi_formula", normalized_residual(ntphi, rhs));
  }

  const TensorValue T = torsion(can);
  out.add("torsion_closed_form", normalized_residual(T, torsion_closed_form(geo)));
  const TensorValue P = projector(xi, eta);
  {
    TensorValue vert = make(d, {1, 2});
    for3(d, [&](int l, int i, int j) { vert.at({l, i, j}) = 2.0 * phil.at({i, j}) * xi.at({l}); });
    out.add("torsion_horizontal_vertical", normalized_residual(project_lower(T, P), project_lower(vert, P)));
  }
  {
    // T(ξ,Y) = h(Y) and T(ξ,φY) = −φT(ξ,Y)
    TensorValue txi = make(d, {1, 1});
    for3(d, [&](int l, int j, int i) { txi.at({l, j}) += xi.at({i}) * T.at({l, i, j}); });
    out.add("torsion_xi", normalized_residual(txi, h));
    TensorValue lhs = make(d, {1, 1}), rhs = make(d, {1, 1});
    for3(d, [&](int l, int j, int s) {
      lhs.at({l, j}) += txi.at({l, s}) * phi.at({s, j});
      rhs.at({l, j}) -= phi.at({l, s}) * txi.at({s, j});
    });
    out.add("torsion_xi_phi", normalized_residual(lhs, rhs));
  }
}

void parallel_residuals(PointGeometry& geo, PointResult& out) {
  const int d = geo.dim();
  const auto& can = geo.canonical();
  JetTensor T(d, {1, 2});
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) T.at({l, i, j}) = can.gamma.at({l, i, j}) - can.gamma.at({l, j, i});
  out.add("nabla_tilde_torsion", max_abs(covariant_derivative_value(T, can)));
  const auto& ct = geo.curvature(ConnectionKind::canonical);
  out.add("nabla_tilde_riemann_tilde", max_abs(covariant_derivative_value(ct.riem_up_jets, can)));
}

/// Sectional curvature of a random nondegenerate plane (either causal
/// character); reported, not asserted.
double random_plane_curvature(PointGeometry& geo, std::mt19937_64& rng) {
  const int d = geo.dim();
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec x(sz(d)), y(sz(d));
    for (auto& v : x) v = uniform(rng, -1.0, 1.0);
    for (auto& v : y) v = uniform(rng, -1.0, 1.0);
    const double gxy = bilinear(geo.g(), x, y);
    if (std::abs(bilinear(geo.g(), x, x) * bilinear(geo.g(), y, y) - gxy * gxy) < 1e-6) continue;
    return sectional_curvature(geo, x, y);
  }
  throw SamplingExhausted("no nondegenerate plane in 100 attempts");
}

/// Sample j of a per-sample check is assigned to point j mod count.
std::vector<std::size_t> samples_for_point(std::size_t point, std::size_t count, int total) {
  std::vector<std::size_t> out;
  for (std::size_t j = point; j < static_cast<std::size_t>(total); j += count) out.push_back(j);
  return out;
}

struct Reduced {
  std::vector<std::string> order;
  std::map<std::string, double> max;
  void add(const std::string& name, double v) {
    auto it = max.find(name);
    if (it == max.end()) {
      order.push_back(name);
      max[name] = v;
    } else {
      update_max(it->second, v);
    }
  }
};

}  // namespace

CheckReport run_suite(const CharteredStructure& s, std::span<const Point> points, const SuiteOptions& opt) {
  if (points.empty()) throw DimensionError("run_suite: needs at least one point");
  for (const auto& grp : opt.groups) {
    if (std::find(suite_groups().begin(), suite_groups().end(), grp) == suite_groups().end()) {
      throw DimensionError("unknown check group '" + grp + "'");
    }
  }
  auto want = [&](const char* g) { return opt.groups.count(g) > 0; };
  const bool needs_paracontact = std::any_of(opt.groups.begin(), opt.groups.end(), [](const std::string& g) { return g != "axioms"; });
  if (needs_paracontact || want("axioms")) s.n();
  const bool need_curv = want("sectional") || want("space_form") || want("eta_einstein") || want("bochner") ||
                         want("wpc") || want("canonical");
  std::optional<CharteredStructure> homothetic;
  if (want("bochner_homothety")) homothetic = d_homothetic(s, opt.bochner_alpha);

  const std::size_t count = points.size();
  std::vector<PointResult> results(count);
  parallel_for(count, [&](std::size_t idx) {
    const Point& p = points[idx];
    at_point(p, [&] {
      PointGeometry geo(s, p);
      PointResult& out = results[idx];
      if (want("axioms")) {
        const AxiomResiduals a = axiom_residuals(geo);
        out.add("axiom_i", a.i);
        out.add("axiom_ii", a.ii);
        out.add("axiom_iii", a.iii);
        out.add("axiom_iv", a.iv);
        const Signature sig = signature_of(geo.g());
        out.add("signature", sig == s.expected_signature() ? 0.0 : 1.0);
      }
      if (want("classify")) {
        const AxiomResiduals a = axiom_residuals(geo);
        double am = 0.0;
        for (double v : {a.i, a.ii, a.iii, a.iv}) update_max(am, v);
        out.add("__axioms", am);
        const StructureResiduals r = structure_residuals(geo);
        out.add("paraSasakian_nijenhuis", r.nijenhuis);
        out.add("paraSasakian_nabla_phi", r.nabla_phi);
        out.add("h_vanishes", r.h);
        out.add("para_cr_integrability", r.para_cr_bracket);
        out.add("para_cr_nabla_tilde_phi", r.nabla_tilde_phi);
      }
      if (need_curv) {
        out.curvature = point_curvature(geo);
        out.has_curvature = true;
      }
      if (want("sectional")) {
        for (std::size_t j : samples_for_point(idx, count, opt.xi_samples)) {
          auto rng = point_stream(opt.seed, j, StreamTag::xi_sectional);
          const SectionSample u = random_horizontal(geo, rng);
          out.xi_sectional.push_back(xi_sectional(geo, u.u));
        }
        for (std::size_t j : samples_for_point(idx, count, opt.phsc_samples)) {
          auto rng = point_stream(opt.seed, j, StreamTag::phsc);
          const Vec v = random_phsc_vector(geo, rng);
          const double k8 = phsc(geo, v);
          out.phsc.push_back(k8);
          out.add("phsc_quartic_form", normalized_residual(phsc_quartic(geo, v), k8));
        }
        for (std::size_t j : samples_for_point(idx, count, opt.xi_samples)) {
          auto rng = point_stream(opt.seed, j, StreamTag::sections);
          out.sections.push_back(random_plane_curvature(geo, rng));
        }
      }
      if (want("canonical")) {
        canonical_residuals(geo, out);
        out.add("riemann_tilde_relation", normalized_residual(geo.curvature(ConnectionKind::canonical).riem_up,
                                                               riemann_tilde_from_levi_civita(geo)));
      }
      if (want("parallel")) parallel_residuals(geo, out);
      if (want("identities")) {
        identity_residuals(geo, out);
        tilde_relations(geo, out);
      }
      if (want("bochner") || want("wpc")) {
        const BochnerData bd = pc_bochner(out.curvature);
        out.kappa_B = bd.kappa_B;
        if (want("bochner")) {
          out.add("bochner_vanishes", max_abs(bd.B));
          out.add("bochner_symmetries", bochner_symmetries(out.curvature, bd.B).max());
          const double n = out.curvature.n;
          const double k36 = (out.curvature.scalar + 3.0 * n * n + n) / (n * (n + 1.0));
          out.add("bochner_reconstruction",
                  normalized_residual(out.curvature.riem_down, space_form_model(out.curvature, k36)));
        }
        if (want("wpc")) {
          for (std::size_t j : samples_for_point(idx, count, opt.wpc_samples)) {
            auto rng = point_stream(opt.seed, j, StreamTag::wpc);
            Vec q[4];
            for (auto& v : q) v = random_horizontal(geo, rng).u;
            const double b = quadrilinear(bd.B, q[0], q[1], q[2], q[3]);
            const double w = wpc(out.curvature, q[0], q[1], q[2], q[3]);
            out.add("wpc_equals_bochner", normalized_residual(b, w));
          }
        }
      }
      if (want("bochner_homothety")) {
        PointGeometry hg(*homothetic, p);
        const BochnerData b0 = pc_bochner(out.has_curvature ? out.curvature : point_curvature(geo));
        const BochnerData b1 = pc_bochner(point_curvature(hg));
        out.add("bochner_homothety", max_abs(b1.B * (1.0 / opt.bochner_alpha) - b0.B));
      }
      return 0;
    });
  });

  // Sequential reduction keeps the report independent of scheduling.
  CheckReport report;
  report.seed = opt.seed;
  report.point_count = static_cast<int>(count);
  Reduced red;
  for (const auto& r : results)
    for (const auto& [name, v] : r.residuals) red.add(name, v);

  std::vector<PointCurvature> curv;
  if (need_curv) {
    curv.reserve(count);
    for (auto& r : results) curv.push_back(std::move(r.curvature));
  }
  std::optional<SpaceFormFit> fit;
  if (want("space_form") || want("sectional") || want("canonical") || want("bochner")) {
    fit = space_form_fit(curv);
    report.constants["k_hat"] = fit->k_hat;
  }
  const double tol = opt.tol;
  auto emit = [&](const std::string& name) {
    auto it = red.max.find(name);
    if (it != red.max.end()) report.add(name, it->second, tol);
  };

  if (want("axioms")) {
    for (const char* nm : {"axiom_i", "axiom_ii", "axiom_iii", "axiom_iv", "signature"}) emit(nm);
    bool ok = true;
    for (const char* nm : {"axiom_i", "axiom_ii", "axiom_iii", "axiom_iv", "signature"}) {
      ok = ok && red.max[nm] <= tol;
    }
    report.verdicts["paracontact_metric"] = ok;
  }
  if (want("classify")) {
    // Both criteria characterize the same classes only on paracontact metric
    // manifolds, so agreement is checked there and nowhere else.
    const bool paracontact = red.max["__axioms"] <= tol;
    const double rn = red.max["paraSasakian_nijenhuis"];
    const double rp = red.max["paraSasakian_nabla_phi"];
    emit("paraSasakian_nijenhuis");
    emit("paraSasakian_nabla_phi");
    const bool pn = rn <= tol, pp = rp <= tol;
    if (paracontact) {
      // Verdicts must match; when both hold the residuals must also be close.
      const double disagreement = (pn != pp) ? std::abs(rn - rp) + tol : (pn ? std::abs(rn - rp) : 0.0);
      report.add("paraSasakian_criteria_agree", disagreement, std::min(tol, 1e-10));
    }
    emit("h_vanishes");
    const double rc = red.max["para_cr_integrability"];
    const double rt = red.max["para_cr_nabla_tilde_phi"];
    emit("para_cr_integrability");
    emit("para_cr_nabla_tilde_phi");
    const bool cn = rc <= tol, ct = rt <= tol;
    if (paracontact) report.add("para_cr_criteria_agree", cn == ct ? 0.0 : std::abs(rc - rt) + tol, tol);
    report.verdicts["paraSasakian"] = paracontact && pn && pp;
    report.verdicts["para_CR"] = paracontact && cn && ct;
  }
  if (want("sectional")) {
    double xs = 0.0, xmean = 0.0, ps = 0.0, pmean = 0.0;
    int nx = 0, np = 0;
    for (const auto& r : results) {
      for (double v : r.xi_sectional) {
        update_max(xs, std::abs(v + 1.0));
        xmean += v;
        ++nx;
      }
      for (double v : r.phsc) {
        update_max(ps, std::abs(v - fit->k_hat));
        pmean += v;
        ++np;
      }
    }
    report.add("xi_sectional_minus_one", xs, tol);
    report.add("phsc_constant", ps, tol);
    emit("phsc_quartic_form");
    if (nx) report.constants["xi_sectional_mean"] = xmean / nx;
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    for (const auto& r : results)
      for (double v : r.sections) {
        smin = std::min(smin, v);
        smax = std::max(smax, v);
      }
    if (std::isfinite(smin)) {
      report.constants["sectional_min"] = smin;
      report.constants["sectional_max"] = smax;
    }
    if (np) report.constants["phsc_mean"] = pmean / np;
  }
  if (want("space_form")) {
    report.add("space_form_model", fit->residual_max, tol);
    report.add("space_form_ricci", fit->ricci_residual, tol);
    report.add("space_form_scalar", fit->scalar_residual, tol);
    report.verdicts["constant_phsc"] = fit->residual_max <= tol;
  }
  if (need_curv) {
    double s = 0.0, st = 0.0;
    for (const auto& c : curv) {
      s += c.scalar;
      st += c.scalar_tilde;
    }
    report.constants["scalar_mean"] = s / static_cast<double>(count);
    report.constants["scalar_tilde_mean"] = st / static_cast<double>(count);
  }
  if (want("eta_einstein")) {
    const EtaEinsteinFit ef = eta_einstein_fit(curv);
    report.constants["a"] = ef.a;
    report.constants["b"] = ef.b;
    report.add("eta_einstein", ef.residual_max, tol);
    report.add("eta_einstein_a_closed_form", ef.a_closed_form_residual, tol);
    report.add("eta_einstein_b_closed_form", ef.b_closed_form_residual, tol);
    const double n = curv.front().n;
    report.add("eta_einstein_a_plus_b", normalized_residual(ef.a + ef.b, -2.0 * n), tol);
    report.verdicts["eta_einstein"] = ef.residual_max <= tol;
  }
  if (want("canonical")) {
    for (const char* nm : {"nabla_tilde_g", "nabla_tilde_xi", "nabla_tilde_eta", "nabla_tilde_phi",
                           "nabla_tilde_phi_formula", "torsion_closed_form", "torsion_horizontal_vertical",
                           "torsion_xi", "torsion_xi_phi", "riemann_tilde_relation"}) {
      emit(nm);
    }
    double worst = 0.0, rmax = 0.0;
    for (const auto& c : curv) {
      update_max(worst, normalized_residual(c.riem_down_tilde, space_form_model_tilde(c, fit->k_hat)));
      update_max(rmax, max_abs(c.riem_down_tilde));
    }
    report.add("riemann_tilde_space_form", worst, tol);
    report.constants["riemann_tilde_max"] = rmax;
  }
  if (want("parallel")) {
    emit("nabla_tilde_torsion");
    emit("nabla_tilde_riemann_tilde");
  }
  if (want("identities")) {
    for (const char* nm :
         {"nabla_eta_equals_phi", "nabla_xi_equals_minus_phi", "nabla_phi_identity", "second_nabla_eta",
          "second_nabla_xi", "curvature_xi_contraction", "phi_curvature_identity_1", "phi_curvature_identity_2",
          "phi_curvature_identity_3", "h_nabla_xi_relation", "h_anticommutes_phi", "h_trace", "h_xi",
          "riemann_tilde_relation", "ricci_tilde_relation", "ricci_tilde_parasasakian", "riemann_tilde_parasasakian",
          "riemann_tilde_horizontal", "ricci_tilde_horizontal", "scalar_tilde"}) {
      if (!report.find(nm)) emit(nm);
    }
  }
  if (want("bochner")) {
    emit("bochner_vanishes");
    emit("bochner_symmetries");
    emit("bochner_reconstruction");
    // κ_B = −(k−3)n/2 for constant phsc k.
    double kdev = 0.0, kmean = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      update_max(kdev, normalized_residual(results[i].kappa_B, -(fit->k_hat - 3.0) * curv[i].n / 2.0));
      kmean += results[i].kappa_B;
    }
    report.add("kappa_B_consistency", kdev, tol);
    report.constants["kappa_B"] = kmean / static_cast<double>(count);
    report.verdicts["bochner_flat"] = red.max["bochner_vanishes"] <= tol;
  }
  if (want("bochner_homothety")) {
    emit("bochner_homothety");
    report.constants["bochner_alpha"] = opt.bochner_alpha;
  }
  if (want("wpc")) emit("wpc_equals_bochner");
  return report;
}

CheckReport identity_suite(const CharteredStructure& s, std::span<const Point> points, double tol,
                           std::uint64_t seed) {
  SuiteOptions opt;
  // The identities presuppose a paraSasakian structure; the classification
  // entries make that precondition part of the report.
  opt.groups = {"classify", "identities", "sectional"};
  opt.tol = tol;
  opt.seed = seed;
  return run_suite(s, points, opt);
}

CheckReport parallel_check(const CharteredStructure& s, std::span<const Point> points, double tol) {
  SuiteOptions opt;
  opt.groups = {"parallel"};
  opt.tol = tol;
  return run_suite(s, points, opt);
}

}  // namespace paracurv

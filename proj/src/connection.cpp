#include "paracurv/connection.hpp"

#include "paracurv/errors.hpp"

namespace paracurv {

namespace {

using Idx = std::vector<int>;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

JetTensor truncated_copy(const JetTensor& t, int order) { return paracurv::truncated(t, order); }

}  // namespace

TensorValue ConnectionCoeffs::derivative() const {
  const int d = gamma.dim();
  TensorValue r(d, {1, 3}, 0.0);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r.at({l, k, i, j}) = gamma.at({l, i, j}).d1(k);
  return r;
}

// --- building blocks --------------------------------------------------------

JetTensor christoffel_jets(const JetTensor& g, const JetTensor& ginv) {
  const int d = g.dim();
  int order = Jet::kMaxOrder;
  for (const auto& v : g.data()) order = std::min(order, v.order());
  if (order < 1) throw DimensionError("christoffel: metric jets need order >= 1");
  const int out_order = order - 1;
  // dg[k][i][j] = ∂_k g_{ij}
  std::vector<Jet> dg(sz(d * d * d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) dg[sz((k * d + i) * d + j)] = g.at({i, j}).partial(k);
  auto D = [&](int k, int i, int j) -> const Jet& { return dg[sz((k * d + i) * d + j)]; };
  const JetTensor gi = truncated_copy(ginv, out_order);

  std::vector<Jet> low(sz(d * d * d));  // Γ_{ijm}
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int m = 0; m < d; ++m) {
        Jet v = 0.5 * (D(i, j, m) + D(j, i, m) - D(m, i, j));
        low[sz((j * d + i) * d + m)] = v;
        low[sz((i * d + j) * d + m)] = std::move(v);
      }
  JetTensor gamma(d, {1, 2});
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Jet acc = gi.at({l, 0}) * low[sz((i * d + j) * d + 0)];
        for (int m = 1; m < d; ++m) acc += gi.at({l, m}) * low[sz((i * d + j) * d + m)];
        gamma.at({l, j, i}) = acc;
        gamma.at({l, i, j}) = std::move(acc);
      }
  return gamma;
}

JetTensor riemann_jets(const JetTensor& gamma) {
  const int d = gamma.dim();
  int order = Jet::kMaxOrder;
  for (const auto& v : gamma.data()) order = std::min(order, v.order());
  if (order < 1) throw DimensionError("riemann: connection jets need order >= 1");
  const int out = order - 1;
  const JetTensor G = truncated_copy(gamma, out);
  // dG[m][l][i][j] = ∂_m Γ^l_{ij}
  std::vector<Jet> dG(gamma.size() * sz(d));
  for (int m = 0; m < d; ++m)
    for (std::size_t f = 0; f < gamma.size(); ++f) dG[sz(m) * gamma.size() + f] = gamma[f].partial(m);
  auto dgam = [&](int m, int l, int i, int j) -> const Jet& {
    return dG[sz(m) * gamma.size() + sz((l * d + i) * d + j)];
  };
  const Jet zero = Jet::constant(d, 0.0, out);
  JetTensor R(d, {1, 3}, zero);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          Jet v = dgam(i, l, j, k) - dgam(j, l, i, k);
          for (int m = 0; m < d; ++m) {
            v += G.at({l, i, m}) * G.at({m, j, k});
            v -= G.at({l, j, m}) * G.at({m, i, k});
          }
          R.at({l, j, i, k}) = -v;
          R.at({l, i, j, k}) = std::move(v);
        }
  return R;
}

CurvatureBundle curvature_bundle(const JetTensor& gamma, const TensorValue& g, const TensorValue& ginv,
                                 ConnectionKind kind) {
  const int d = gamma.dim();
  CurvatureBundle b;
  b.kind = kind;
  b.riem_up_jets = riemann_jets(gamma);
  b.riem_up = values(b.riem_up_jets);
  b.riem_down = TensorValue(d, {0, 4}, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double acc = 0.0;
          for (int m = 0; m < d; ++m) acc += g.at({l, m}) * b.riem_up.at({m, i, j, k});
          b.riem_down.at({i, j, k, l}) = acc;
        }
  b.ricci = TensorValue(d, {0, 2}, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) acc += ginv.at({i, l}) * b.riem_down.at({i, j, k, l});
      b.ricci.at({j, k}) = acc;
    }
  double s = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) s += ginv.at({j, k}) * b.ricci.at({j, k});
  b.scalar = s;
  return b;
}

// --- covariant derivatives --------------------------------------------------

namespace {

// Shared index walk: for each output component calls
// emit(flat_out, source_index_of_t, m) where the source index excludes m.
template <class Emit>
void for_each_derivative_component(const Valence& v, int d, Emit&& emit) {
  const Valence rv{v.up, v.down + 1};
  const std::size_t total = Tensor<double>::ipow(d, rv.rank());
  Idx ridx(sz(rv.rank()));
  Idx tidx(sz(v.rank()));
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    for (int s = rv.rank() - 1; s >= 0; --s) {
      ridx[sz(s)] = static_cast<int>(rem % sz(d));
      rem /= sz(d);
    }
    const int m = ridx[sz(v.up)];
    for (int s = 0, k = 0; s < rv.rank(); ++s) {
      if (s == v.up) continue;
      tidx[sz(k++)] = ridx[sz(s)];
    }
    emit(f, tidx, m);
  }
}

}  // namespace

JetTensor covariant_derivative(const JetTensor& t, const ConnectionCoeffs& c) {
  const int d = t.dim();
  if (c.gamma.dim() != d) throw DimensionError("covariant_derivative: dimension mismatch");
  int order = Jet::kMaxOrder;
  for (const auto& v : t.data()) order = std::min(order, v.order());
  if (order < 1) throw DimensionError("covariant_derivative: field jets need order >= 1");
  const JetTensor G = truncated_copy(c.gamma, order - 1);
  const JetTensor T = truncated_copy(t, order - 1);
  const Valence v = t.valence();
  JetTensor r(d, {v.up, v.down + 1});
  for_each_derivative_component(v, d, [&](std::size_t f, Idx& idx, int m) {
    Jet acc = t.at(std::span<const int>(idx)).partial(m);
    for (int s = 0; s < v.rank(); ++s) {
      const int orig = idx[sz(s)];
      for (int q = 0; q < d; ++q) {
        idx[sz(s)] = q;
        const Jet& tv = T.at(std::span<const int>(idx));
        if (s < v.up) {
          acc += G.at({orig, m, q}) * tv;
        } else {
          acc -= G.at({q, m, orig}) * tv;
        }
      }
      idx[sz(s)] = orig;
    }
    r[f] = std::move(acc);
  });
  return r;
}

TensorValue covariant_derivative_value(const JetTensor& t, const ConnectionCoeffs& c) {
  const int d = t.dim();
  if (c.gamma.dim() != d) throw DimensionError("covariant_derivative: dimension mismatch");
  const TensorValue G = c.values();
  const TensorValue T = values(t);
  const Valence v = t.valence();
  TensorValue r(d, {v.up, v.down + 1}, 0.0);
  for_each_derivative_component(v, d, [&](std::size_t f, Idx& idx, int m) {
    const Jet& base = t.at(std::span<const int>(idx));
    if (base.order() < 1) throw DimensionError("covariant_derivative: field jets need order >= 1");
    double acc = base.d1(m);
    for (int s = 0; s < v.rank(); ++s) {
      const int orig = idx[sz(s)];
      for (int q = 0; q < d; ++q) {
        idx[sz(s)] = q;
        const double tv = T.at(std::span<const int>(idx));
        acc += s < v.up ? G.at({orig, m, q}) * tv : -G.at({q, m, orig}) * tv;
      }
      idx[sz(s)] = orig;
    }
    r[f] = acc;
  });
  return r;
}

// --- PointGeometry ----------------------------------------------------------

PointGeometry::PointGeometry(const CharteredStructure& s, std::span<const double> point)
    : s_(&s), point_(point.begin(), point.end()), d_(s.dim()), f_(s.fields(point, Jet::kMaxOrder)) {
  const Jet zero = Jet::constant(d_, 0.0);
  const Jet one = Jet::constant(d_, 1.0);
  ginv_ = inverse_metric(f_.g, zero, one);
  g_ = values(f_.g);
  ginv_v_ = values(ginv_);
  phi_ = values(f_.phi);
  xi_ = values(f_.xi);
  eta_ = values(f_.eta);
  phi_low_ = TensorValue(d_, {0, 2}, 0.0);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) {
      double acc = 0.0;
      for (int l = 0; l < d_; ++l) acc += g_.at({i, l}) * phi_.at({l, j});
      phi_low_.at({i, j}) = acc;
    }
}

const ConnectionCoeffs& PointGeometry::levi_civita() {
  if (!lc_) lc_ = ConnectionCoeffs{ConnectionKind::levi_civita, christoffel_jets(f_.g, ginv_)};
  return *lc_;
}

const JetTensor& PointGeometry::h_jets() {
  if (!h_) {
    const int d = d_;
    const int o = Jet::kMaxOrder - 1;
    const JetTensor phi = truncated_copy(f_.phi, o);
    const JetTensor xi = truncated_copy(f_.xi, o);
    std::vector<Jet> dxi(sz(d * d));  // [s][i] = ∂_s ξ^i
    for (int s = 0; s < d; ++s)
      for (int i = 0; i < d; ++i) dxi[sz(s * d + i)] = f_.xi.at({i}).partial(s);
    JetTensor h(d, {1, 1}, Jet::constant(d, 0.0, o));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Jet acc = Jet::constant(d, 0.0, o);
        for (int s = 0; s < d; ++s) {
          acc += xi.at({s}) * f_.phi.at({i, j}).partial(s);
          acc -= phi.at({s, j}) * dxi[sz(s * d + i)];
          acc += phi.at({i, s}) * dxi[sz(j * d + s)];
        }
        h.at({i, j}) = 0.5 * acc;
      }
    h_ = std::move(h);
  }
  return *h_;
}

const ConnectionCoeffs& PointGeometry::canonical() {
  if (!can_) {
    const int d = d_;
    const int o = Jet::kMaxOrder - 1;
    const JetTensor& G = levi_civita().gamma;
    const JetTensor& h = h_jets();
    const JetTensor g = truncated_copy(f_.g, o);
    const JetTensor phi = truncated_copy(f_.phi, o);
    const JetTensor xi = truncated_copy(f_.xi, o);
    const JetTensor eta = truncated_copy(f_.eta, o);
    const Jet zero = Jet::constant(d, 0.0, o);
    JetTensor phil(d, {0, 2}, zero), phih(d, {1, 1}, zero), hphi(d, {0, 2}, zero);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int s = 0; s < d; ++s) phil.at({i, j}) += g.at({i, s}) * phi.at({s, j});
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int s = 0; s < d; ++s) {
          phih.at({i, j}) += phi.at({i, s}) * h.at({s, j});
          hphi.at({i, j}) += h.at({s, i}) * phil.at({s, j});
        }
    JetTensor gt(d, {1, 2});
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          gt.at({l, i, j}) = G.at({l, i, j}) + eta.at({i}) * phi.at({l, j}) +
                             eta.at({j}) * (phi.at({l, i}) - phih.at({l, i})) +
                             (phil.at({i, j}) - hphi.at({i, j})) * xi.at({l});
        }
    can_ = ConnectionCoeffs{ConnectionKind::canonical, std::move(gt)};
  }
  return *can_;
}

const CurvatureBundle& PointGeometry::curvature(ConnectionKind kind) {
  auto& slot = kind == ConnectionKind::levi_civita ? r_lc_ : r_can_;
  if (!slot) {
    const ConnectionCoeffs& c = kind == ConnectionKind::levi_civita ? levi_civita() : canonical();
    slot = curvature_bundle(c.gamma, g_, ginv_v_, kind);
  }
  return *slot;
}

const TensorValue& PointGeometry::nabla_phi() {
  if (!nphi_) nphi_ = covariant_derivative_value(f_.phi, levi_civita());
  return *nphi_;
}

const TensorValue& PointGeometry::nabla_xi() {
  if (!nxi_) nxi_ = covariant_derivative_value(f_.xi, levi_civita());
  return *nxi_;
}

const TensorValue& PointGeometry::nabla_eta() {
  if (!neta_) neta_ = covariant_derivative_value(f_.eta, levi_civita());
  return *neta_;
}

// --- public per-point wrappers ----------------------------------------------

ConnectionCoeffs christoffel(const CharteredStructure& s, std::span<const double> p) {
  PointGeometry geo(s, p);
  return geo.levi_civita();
}

CurvatureBundle riemann(const CharteredStructure& s, std::span<const double> p, ConnectionKind kind) {
  PointGeometry geo(s, p);
  if (kind == ConnectionKind::canonical) geo.n();
  return geo.curvature(kind);
}

TensorValue lie_derivative_h(const CharteredStructure& s, std::span<const double> p) {
  PointGeometry geo(s, p);
  return values(geo.h_jets());
}

ConnectionCoeffs canonical_connection(const CharteredStructure& s, std::span<const double> p) {
  s.n();
  PointGeometry geo(s, p);
  return geo.canonical();
}

CurvatureBundle riemann_tilde(const CharteredStructure& s, std::span<const double> p) {
  return riemann(s, p, ConnectionKind::canonical);
}

TensorValue torsion(const ConnectionCoeffs& c) {
  if (c.kind != ConnectionKind::canonical) throw DimensionError("torsion: expects the canonical connection");
  const int d = c.gamma.dim();
  TensorValue t(d, {1, 2}, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double v = c.gamma.at({l, i, j}).value() - c.gamma.at({l, j, i}).value();
        t.at({l, i, j}) = v;
        t.at({l, j, i}) = -v;
      }
  return t;
}

TensorValue torsion_closed_form(PointGeometry& geo) {
  const int d = geo.dim();
  const TensorValue h = values(geo.h_jets());
  const auto& phi = geo.phi();
  const auto& eta = geo.eta();
  const auto& xi = geo.xi();
  const auto& phil = geo.phi_lower();
  TensorValue phih(d, {1, 1}, 0.0);
  for (int l = 0; l < d; ++l)
    for (int j = 0; j < d; ++j)
      for (int s = 0; s < d; ++s) phih.at({l, j}) += phi.at({l, s}) * h.at({s, j});
  TensorValue t(d, {1, 2}, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        t.at({l, i, j}) = eta.at({i}) * phih.at({l, j}) - eta.at({j}) * phih.at({l, i}) +
                          2.0 * phil.at({i, j}) * xi.at({l});
  return t;
}

TensorValue riemann_tilde_from_levi_civita(PointGeometry& geo) {
  const int d = geo.dim();
  const auto& Ru = geo.curvature(ConnectionKind::levi_civita).riem_up;
  const auto& nphi = geo.nabla_phi();  // [s][r][i] = ∇_r φ^s_i
  const auto& nxi = geo.nabla_xi();    // [j][i] = ∇_i ξ^j
  const auto& neta = geo.nabla_eta();  // [i][j] = ∇_i η_j
  const auto& phi = geo.phi();
  const auto& phil = geo.phi_lower();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  TensorValue r(d, {1, 3}, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double v = Ru.at({l, i, j, k}) + nphi.at({l, i, k}) * eta.at({j}) - nphi.at({l, j, k}) * eta.at({i}) +
                     2.0 * phil.at({i, j}) * phi.at({l, k}) + neta.at({j, k}) * nxi.at({l, i}) -
                     neta.at({i, k}) * nxi.at({l, j});
          for (int s = 0; s < d; ++s) {
            v -= phi.at({l, s}) * nxi.at({s, j}) * eta.at({i}) * eta.at({k});
            v += phi.at({l, s}) * nxi.at({s, i}) * eta.at({j}) * eta.at({k});
            v += xi.at({l}) * neta.at({i, s}) * phi.at({s, k}) * eta.at({j});
            v -= xi.at({l}) * neta.at({j, s}) * phi.at({s, k}) * eta.at({i});
            v -= xi.at({l}) * Ru.at({s, i, j, k}) * eta.at({s});
            v -= eta.at({k}) * Ru.at({l, i, j, s}) * xi.at({s});
          }
          r.at({l, i, j, k}) = v;
        }
  return r;
}

TensorValue ricci_tilde_from_levi_civita(PointGeometry& geo) {
  const int d = geo.dim();
  const auto& cb = geo.curvature(ConnectionKind::levi_civita);
  const auto& nxi = geo.nabla_xi();
  const auto& neta = geo.nabla_eta();
  const auto& g = geo.g();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  TensorValue r(d, {0, 2}, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double v = cb.ricci.at({j, k}) - 2.0 * g.at({j, k}) + 2.0 * eta.at({j}) * eta.at({k});
      for (int s = 0; s < d; ++s) {
        v -= cb.ricci.at({j, s}) * xi.at({s}) * eta.at({k});
        v -= neta.at({s, k}) * nxi.at({s, j});
        for (int q = 0; q < d; ++q) v -= cb.riem_down.at({j, s, q, k}) * xi.at({s}) * xi.at({q});
      }
      r.at({j, k}) = v;
    }
  return r;
}

}  // namespace paracurv

#pragma once

// Shared oracles for the tests and the acceptance binary. Everything here is
// deliberately independent of the jet machinery: derivatives come from
// central finite differences of plain double evaluations.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "paracurv/verifier.hpp"

namespace support {

using Fn = std::function<double(const std::vector<double>&)>;

/// Mixed partial ∂^k f / ∂x_{idx[0]}...∂x_{idx[k-1]} by nested central
/// differences with one Richardson step (error O(h^4)).
inline double fd_partial(const Fn& f, const std::vector<double>& x, const std::vector<int>& idx, double h) {
  auto stencil = [&](double step) {
    const std::size_t k = idx.size();
    double acc = 0.0;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      std::vector<double> y = x;
      double sign = 1.0;
      for (std::size_t s = 0; s < k; ++s) {
        const bool plus = (mask >> s) & 1u;
        y[static_cast<std::size_t>(idx[s])] += plus ? step : -step;
        if (!plus) sign = -sign;
      }
      acc += sign * f(y);
    }
    return acc / std::pow(2.0 * step, static_cast<double>(k));
  };
  return (4.0 * stencil(h / 2) - stencil(h)) / 3.0;
}

/// |a − b| / max(1, |b|).
inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Twenty expressions over (x, y, z) covering every node kind and function.
inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> c = {
      "x*y + z",
      "x^3 - 2*x*y^2",
      "sqrt(1 + x^2 + y^2)",
      "exp(x*y)",
      "ln(2 + x - y)",
      "sinh(x)*cosh(y)",
      "1/(1 + x^2)",
      "(x + y)^-2",
      "exp(-x^2 - y^2)",
      "x/y + y/z",
      "sqrt(3 - x^2)*z",
      "cosh(x*y*z)",
      "ln(1 + x^2*y^2)",
      "(1 + 0.5*x^2)*(2*y + y^3/3)",
      "sinh(x - 2*z)^2",
      "exp(sinh(x))",
      "x^4*y - z^5",
      "sqrt(exp(x) + y^2)",
      "-(x - y)^3/(2 + z^2)",
      "cosh(ln(2 + x^2))*y",
  };
  return c;
}
inline const std::vector<std::string>& corpus_coords() {
  static const std::vector<std::string> c = {"x", "y", "z"};
  return c;
}
inline const std::vector<double>& corpus_point() {
  static const std::vector<double> p = {0.3, -0.7, 0.45};
  return p;
}

inline std::string manifest_path(const std::string& name) { return std::string(PARACURV_MANIFESTS) + "/" + name; }

inline paracurv::CharteredStructure manifest_structure(const std::string& name) {
  return paracurv::build_structure(paracurv::load_manifest(manifest_path(name)));
}

/// Values of g at a point from the structure's plain evaluation (order 0).
inline paracurv::TensorValue metric_at(const paracurv::CharteredStructure& s, const std::vector<double>& p) {
  return paracurv::values(s.fields(p, 0).g);
}

/// Levi-Civita Christoffel symbols from finite differences of metric values.
inline paracurv::TensorValue fd_christoffel(const paracurv::CharteredStructure& s, const std::vector<double>& p,
                                            double h = 1e-3) {
  const int d = s.dim();
  std::vector<paracurv::TensorValue> dg;  // dg[m](i,j) = ∂_m g_ij
  for (int m = 0; m < d; ++m) {
    paracurv::TensorValue t(d, {0, 2}, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Fn f = [&](const std::vector<double>& y) { return metric_at(s, y).at({i, j}); };
        t.at({i, j}) = fd_partial(f, p, {m}, h);
      }
    dg.push_back(std::move(t));
  }
  const paracurv::TensorValue g = metric_at(s, p);
  const paracurv::TensorValue ginv = paracurv::inverse_metric(g, 0.0, 1.0);
  paracurv::TensorValue gam(d, {1, 2}, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int m = 0; m < d; ++m) {
          acc += 0.5 * ginv.at({l, m}) *
                 (dg[static_cast<std::size_t>(i)].at({j, m}) + dg[static_cast<std::size_t>(j)].at({i, m}) -
                  dg[static_cast<std::size_t>(m)].at({i, j}));
        }
        gam.at({l, i, j}) = acc;
      }
  return gam;
}

inline double max_diff(const paracurv::TensorValue& a, const paracurv::TensorValue& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace support

#pragma once

// Levi-Civita and canonical paracontact connections and their curvature.
//
// Conventions (all index placement is fixed here and nowhere else):
//   ∇_{∂i}∂j = Γ^l_{ij} ∂l
//   R(X,Y)Z = ∇_X∇_YZ − ∇_Y∇_XZ − ∇_{[X,Y]}Z,  R(∂i,∂j)∂k = R^l_{ijk}∂l
//   R^l_{ijk} = ∂iΓ^l_{jk} − ∂jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}
//   R_{ijkl} = g_{lm} R^m_{ijk},  r_{jk} = g^{il} R_{ijkl},  s = g^{jk} r_{jk}
// A covariant derivative ∇T puts the derivative index in the first covariant
// slot: (∇φ)^s_{ri} = ∇_r φ^s_i.

#include <optional>
#include <span>
#include <vector>

#include "paracurv/geometry.hpp"
#include "paracurv/tensor.hpp"

namespace paracurv {

enum class ConnectionKind { levi_civita, canonical };

struct ConnectionCoeffs {
  ConnectionKind kind = ConnectionKind::levi_civita;
  JetTensor gamma;  // (1,2) Γ^l_{ij}, jets of order >= 1

  TensorValue values() const { return paracurv::values(gamma); }
  /// (1,3) tensor D^l_{kij} = ∂_k Γ^l_{ij}.
  TensorValue derivative() const;
};

struct CurvatureBundle {
  ConnectionKind kind = ConnectionKind::levi_civita;
  JetTensor riem_up_jets;  // (1,3) R^l_{ijk}, order 1
  TensorValue riem_up;     // (1,3)
  TensorValue riem_down;   // (0,4) R_{ijkl}
  TensorValue ricci;       // (0,2) r_{jk}
  double scalar = 0.0;
};

/// All pointwise quantities of one structure at one point, computed on first
/// use. Not thread-safe; give each worker its own instance.
class PointGeometry {
 public:
  PointGeometry(const CharteredStructure& s, std::span<const double> point);

  const CharteredStructure& structure() const noexcept { return *s_; }
  const std::vector<double>& point() const noexcept { return point_; }
  int dim() const noexcept { return d_; }
  /// n for dim = 2n+1 (NotParacontact otherwise).
  int n() const { return s_->n(); }

  const PointFields& jets() const noexcept { return f_; }
  const JetTensor& ginv_jets() const noexcept { return ginv_; }

  const TensorValue& g() const noexcept { return g_; }
  const TensorValue& ginv() const noexcept { return ginv_v_; }
  const TensorValue& phi() const noexcept { return phi_; }
  const TensorValue& xi() const noexcept { return xi_; }
  const TensorValue& eta() const noexcept { return eta_; }
  /// φ_{ij} = g_{il} φ^l_j.
  const TensorValue& phi_lower() const noexcept { return phi_low_; }

  const ConnectionCoeffs& levi_civita();
  /// h^i_j jets (order 2).
  const JetTensor& h_jets();
  const ConnectionCoeffs& canonical();
  const CurvatureBundle& curvature(ConnectionKind kind);

  /// ∇φ, ∇ξ, ∇η under the Levi-Civita connection (values).
  const TensorValue& nabla_phi();  // (1,2) [s][r][i] = ∇_r φ^s_i
  const TensorValue& nabla_xi();   // (1,1) [j][i] = ∇_i ξ^j
  const TensorValue& nabla_eta();  // (0,2) [i][j] = ∇_i η_j

 private:
  const CharteredStructure* s_;
  std::vector<double> point_;
  int d_;
  PointFields f_;
  JetTensor ginv_;
  TensorValue g_, ginv_v_, phi_, xi_, eta_, phi_low_;
  std::optional<ConnectionCoeffs> lc_, can_;
  std::optional<JetTensor> h_;
  std::optional<CurvatureBundle> r_lc_, r_can_;
  std::optional<TensorValue> nphi_, nxi_, neta_;
};

ConnectionCoeffs christoffel(const CharteredStructure& s, std::span<const double> p);
CurvatureBundle riemann(const CharteredStructure& s, std::span<const double> p,
                        ConnectionKind kind = ConnectionKind::levi_civita);
TensorValue lie_derivative_h(const CharteredStructure& s, std::span<const double> p);
ConnectionCoeffs canonical_connection(const CharteredStructure& s, std::span<const double> p);
CurvatureBundle riemann_tilde(const CharteredStructure& s, std::span<const double> p);

/// Christoffel symbols of the second kind from metric and inverse-metric jets.
JetTensor christoffel_jets(const JetTensor& g, const JetTensor& ginv);
/// Curvature jets (order = order(Γ) − 1) of a connection given as jets.
JetTensor riemann_jets(const JetTensor& gamma);
CurvatureBundle curvature_bundle(const JetTensor& gamma, const TensorValue& g, const TensorValue& ginv,
                                 ConnectionKind kind);

/// Covariant derivative of a jet tensor field; the result has one more
/// covariant slot (leading) and order one less.
JetTensor covariant_derivative(const JetTensor& t, const ConnectionCoeffs& c);
/// Same, returning values only (cheaper; input jets need order >= 1).
TensorValue covariant_derivative_value(const JetTensor& t, const ConnectionCoeffs& c);

/// T^l_{ij} = Γ̃^l_{ij} − Γ̃^l_{ji} (needs the canonical kind).
TensorValue torsion(const ConnectionCoeffs& c);
/// T(X,Y) = η(X)φhY − η(Y)φhX + 2g(X,φY)ξ in components.
TensorValue torsion_closed_form(PointGeometry& geo);
/// Right side of the R̃ relation expressed through Levi-Civita data (1,3).
TensorValue riemann_tilde_from_levi_civita(PointGeometry& geo);
/// Right side of the r̃ relation expressed through Levi-Civita data (0,2).
TensorValue ricci_tilde_from_levi_civita(PointGeometry& geo);

}  // namespace paracurv

#pragma once

// Paracontact analysis: axioms, classification, sectional curvatures, model
// fits, the PC-Bochner tensor, W^pc and the identity suite.
//
// Residuals are normalized, |L − R|_∞ / (1 + |L|_∞ + |R|_∞), unless a check is
// documented as absolute (quantities that must vanish).

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "paracurv/connection.hpp"
#include "paracurv/report.hpp"
#include "paracurv/sampling.hpp"

namespace paracurv {

using Vec = std::vector<double>;

double normalized_residual(const TensorValue& lhs, const TensorValue& rhs);
double normalized_residual(double lhs, double rhs);

// --- small vector helpers ---------------------------------------------------

Vec apply_map(const TensorValue& t11, std::span<const double> x);
double bilinear(const TensorValue& b02, std::span<const double> x, std::span<const double> y);
double pairing(const TensorValue& w01, std::span<const double> x);
double quadrilinear(const TensorValue& t04, std::span<const double> x, std::span<const double> y,
                    std::span<const double> z, std::span<const double> w);

// --- axioms and classification ----------------------------------------------

struct AxiomResiduals {
  double i = 0.0;    // φξ = 0, η∘φ = 0
  double ii = 0.0;   // η(ξ) = 1, φ² = id − η⊗ξ
  double iii = 0.0;  // g(φX,φY) = −g(X,Y) + η(X)η(Y)
  double iv = 0.0;   // g(X,φY) = dη(X,Y)
};
AxiomResiduals axiom_residuals(PointGeometry& geo);

/// dη_{ij} = ½(∂_iη_j − ∂_jη_i).
TensorValue d_eta(const PointGeometry& geo);

/// N^k_{ij} (1,2), coordinate form of N_φ(∂i,∂j).
TensorValue nijenhuis(const PointGeometry& geo);
TensorValue nijenhuis(const CharteredStructure& s, std::span<const double> p);

struct StructureResiduals {
  double nijenhuis = 0.0;        // N_φ − 2dη⊗ξ
  double nabla_phi = 0.0;        // (∇_Xφ)Y + g(X,Y)ξ − η(Y)X
  double h = 0.0;                // |h|_∞ (absolute)
  double para_cr_bracket = 0.0;  // horizontal part of N_φ on D, plus η([φX,Y]+[X,φY]) on D
  double nabla_tilde_phi = 0.0;  // |∇̃φ|_∞ (absolute)
};
StructureResiduals structure_residuals(PointGeometry& geo);

CheckReport check_axioms(const CharteredStructure& s, std::span<const Point> points, double tol = 1e-9);

struct Classification {
  bool paracontact_metric = false;
  bool paraSasakian = false;
  bool para_CR = false;
  CheckReport details;
};
/// Both paraSasakian criteria are evaluated; if they disagree the verdict is
/// false and the agreement entry fails.
Classification classify(const CharteredStructure& s, std::span<const Point> points, double tol = 1e-9);

// --- sections ----------------------------------------------------------------

struct SectionSample {
  Vec u;
  double epsilon = 1.0;  // g(u,u) after normalization
  double margin = 0.0;   // |g(w,w)| before normalization
};

/// Uniform in [−1,1]^d, projected onto ker η, rejected while |g| < 1e-6,
/// normalized to g(u,u) = ±1. SamplingExhausted after 100 attempts.
SectionSample random_horizontal(const PointGeometry& geo, std::mt19937_64& rng);
/// Uniform in [−1,1]^d with |g(φυ,φυ)| >= 1e-6.
Vec random_phsc_vector(const PointGeometry& geo, std::mt19937_64& rng);

/// K(ξ,u); IsotropicVector when |g(u,u)| < 1e-6, NotHorizontal when η(u) ≠ 0.
double xi_sectional(PointGeometry& geo, std::span<const double> u);
/// R(φυ,φ²υ,φ²υ,φυ) / (g(φυ,φυ) g(φ²υ,φ²υ)); IsotropicSection if φυ is null.
double phsc(PointGeometry& geo, std::span<const double> v);
/// The same constant via the quartic form in υ, without building φυ, φ²υ.
double phsc_quartic(PointGeometry& geo, std::span<const double> v);
/// g(R(X,Y)Y,X) / Q; IsotropicSection when |Q| < 1e-6.
double sectional_curvature(PointGeometry& geo, std::span<const double> x, std::span<const double> y);

// --- pointwise curvature data and model fits ---------------------------------

/// Value-level curvature data at one point, enough for every model fit.
struct PointCurvature {
  Point point;
  int n = 0;
  TensorValue g, ginv, phi, phil, xi, eta;
  TensorValue riem_down, ricci;              // Levi-Civita
  TensorValue riem_down_tilde, ricci_tilde;  // canonical
  double scalar = 0.0;
  double scalar_tilde = 0.0;
};
PointCurvature point_curvature(PointGeometry& geo);
std::vector<PointCurvature> point_curvatures(const CharteredStructure& s, std::span<const Point> points);

/// The constant-phsc curvature model R_{mjhl}(k) (0,4).
TensorValue space_form_model(const PointCurvature& c, double k);
/// The matching model for the canonical curvature R̃_{mjhl}(k).
TensorValue space_form_model_tilde(const PointCurvature& c, double k);

struct SpaceFormFit {
  double k_hat = 0.0;
  double residual_max = 0.0;
  std::vector<double> residuals;
  double ricci_residual = 0.0;   // 2r = [n(k−3)+k+1]g − (n+1)(k+1)η⊗η at k̂
  double scalar_residual = 0.0;  // 2s = n(2n+1)(k−3) + n(k+1) at k̂
};
SpaceFormFit space_form_fit(std::span<const PointCurvature> data);
SpaceFormFit space_form_fit(const CharteredStructure& s, std::span<const Point> points);

struct EtaEinsteinFit {
  double a = 0.0;
  double b = 0.0;
  double residual_max = 0.0;
  double a_closed_form_residual = 0.0;  // a = s/(2n) + 1
  double b_closed_form_residual = 0.0;  // b = −s/(2n) − (2n+1)
};
EtaEinsteinFit eta_einstein_fit(std::span<const PointCurvature> data);
EtaEinsteinFit eta_einstein_fit(const CharteredStructure& s, std::span<const Point> points);

// --- PC-Bochner and W^pc -------------------------------------------------------

struct BochnerData {
  TensorValue B;  // (0,4)
  double kappa_B = 0.0;
};
BochnerData pc_bochner(const PointCurvature& c);
BochnerData pc_bochner(const CharteredStructure& s, std::span<const double> p);

struct BochnerSymmetries {
  double antisymmetry = 0.0;  // B_ijkl + B_jikl
  double pair = 0.0;          // B_ijkl − B_klij
  double bianchi = 0.0;       // B_ijkl + B_jkil + B_kijl
  double trace = 0.0;         // g^{il} B_ijkl
  double xi = 0.0;            // ξ^i B_ijkl
  double phi = 0.0;           // B_sjkl φ^s_i + B_iskl φ^s_j
  double max() const;
};
BochnerSymmetries bochner_symmetries(const PointCurvature& c, const TensorValue& B);

/// max over points of |α⁻¹B̄ − B|_∞ (absolute), B̄ from the D-homothetic image.
CheckReport bochner_homothety_check(const CharteredStructure& s, double alpha, std::span<const Point> points,
                                    double tol = 1e-8);

/// W^pc(X,Y,Z,W) with F(X,Y) = g(φX,Y); NotHorizontal unless η vanishes on
/// all four arguments (to 1e-10).
double wpc(const PointCurvature& c, std::span<const double> x, std::span<const double> y, std::span<const double> z,
           std::span<const double> w);

// --- suites --------------------------------------------------------------------

/// max |∇̃T|_∞ and |∇̃R̃|_∞ over the points. NotParacontact for even dimension.
CheckReport parallel_check(const CharteredStructure& s, std::span<const Point> points, double tol = 1e-8);

struct SuiteOptions {
  std::set<std::string> groups;  // see suite_groups()
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int xi_samples = 50;
  int phsc_samples = 50;
  int wpc_samples = 100;
  double bochner_alpha = 3.0;
};

/// Group names understood by run_suite, in report order.
const std::vector<std::string>& suite_groups();

/// Runs the selected groups at the given points. Evaluation failures raise
/// EvaluationError carrying the point; failing identities are report entries.
CheckReport run_suite(const CharteredStructure& s, std::span<const Point> points, const SuiteOptions& opt);

/// Identity suite only (a convenience over run_suite).
CheckReport identity_suite(const CharteredStructure& s, std::span<const Point> points, double tol = 1e-8,
                           std::uint64_t seed = 0);

}  // namespace paracurv

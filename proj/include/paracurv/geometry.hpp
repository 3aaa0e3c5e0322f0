#pragma once

// Manifolds with structure. A CharteredStructure is a single coordinate chart
// carrying component fields g_{ij}, φ^i_j, ξ^i, η_i; the fields come from a
// FieldSource that yields jets at a point.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "paracurv/expr.hpp"
#include "paracurv/tensor.hpp"

namespace paracurv {

/// Jets of the four structure tensors at one point.
struct PointFields {
  JetTensor g;    // (0,2)
  JetTensor phi;  // (1,1), phi^i_j
  JetTensor xi;   // (1,0)
  JetTensor eta;  // (0,1)
};

class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual int dim() const = 0;
  virtual PointFields evaluate(std::span<const double> point, int order) const = 0;
};

struct Interval {
  double lo = -0.8;
  double hi = 0.8;
};

/// Coordinate box plus an optional guard. The guard returns a margin that
/// must be >= 0 inside the chart.
struct Domain {
  std::vector<Interval> box;
  std::function<double(std::span<const double>)> guard;
  std::string guard_description;

  bool in_box(std::span<const double> p) const;
  /// Negative when the guard rejects p; +inf without a guard.
  double guard_margin(std::span<const double> p) const;
  bool contains(std::span<const double> p) const { return in_box(p) && guard_margin(p) >= 0.0; }
};

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Eigenvalue signs of a symmetric matrix (value part); eigenvalues with
/// magnitude below `zero_tol` count as zero.
Signature signature_of(const TensorValue& g, double zero_tol = 1e-12);

class CharteredStructure {
 public:
  /// Evaluates the metric at `reference` (default: box centre) and checks the
  /// signature: (n+1, n) for odd dimensions, or `expected` when given.
  CharteredStructure(std::string name, std::vector<std::string> coords, std::shared_ptr<const FieldSource> source,
                     Domain domain, std::optional<Signature> expected = std::nullopt,
                     std::optional<std::vector<double>> reference = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  /// n with dim = 2n+1; NotParacontact for even dimensions.
  int n() const;
  bool is_odd() const noexcept { return dim() % 2 == 1; }
  const std::vector<std::string>& coordinates() const noexcept { return coords_; }
  const Domain& domain() const noexcept { return domain_; }
  const std::shared_ptr<const FieldSource>& source() const noexcept { return source_; }
  Signature expected_signature() const noexcept { return expected_; }
  std::vector<double> reference_point() const;

  /// DomainError where the guard rejects the point. The box only bounds
  /// sampling; evaluation outside it is allowed.
  PointFields fields(std::span<const double> point, int order = Jet::kMaxOrder) const;

 private:
  std::string name_;
  std::vector<std::string> coords_;
  std::shared_ptr<const FieldSource> source_;
  Domain domain_;
  Signature expected_;
};

/// Component tables for a user-defined structure. Entries are expression
/// text over `coords`; empty strings mean 0.
struct ExpressionTables {
  std::vector<std::string> coords;
  std::vector<std::vector<std::string>> g;
  std::vector<std::vector<std::string>> phi;
  std::vector<std::string> xi;
  std::vector<std::string> eta;
};

/// Parses every component. Only g_{ij} with i <= j is evaluated, so the
/// metric is symmetric by construction; callers that accept full matrices
/// should check the lower triangle themselves.
/// Throws ParseError / UnknownCoordinate / DimensionError.
std::shared_ptr<const FieldSource> expression_source(const ExpressionTables& tables);

/// Flat para-Kähler space R^{2m}: coordinates x_0..x_{m-1}, y_0..y_{m-1},
/// I∂x_i = ∂y_i, I∂y_i = ∂x_i, metric diag(+1 (m times), -1 (m times)).
class AmbientParaKaehler {
 public:
  explicit AmbientParaKaehler(int m);
  int m() const noexcept { return m_; }
  int dim() const noexcept { return 2 * m_; }
  double metric(int a, int b) const noexcept { return a == b ? (a < m_ ? 1.0 : -1.0) : 0.0; }
  /// Index that I maps ∂_a to.
  int paracomplex_image(int a) const noexcept { return a < m_ ? a + m_ : a - m_; }
  std::vector<std::string> coordinate_names() const;
  /// The ambient as a chartered structure: g flat, φ = I, ξ = η = 0.
  CharteredStructure as_structure(double box = 2.0) const;

 private:
  int m_;
};

/// Immersion of a (2n+1)-dimensional chart into flat para-Kähler R^{2n+2}.
/// The normal is the position vector (the hypersurfaces considered are
/// centred quadrics).
struct Embedding {
  AmbientParaKaehler ambient;
  std::vector<std::string> coords;
  std::vector<ExprAst> immersion;  // 2n+2 components, ambient order x_0..x_n, y_0..y_n

  Embedding(AmbientParaKaehler ambient, std::vector<std::string> coords, std::vector<ExprAst> immersion);
  int dim() const noexcept { return static_cast<int>(coords.size()); }
  /// ∂ι/∂q^a as expressions, built once.
  const std::vector<std::vector<ExprAst>>& tangents() const noexcept { return tangents_; }

 private:
  std::vector<std::vector<ExprAst>> tangents_;  // [a][A]
};

struct InductionDiagnostics {
  double normal_norm_residual = 0.0;  // |<N,N> - 1|
  double reconstruction_residual = 0.0;  // |Σ φ^b_a e_b − (η_a N − I e_a)|_∞
  double normal_tangency = 0.0;  // max_a |<N, e_a>|
};

/// Induced structure jets at `point`: g = −<e_a,e_b>, ξ from Σξ^a e_a = IN,
/// η = gξ, φ from Σ_b φ^b_a e_b = η_a N − I e_a (normal equations).
PointFields induce_structure(const Embedding& e, std::span<const double> point, int order = Jet::kMaxOrder,
                             InductionDiagnostics* diagnostics = nullptr);

std::shared_ptr<const FieldSource> embedding_source(std::shared_ptr<const Embedding> e);

CharteredStructure builtin_heisenberg(int n);
CharteredStructure builtin_hyperboloid(int n);
/// The embedding behind builtin_hyperboloid(n).
std::shared_ptr<const Embedding> hyperboloid_embedding(int n);

/// ḡ = αg + (α²−α)η⊗η, ξ̄ = ξ/α, η̄ = αη, φ̄ = φ. InvalidAlpha for α <= 0.
CharteredStructure d_homothetic(const CharteredStructure& s, double alpha);

/// Negative controls: g scaled by a constant, and one φ component shifted.
struct StructureOverrides {
  double metric_scale = 1.0;
  struct PhiPerturbation {
    int row = 0;
    int col = 0;
    double amount = 0.0;
  };
  std::optional<PhiPerturbation> phi_perturb;
};
CharteredStructure with_overrides(const CharteredStructure& s, const StructureOverrides& o);

/// Names accepted by builtin_by_name.
std::vector<std::string> builtin_names();
CharteredStructure builtin_by_name(const std::string& name, int n);

}  // namespace paracurv

#include "paracurv/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "paracurv/errors.hpp"

namespace paracurv {

// --- domain & signature -----------------------------------------------------

bool Domain::in_box(std::span<const double> p) const {
  if (p.size() != box.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= box[i].lo && p[i] <= box[i].hi)) return false;
  }
  return true;
}

double Domain::guard_margin(std::span<const double> p) const {
  if (!guard) return std::numeric_limits<double>::infinity();
  try {
    return guard(p);
  } catch (const DomainError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

Signature signature_of(const TensorValue& g, double zero_tol) {
  const int d = g.dim();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g.at({i, j});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  Signature s;
  for (int i = 0; i < d; ++i) {
    const double ev = es.eigenvalues()(i);
    if (std::abs(ev) < zero_tol) {
      ++s.zero;
    } else if (ev > 0) {
      ++s.positive;
    } else {
      ++s.negative;
    }
  }
  return s;
}

// --- CharteredStructure -----------------------------------------------------

CharteredStructure::CharteredStructure(std::string name, std::vector<std::string> coords,
                                       std::shared_ptr<const FieldSource> source, Domain domain,
                                       std::optional<Signature> expected, std::optional<std::vector<double>> reference)
    : name_(std::move(name)), coords_(std::move(coords)), source_(std::move(source)), domain_(std::move(domain)) {
  const int d = dim();
  if (d < 1) throw DimensionError("structure needs at least one coordinate");
  if (!source_ || source_->dim() != d) throw DimensionError("field source dimension does not match the chart");
  if (domain_.box.empty()) domain_.box.assign(static_cast<std::size_t>(d), Interval{});
  if (static_cast<int>(domain_.box.size()) != d) throw DimensionError("domain box dimension does not match the chart");
  for (const auto& iv : domain_.box) {
    if (!(iv.lo <= iv.hi)) throw DimensionError("domain box interval has lo > hi");
  }
  if (expected) {
    expected_ = *expected;
  } else if (d % 2 == 1) {
    expected_ = {(d - 1) / 2 + 1, (d - 1) / 2, 0};
  } else {
    expected_ = {d / 2, d / 2, 0};
  }
  const std::vector<double> ref = reference ? *reference : reference_point();
  const PointFields f = fields(ref, 0);
  const Signature sig = signature_of(values(f.g));
  if (!(sig == expected_)) {
    std::ostringstream os;
    os << name_ << ": metric signature (" << sig.positive << "," << sig.negative;
    if (sig.zero) os << ", " << sig.zero << " null";
    os << ") at the reference point, expected (" << expected_.positive << "," << expected_.negative << ")";
    throw NotParacontact(os.str());
  }
}

int CharteredStructure::n() const {
  if (!is_odd()) {
    throw NotParacontact(name_ + ": dimension " + std::to_string(dim()) + " is even; paracontact structures need 2n+1");
  }
  return (dim() - 1) / 2;
}

std::vector<double> CharteredStructure::reference_point() const {
  std::vector<double> p;
  p.reserve(domain_.box.size());
  for (const auto& iv : domain_.box) p.push_back(0.5 * (iv.lo + iv.hi));
  return p;
}

PointFields CharteredStructure::fields(std::span<const double> point, int order) const {
  if (static_cast<int>(point.size()) != dim()) {
    throw DimensionError(name_ + ": point has " + std::to_string(point.size()) + " coordinates, expected " +
                         std::to_string(dim()));
  }
  const double margin = domain_.guard_margin(point);
  if (margin < 0.0) {
    throw DomainError(name_ + ": point outside the chart guard (" + domain_.guard_description + ")", margin);
  }
  return source_->evaluate(point, order);
}

// --- expression tables ------------------------------------------------------

namespace {

class ExpressionSource final : public FieldSource {
 public:
  explicit ExpressionSource(const ExpressionTables& t) : d_(static_cast<int>(t.coords.size())) {
    const auto d = static_cast<std::size_t>(d_);
    if (t.g.size() != d || t.phi.size() != d || t.xi.size() != d || t.eta.size() != d) {
      throw DimensionError("expression tables: every table needs " + std::to_string(d) + " rows");
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (t.g[i].size() != d || t.phi[i].size() != d) {
        throw DimensionError("expression tables: row " + std::to_string(i) + " needs " + std::to_string(d) + " entries");
      }
    }
    auto field = [&](const std::string& text) -> std::optional<ScalarField> {
      if (text.find_first_not_of(" \t\n") == std::string::npos) return std::nullopt;
      return ScalarField::from_expression(parse(text, t.coords));
    };
    g_.resize(d * d);
    phi_.resize(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (i <= j) g_[i * d + j] = field(t.g[i][j]);
        phi_[i * d + j] = field(t.phi[i][j]);
      }
      xi_.push_back(field(t.xi[i]));
      eta_.push_back(field(t.eta[i]));
    }
  }

  int dim() const override { return d_; }

  PointFields evaluate(std::span<const double> p, int order) const override {
    const int d = d_;
    const Jet zero = Jet::constant(d, 0.0, order);
    auto eval = [&](const std::optional<ScalarField>& f) { return f ? f->evaluate(p, order) : zero; };
    PointFields out{JetTensor(d, {0, 2}, zero), JetTensor(d, {1, 1}, zero), JetTensor(d, {1, 0}, zero),
                    JetTensor(d, {0, 1}, zero)};
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const auto k = static_cast<std::size_t>(i * d + j);
        if (i <= j) {
          out.g[k] = eval(g_[k]);
        } else {
          out.g[k] = out.g[static_cast<std::size_t>(j * d + i)];
        }
        out.phi[k] = eval(phi_[k]);
      }
      out.xi[static_cast<std::size_t>(i)] = eval(xi_[static_cast<std::size_t>(i)]);
      out.eta[static_cast<std::size_t>(i)] = eval(eta_[static_cast<std::size_t>(i)]);
    }
    return out;
  }

 private:
  int d_;
  std::vector<std::optional<ScalarField>> g_, phi_, xi_, eta_;
};

}  // namespace

std::shared_ptr<const FieldSource> expression_source(const ExpressionTables& tables) {
  return std::make_shared<ExpressionSource>(tables);
}

// --- ambient ----------------------------------------------------------------

AmbientParaKaehler::AmbientParaKaehler(int m) : m_(m) {
  if (m < 1) throw DimensionError("ambient para-Kaehler space needs m >= 1");
}

std::vector<std::string> AmbientParaKaehler::coordinate_names() const {
  std::vector<std::string> names;
  for (int i = 0; i < m_; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 0; i < m_; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

CharteredStructure AmbientParaKaehler::as_structure(double box) const {
  const int d = dim();
  ExpressionTables t;
  t.coords = coordinate_names();
  t.g.assign(static_cast<std::size_t>(d), std::vector<std::string>(static_cast<std::size_t>(d)));
  t.phi = t.g;
  t.xi.assign(static_cast<std::size_t>(d), "");
  t.eta = t.xi;
  for (int a = 0; a < d; ++a) {
    t.g[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = a < m_ ? "1" : "-1";
    t.phi[static_cast<std::size_t>(paracomplex_image(a))][static_cast<std::size_t>(a)] = "1";
  }
  Domain dom;
  dom.box.assign(static_cast<std::size_t>(d), Interval{-box, box});
  return CharteredStructure("ambient(m=" + std::to_string(m_) + ")", t.coords, expression_source(t), dom,
                            Signature{m_, m_, 0});
}

// --- embeddings -------------------------------------------------------------

Embedding::Embedding(AmbientParaKaehler amb, std::vector<std::string> cs, std::vector<ExprAst> imm)
    : ambient(amb), coords(std::move(cs)), immersion(std::move(imm)) {
  if (static_cast<int>(immersion.size()) != ambient.dim()) {
    throw DimensionError("embedding: immersion needs " + std::to_string(ambient.dim()) + " components");
  }
  if (dim() + 1 != ambient.dim()) throw DimensionError("embedding: chart must have codimension one");
  for (const auto& c : immersion) {
    if (c.coordinates() != coords) throw DimensionError("embedding: immersion components use different coordinates");
  }
  tangents_.resize(static_cast<std::size_t>(dim()));
  for (int a = 0; a < dim(); ++a) {
    for (const auto& c : immersion) tangents_[static_cast<std::size_t>(a)].push_back(differentiate(c, a));
  }
}

PointFields induce_structure(const Embedding& e, std::span<const double> point, int order,
                             InductionDiagnostics* diagnostics) {
  const int d = e.dim();
  const int D = e.ambient.dim();
  const auto& amb = e.ambient;
  const Jet zero = Jet::constant(d, 0.0, order);

  std::vector<Jet> N(static_cast<std::size_t>(D));
  for (int A = 0; A < D; ++A) N[static_cast<std::size_t>(A)] = eval_jet(e.immersion[static_cast<std::size_t>(A)], point, order);
  // E[A*d + a] = ∂ι^A/∂q^a
  std::vector<Jet> E(static_cast<std::size_t>(D * d));
  for (int a = 0; a < d; ++a)
    for (int A = 0; A < D; ++A)
      E[static_cast<std::size_t>(A * d + a)] = eval_jet(e.tangents()[static_cast<std::size_t>(a)][static_cast<std::size_t>(A)], point, order);
  auto e_at = [&](int A, int a) -> const Jet& { return E[static_cast<std::size_t>(A * d + a)]; };

  {
    Eigen::MatrixXd jac(D, d);
    for (int A = 0; A < D; ++A)
      for (int a = 0; a < d; ++a) jac(A, a) = e_at(A, a).value();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
    qr.setThreshold(1e-10);
    if (qr.rank() < d) {
      throw RankDeficientJacobian("embedding: Jacobian rank " + std::to_string(qr.rank()) + " < " + std::to_string(d));
    }
  }

  // <u, v> over the ambient metric, for ambient jet vectors given by accessors.
  auto inner = [&](auto&& u, auto&& v) {
    Jet acc = zero;
    for (int A = 0; A < D; ++A) acc += amb.metric(A, A) * (u(A) * v(A));
    return acc;
  };

  std::vector<Jet> gram(static_cast<std::size_t>(d * d), zero);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      Jet v = inner([&](int A) -> const Jet& { return e_at(A, a); }, [&](int A) -> const Jet& { return e_at(A, b); });
      gram[static_cast<std::size_t>(a * d + b)] = v;
      gram[static_cast<std::size_t>(b * d + a)] = std::move(v);
    }
  }
  LuDecomposition<Jet> lu(gram, d);

  auto in_vec = [&](int A) -> const Jet& { return N[static_cast<std::size_t>(amb.paracomplex_image(A))]; };
  std::vector<Jet> rhs(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) rhs[static_cast<std::size_t>(a)] = inner([&](int A) -> const Jet& { return e_at(A, a); }, in_vec);
  std::vector<Jet> xi = lu.solve(rhs);

  PointFields out{JetTensor(d, {0, 2}, zero), JetTensor(d, {1, 1}, zero), JetTensor(d, {1, 0}, zero),
                  JetTensor(d, {0, 1}, zero)};
  for (std::size_t k = 0; k < gram.size(); ++k) out.g[k] = -gram[k];
  for (int a = 0; a < d; ++a) {
    out.xi[static_cast<std::size_t>(a)] = xi[static_cast<std::size_t>(a)];
    Jet acc = zero;
    for (int b = 0; b < d; ++b) acc += out.g.at({a, b}) * xi[static_cast<std::size_t>(b)];
    out.eta[static_cast<std::size_t>(a)] = std::move(acc);
  }
  // Column a of φ: tangent components of η_a N − I e_a.
  for (int a = 0; a < d; ++a) {
    const Jet& eta_a = out.eta[static_cast<std::size_t>(a)];
    std::vector<Jet> target(static_cast<std::size_t>(D));
    for (int A = 0; A < D; ++A) {
      target[static_cast<std::size_t>(A)] = eta_a * N[static_cast<std::size_t>(A)] - e_at(amb.paracomplex_image(A), a);
    }
    for (int b = 0; b < d; ++b) {
      rhs[static_cast<std::size_t>(b)] =
          inner([&](int A) -> const Jet& { return e_at(A, b); }, [&](int A) -> const Jet& { return target[static_cast<std::size_t>(A)]; });
    }
    std::vector<Jet> col = lu.solve(rhs);
    for (int b = 0; b < d; ++b) out.phi.at({b, a}) = std::move(col[static_cast<std::size_t>(b)]);

    if (diagnostics) {
      for (int A = 0; A < D; ++A) {
        double v = -target[static_cast<std::size_t>(A)].value();
        for (int b = 0; b < d; ++b) v += out.phi.at({b, a}).value() * e_at(A, b).value();
        diagnostics->reconstruction_residual = std::max(diagnostics->reconstruction_residual, std::abs(v));
      }
    }
  }
  if (diagnostics) {
    double nn = 0.0;
    for (int A = 0; A < D; ++A) nn += amb.metric(A, A) * N[static_cast<std::size_t>(A)].value() * N[static_cast<std::size_t>(A)].value();
    diagnostics->normal_norm_residual = std::abs(nn - 1.0);
    for (int a = 0; a < d; ++a) {
      double t = 0.0;
      for (int A = 0; A < D; ++A) t += amb.metric(A, A) * N[static_cast<std::size_t>(A)].value() * e_at(A, a).value();
      diagnostics->normal_tangency = std::max(diagnostics->normal_tangency, std::abs(t));
    }
  }
  return out;
}

namespace {

class EmbeddingSource final : public FieldSource {
 public:
  explicit EmbeddingSource(std::shared_ptr<const Embedding> e) : e_(std::move(e)) {}
  int dim() const override { return e_->dim(); }
  PointFields evaluate(std::span<const double> p, int order) const override { return induce_structure(*e_, p, order); }

 private:
  std::shared_ptr<const Embedding> e_;
};

}  // namespace

std::shared_ptr<const FieldSource> embedding_source(std::shared_ptr<const Embedding> e) {
  return std::make_shared<EmbeddingSource>(std::move(e));
}

// --- builtins ---------------------------------------------------------------

CharteredStructure builtin_heisenberg(int n) {
  if (n < 1) throw DimensionError("heisenberg: n must be >= 1");
  const int d = 2 * n + 1;
  const auto sd = static_cast<std::size_t>(d);
  ExpressionTables t;
  for (int k = 1; k <= n; ++k) t.coords.push_back("u" + std::to_string(k));
  for (int k = 1; k <= n; ++k) t.coords.push_back("v" + std::to_string(k));
  t.coords.push_back("t");
  const auto U = [&](int k) { return t.coords[static_cast<std::size_t>(k)]; };
  const auto V = [&](int k) { return t.coords[static_cast<std::size_t>(n + k)]; };

  // η = dt + Σ(u dv − v du)
  t.eta.assign(sd, "");
  for (int k = 0; k < n; ++k) {
    t.eta[static_cast<std::size_t>(k)] = "-" + V(k);
    t.eta[static_cast<std::size_t>(n + k)] = U(k);
  }
  t.eta[sd - 1] = "1";
  t.xi.assign(sd, "");
  t.xi[sd - 1] = "1";

  // g = η⊗η + Σ(du² − dv²)
  t.g.assign(sd, std::vector<std::string>(sd));
  for (std::size_t i = 0; i < sd; ++i) {
    for (std::size_t j = 0; j < sd; ++j) {
      std::string e = "(" + t.eta[i] + ")*(" + t.eta[j] + ")";
      if (i == j && i < static_cast<std::size_t>(n)) e += " + 1";
      if (i == j && i >= static_cast<std::size_t>(n) && i + 1 < sd) e += " - 1";
      t.g[i][j] = e;
    }
  }

  // φ∂u = ∂v − u∂t, φ∂v = ∂u + v∂t, φ∂t = 0; column j is the image of ∂_j.
  t.phi.assign(sd, std::vector<std::string>(sd));
  for (int k = 0; k < n; ++k) {
    t.phi[static_cast<std::size_t>(n + k)][static_cast<std::size_t>(k)] = "1";
    t.phi[sd - 1][static_cast<std::size_t>(k)] = "-" + U(k);
    t.phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(n + k)] = "1";
    t.phi[sd - 1][static_cast<std::size_t>(n + k)] = V(k);
  }
  Domain dom;
  dom.box.assign(sd, Interval{});
  return CharteredStructure("heisenberg(n=" + std::to_string(n) + ")", t.coords, expression_source(t), dom);
}

namespace {

struct HyperboloidText {
  std::vector<std::string> coords;
  std::string radicand;
};

HyperboloidText hyperboloid_text(int n) {
  HyperboloidText h;
  for (int i = 1; i <= n; ++i) h.coords.push_back("x" + std::to_string(i));
  for (int j = 0; j <= n; ++j) h.coords.push_back("y" + std::to_string(j));
  h.radicand = "1";
  for (int i = 1; i <= n; ++i) h.radicand += " - x" + std::to_string(i) + "^2";
  for (int j = 0; j <= n; ++j) h.radicand += " + y" + std::to_string(j) + "^2";
  return h;
}

constexpr double kHyperboloidGuard = 0.1;

}  // namespace

std::shared_ptr<const Embedding> hyperboloid_embedding(int n) {
  if (n < 1) throw DimensionError("hyperboloid: n must be >= 1");
  const HyperboloidText h = hyperboloid_text(n);
  std::vector<ExprAst> imm;
  imm.push_back(parse("sqrt(" + h.radicand + ")", h.coords));
  for (int i = 1; i <= n; ++i) imm.push_back(parse("x" + std::to_string(i), h.coords));
  for (int j = 0; j <= n; ++j) imm.push_back(parse("y" + std::to_string(j), h.coords));
  return std::make_shared<const Embedding>(AmbientParaKaehler(n + 1), h.coords, std::move(imm));
}

CharteredStructure builtin_hyperboloid(int n) {
  auto emb = hyperboloid_embedding(n);
  const HyperboloidText h = hyperboloid_text(n);
  auto radicand = std::make_shared<const ExprAst>(parse(h.radicand, h.coords));
  Domain dom;
  dom.box.assign(static_cast<std::size_t>(2 * n + 1), Interval{});
  dom.guard = [radicand](std::span<const double> p) { return evaluate(*radicand, p) - kHyperboloidGuard; };
  dom.guard_description = "radicand 1 - sum x_i^2 + sum y_j^2 >= 0.1";
  return CharteredStructure("hyperboloid(n=" + std::to_string(n) + ")", h.coords, embedding_source(emb), dom);
}

// --- D-homothety and overrides ---------------------------------------------

namespace {

class DHomotheticSource final : public FieldSource {
 public:
  DHomotheticSource(std::shared_ptr<const FieldSource> base, double alpha) : base_(std::move(base)), alpha_(alpha) {}
  int dim() const override { return base_->dim(); }
  PointFields evaluate(std::span<const double> p, int order) const override {
    PointFields f = base_->evaluate(p, order);
    const int d = dim();
    const double a = alpha_;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        Jet v = a * f.g.at({i, j}) + (a * a - a) * (f.eta.at({i}) * f.eta.at({j}));
        f.g.at({j, i}) = v;
        f.g.at({i, j}) = std::move(v);
      }
    }
    for (int i = 0; i < d; ++i) {
      f.xi.at({i}) *= 1.0 / a;
      f.eta.at({i}) *= a;
    }
    return f;
  }

 private:
  std::shared_ptr<const FieldSource> base_;
  double alpha_;
};

class OverrideSource final : public FieldSource {
 public:
  OverrideSource(std::shared_ptr<const FieldSource> base, StructureOverrides o) : base_(std::move(base)), o_(o) {}
  int dim() const override { return base_->dim(); }
  PointFields evaluate(std::span<const double> p, int order) const override {
    PointFields f = base_->evaluate(p, order);
    if (o_.metric_scale != 1.0) f.g *= o_.metric_scale;
    if (o_.phi_perturb) f.phi.at({o_.phi_perturb->row, o_.phi_perturb->col}) += o_.phi_perturb->amount;
    return f;
  }

 private:
  std::shared_ptr<const FieldSource> base_;
  StructureOverrides o_;
};

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

CharteredStructure d_homothetic(const CharteredStructure& s, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidAlpha("D-homothety needs alpha > 0, got " + format_number(alpha));
  s.n();
  if (alpha == 1.0) return s;
  return CharteredStructure("dhom(" + s.name() + ", alpha=" + format_number(alpha) + ")", s.coordinates(),
                            std::make_shared<DHomotheticSource>(s.source(), alpha), s.domain(), s.expected_signature());
}

CharteredStructure with_overrides(const CharteredStructure& s, const StructureOverrides& o) {
  const int d = s.dim();
  if (!(o.metric_scale > 0.0) || !std::isfinite(o.metric_scale)) {
    throw DimensionError("metric_scale must be a positive number");
  }
  if (o.phi_perturb && (o.phi_perturb->row < 0 || o.phi_perturb->row >= d || o.phi_perturb->col < 0 ||
                        o.phi_perturb->col >= d)) {
    throw DimensionError("phi_perturb index out of range");
  }
  if (o.metric_scale == 1.0 && (!o.phi_perturb || o.phi_perturb->amount == 0.0)) return s;
  std::string name = s.name();
  if (o.metric_scale != 1.0) name += " [g*" + format_number(o.metric_scale) + "]";
  if (o.phi_perturb) {
    name += " [phi^" + std::to_string(o.phi_perturb->row) + "_" + std::to_string(o.phi_perturb->col) + "+" +
            format_number(o.phi_perturb->amount) + "]";
  }
  return CharteredStructure(name, s.coordinates(), std::make_shared<OverrideSource>(s.source(), o), s.domain(),
                            s.expected_signature());
}

std::vector<std::string> builtin_names() { return {"heisenberg", "hyperboloid"}; }

CharteredStructure builtin_by_name(const std::string& name, int n) {
  if (name == "heisenberg") return builtin_heisenberg(n);
  if (name == "hyperboloid") return builtin_hyperboloid(n);
  throw DimensionError("unknown builtin '" + name + "'");
}

}  // namespace paracurv

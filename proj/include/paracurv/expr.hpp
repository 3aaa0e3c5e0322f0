#pragma once

// A small arithmetic language for coordinate component functions:
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := atom ('^' int)?
//   atom   := number | name | '(' expr ')' | func '(' expr ')'
//   func   := sqrt | exp | ln | sinh | cosh
//
// Names resolve to declared coordinates. Exponents are integer literals,
// optionally signed ("x^-2" or "x^(-2)").

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "paracurv/jet.hpp"

namespace paracurv {

enum class BinaryOp { add, sub, mul, div };
enum class Function { sqrt, exp, ln, sinh, cosh };

struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  struct Literal {
    double value;
  };
  struct Coordinate {
    int index;
  };
  struct Negate {
    ExprPtr operand;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Power {
    ExprPtr base;
    int exponent;
  };
  struct Call {
    Function fn;
    ExprPtr arg;
  };
  std::variant<Literal, Coordinate, Negate, Binary, Power, Call> kind;
  SourceSpan span;
};

/// An immutable parsed expression together with the coordinate names it was
/// resolved against. Copies share the node tree.
class ExprAst {
 public:
  ExprAst(ExprPtr root, std::vector<std::string> coords, std::string source)
      : root_(std::move(root)), coords_(std::move(coords)), source_(std::move(source)) {}

  const ExprNode& root() const noexcept { return *root_; }
  ExprPtr root_ptr() const noexcept { return root_; }
  const std::vector<std::string>& coordinates() const noexcept { return coords_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  const std::string& source() const noexcept { return source_; }

 private:
  ExprPtr root_;
  std::vector<std::string> coords_;
  std::string source_;
};

ExprAst parse(std::string_view text, std::span<const std::string> coords);

/// Exact truncated Taylor jet of the expression at `point`.
Jet eval_jet(const ExprAst& ast, std::span<const double> point, int order = Jet::kMaxOrder);

/// Plain double evaluation; shares no code with the jet path.
double evaluate(const ExprAst& ast, std::span<const double> point);

/// Re-parseable text form.
std::string to_string(const ExprAst& ast);

bool structurally_equal(const ExprAst& a, const ExprAst& b);

/// d(ast)/d(coordinate `coord`) as a new expression. Used to obtain tangent
/// vectors of immersions; light constant folding keeps trees small.
ExprAst differentiate(const ExprAst& ast, int coord);

const char* function_name(Function fn) noexcept;

/// A coordinate component function: an expression or a closed form.
class ScalarField {
 public:
  using ClosedForm = std::function<Jet(std::span<const double>, int)>;

  static ScalarField from_expression(ExprAst ast);
  static ScalarField closed_form(int dim, ClosedForm fn, std::string description);
  static ScalarField constant(int dim, double value);

  int dim() const noexcept { return dim_; }
  Jet evaluate(std::span<const double> point, int order = Jet::kMaxOrder) const;
  /// Null for closed forms.
  const ExprAst* expression() const noexcept { return ast_ ? &*ast_ : nullptr; }
  const std::string& description() const noexcept { return description_; }

 private:
  ScalarField() = default;
  int dim_ = 0;
  std::shared_ptr<const ExprAst> ast_;
  ClosedForm closed_;
  std::string description_;
};

}  // namespace paracurv

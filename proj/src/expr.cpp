#include "paracurv/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "paracurv/errors.hpp"

namespace paracurv {

const char* function_name(Function fn) noexcept {
  switch (fn) {
    case Function::sqrt: return "sqrt";
    case Function::exp: return "exp";
    case Function::ln: return "ln";
    case Function::sinh: return "sinh";
    case Function::cosh: return "cosh";
  }
  return "?";
}

namespace {

ExprPtr make(ExprNode::Literal v, SourceSpan s = {}) { return std::make_shared<const ExprNode>(ExprNode{v, s}); }
ExprPtr make(ExprNode::Coordinate v, SourceSpan s = {}) { return std::make_shared<const ExprNode>(ExprNode{v, s}); }
ExprPtr make(ExprNode::Negate v, SourceSpan s = {}) { return std::make_shared<const ExprNode>(ExprNode{std::move(v), s}); }
ExprPtr make(ExprNode::Binary v, SourceSpan s = {}) { return std::make_shared<const ExprNode>(ExprNode{std::move(v), s}); }
ExprPtr make(ExprNode::Power v, SourceSpan s = {}) { return std::make_shared<const ExprNode>(ExprNode{std::move(v), s}); }
ExprPtr make(ExprNode::Call v, SourceSpan s = {}) { return std::make_shared<const ExprNode>(ExprNode{std::move(v), s}); }

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords) : text_(text), coords_(coords) {}

  ExprPtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) {
      expect_set_ = {"expression"};
      fail("empty expression");
    }
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      note("end of input");
      fail(std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // Expected-token bookkeeping: the set describes what would have been
  // accepted at the furthest position reached.
  void note(const std::string& token) {
    if (pos_ > expect_pos_) {
      expect_pos_ = pos_;
      expect_set_.clear();
    }
    if (pos_ == expect_pos_) expect_set_.insert(token);
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    note(std::string(1, c));
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    std::vector<std::string> expected(expect_set_.begin(), expect_set_.end());
    std::string msg = "parse error at offset " + std::to_string(pos_) + ": " + what;
    if (!expected.empty()) {
      msg += " (expected one of:";
      for (const auto& e : expected) msg += " '" + e + "'";
      msg += ")";
    }
    throw ParseError(msg, pos_, expected);
  }

  ExprPtr expr() {
    const std::size_t start = pos_;
    ExprPtr lhs = term();
    for (;;) {
      BinaryOp op;
      if (accept('+')) {
        op = BinaryOp::add;
      } else if (accept('-')) {
        op = BinaryOp::sub;
      } else {
        return lhs;
      }
      ExprPtr rhs = term();
      lhs = make(ExprNode::Binary{op, lhs, rhs}, {start, pos_ - start});
    }
  }

  ExprPtr term() {
    skip_ws();
    const std::size_t start = pos_;
    ExprPtr lhs = unary();
    for (;;) {
      BinaryOp op;
      if (accept('*')) {
        op = BinaryOp::mul;
      } else if (accept('/')) {
        op = BinaryOp::div;
      } else {
        return lhs;
      }
      ExprPtr rhs = unary();
      lhs = make(ExprNode::Binary{op, lhs, rhs}, {start, pos_ - start});
    }
  }

  ExprPtr unary() {
    skip_ws();
    const std::size_t start = pos_;
    if (accept('-')) {
      ExprPtr operand = unary();
      return make(ExprNode::Negate{operand}, {start, pos_ - start});
    }
    return factor();
  }

  ExprPtr factor() {
    skip_ws();
    const std::size_t start = pos_;
    ExprPtr base = atom();
    if (accept('^')) {
      const int e = exponent();
      return make(ExprNode::Power{base, e}, {start, pos_ - start});
    }
    return base;
  }

  int exponent() {
    const bool paren = accept('(');
    skip_ws();
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits_start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ == digits_start) {
      note("integer");
      fail("power exponent must be an integer literal");
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      expect_set_ = {"integer"};
      expect_pos_ = pos_;
      fail("power exponent must be an integer literal");
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + digits_start, text_.data() + pos_, value);
    if (ec != std::errc()) fail("exponent out of range");
    if (paren && !accept(')')) fail("missing ')'");
    return negative ? -value : value;
  }

  ExprPtr atom() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '.')) return number();
    if (pos_ < text_.size() && is_ident_start(text_[pos_])) {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      static const std::pair<const char*, Function> kFunctions[] = {
          {"sqrt", Function::sqrt}, {"exp", Function::exp}, {"ln", Function::ln},
          {"sinh", Function::sinh}, {"cosh", Function::cosh}};
      const auto coord = std::find(coords_.begin(), coords_.end(), name);
      for (const auto& [fname, fn] : kFunctions) {
        if (name != fname) continue;
        const std::size_t after_name = pos_;
        if (accept('(')) {
          ExprPtr arg = expr();
          if (!accept(')')) fail("missing ')'");
          return make(ExprNode::Call{fn, arg}, {start, pos_ - start});
        }
        if (coord == coords_.end()) fail("function '" + name + "' needs an argument");
        pos_ = after_name;
      }
      if (coord == coords_.end()) throw UnknownCoordinate(name, start);
      return make(ExprNode::Coordinate{static_cast<int>(coord - coords_.begin())}, {start, pos_ - start});
    }
    if (accept('(')) {
      ExprPtr e = expr();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    note("number");
    note("name");
    fail(pos_ >= text_.size() ? "unexpected end of input" : std::string("unexpected '") + text_[pos_] + "'");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        while (p < text_.size() && is_digit(text_[p])) ++p;
        pos_ = p;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      note("number");
      fail("malformed number");
    }
    return make(ExprNode::Literal{value}, {start, pos_ - start});
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  std::size_t pos_ = 0;
  std::size_t expect_pos_ = 0;
  std::set<std::string> expect_set_;
};

// --- jet evaluation --------------------------------------------------------

struct JetEvaluator {
  const ExprAst& ast;
  std::span<const double> point;
  int order;

  [[noreturn]] void rethrow(const DomainError& e, const ExprNode& node) const {
    const auto& src = ast.source();
    std::string where;
    if (node.span.length > 0 && node.span.offset + node.span.length <= src.size()) {
      where = " in '" + src.substr(node.span.offset, node.span.length) + "' at offset " +
              std::to_string(node.span.offset);
    }
    throw DomainError(std::string(e.what()) + where, e.offending_value());
  }

  Jet operator()(const ExprNode& node) const {
    const int d = ast.dim();
    return std::visit(
        [&](const auto& k) -> Jet {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ExprNode::Literal>) {
            return Jet::constant(d, k.value, order);
          } else if constexpr (std::is_same_v<K, ExprNode::Coordinate>) {
            return Jet::variable(d, k.index, point[static_cast<std::size_t>(k.index)], order);
          } else if constexpr (std::is_same_v<K, ExprNode::Negate>) {
            return -(*this)(*k.operand);
          } else if constexpr (std::is_same_v<K, ExprNode::Binary>) {
            Jet a = (*this)(*k.lhs);
            Jet b = (*this)(*k.rhs);
            try {
              switch (k.op) {
                case BinaryOp::add: return a + b;
                case BinaryOp::sub: return a - b;
                case BinaryOp::mul: return a * b;
                case BinaryOp::div: return a / b;
              }
            } catch (const DomainError& e) {
              rethrow(e, node);
            }
            return a;
          } else if constexpr (std::is_same_v<K, ExprNode::Power>) {
            Jet a = (*this)(*k.base);
            try {
              return pow(a, k.exponent);
            } catch (const DomainError& e) {
              rethrow(e, node);
            }
          } else {
            Jet a = (*this)(*k.arg);
            try {
              switch (k.fn) {
                case Function::sqrt: return sqrt(a);
                case Function::exp: return exp(a);
                case Function::ln: return log(a);
                case Function::sinh: return sinh(a);
                case Function::cosh: return cosh(a);
              }
            } catch (const DomainError& e) {
              rethrow(e, node);
            }
            return a;
          }
        },
        node.kind);
  }
};

double eval_double(const ExprNode& node, std::span<const double> point) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ExprNode::Literal>) {
          return k.value;
        } else if constexpr (std::is_same_v<K, ExprNode::Coordinate>) {
          return point[static_cast<std::size_t>(k.index)];
        } else if constexpr (std::is_same_v<K, ExprNode::Negate>) {
          return -eval_double(*k.operand, point);
        } else if constexpr (std::is_same_v<K, ExprNode::Binary>) {
          const double a = eval_double(*k.lhs, point);
          const double b = eval_double(*k.rhs, point);
          switch (k.op) {
            case BinaryOp::add: return a + b;
            case BinaryOp::sub: return a - b;
            case BinaryOp::mul: return a * b;
            case BinaryOp::div:
              if (b == 0.0) throw DomainError("division by a zero value", b);
              return a / b;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<K, ExprNode::Power>) {
          const double a = eval_double(*k.base, point);
          if (k.exponent < 0 && a == 0.0) throw DomainError("negative power of zero", a);
          return std::pow(a, k.exponent);
        } else {
          const double a = eval_double(*k.arg, point);
          switch (k.fn) {
            case Function::sqrt:
              if (!(a > 0.0)) throw DomainError("sqrt of a non-positive value", a);
              return std::sqrt(a);
            case Function::exp: return std::exp(a);
            case Function::ln:
              if (!(a > 0.0)) throw DomainError("ln of a non-positive value", a);
              return std::log(a);
            case Function::sinh: return std::sinh(a);
            case Function::cosh: return std::cosh(a);
          }
          return 0.0;
        }
      },
      node.kind);
}

std::string print(const ExprNode& node, const std::vector<std::string>& coords) {
  return std::visit(
      [&](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ExprNode::Literal>) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", std::abs(k.value));
          std::string s = buf;
          if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
          return std::signbit(k.value) ? "(-" + s + ")" : s;
        } else if constexpr (std::is_same_v<K, ExprNode::Coordinate>) {
          return coords[static_cast<std::size_t>(k.index)];
        } else if constexpr (std::is_same_v<K, ExprNode::Negate>) {
          return "(-" + print(*k.operand, coords) + ")";
        } else if constexpr (std::is_same_v<K, ExprNode::Binary>) {
          static const char* kOps[] = {" + ", " - ", " * ", " / "};
          return "(" + print(*k.lhs, coords) + kOps[static_cast<int>(k.op)] + print(*k.rhs, coords) + ")";
        } else if constexpr (std::is_same_v<K, ExprNode::Power>) {
          std::string base = print(*k.base, coords);
          const bool atomic = std::holds_alternative<ExprNode::Coordinate>(k.base->kind) ||
                              std::holds_alternative<ExprNode::Call>(k.base->kind);
          if (!atomic && base.front() != '(') base = "(" + base + ")";
          return base + "^" + (k.exponent < 0 ? "(" + std::to_string(k.exponent) + ")" : std::to_string(k.exponent));
        } else {
          return std::string(function_name(k.fn)) + "(" + print(*k.arg, coords) + ")";
        }
      },
      node.kind);
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      [&](const auto& ka) -> bool {
        using K = std::decay_t<decltype(ka)>;
        const auto& kb = std::get<K>(b.kind);
        if constexpr (std::is_same_v<K, ExprNode::Literal>) {
          return ka.value == kb.value;
        } else if constexpr (std::is_same_v<K, ExprNode::Coordinate>) {
          return ka.index == kb.index;
        } else if constexpr (std::is_same_v<K, ExprNode::Negate>) {
          return equal_nodes(*ka.operand, *kb.operand);
        } else if constexpr (std::is_same_v<K, ExprNode::Binary>) {
          return ka.op == kb.op && equal_nodes(*ka.lhs, *kb.lhs) && equal_nodes(*ka.rhs, *kb.rhs);
        } else if constexpr (std::is_same_v<K, ExprNode::Power>) {
          return ka.exponent == kb.exponent && equal_nodes(*ka.base, *kb.base);
        } else {
          return ka.fn == kb.fn && equal_nodes(*ka.arg, *kb.arg);
        }
      },
      a.kind);
}

// --- symbolic derivative ----------------------------------------------------

const double* literal_value(const ExprPtr& e) {
  if (const auto* l = std::get_if<ExprNode::Literal>(&e->kind)) return &l->value;
  return nullptr;
}

ExprPtr lit(double v) { return make(ExprNode::Literal{v}); }

ExprPtr add(ExprPtr a, ExprPtr b) {
  const double* va = literal_value(a);
  const double* vb = literal_value(b);
  if (va && vb) return lit(*va + *vb);
  if (va && *va == 0.0) return b;
  if (vb && *vb == 0.0) return a;
  return make(ExprNode::Binary{BinaryOp::add, std::move(a), std::move(b)});
}

ExprPtr neg(ExprPtr a) {
  if (const double* v = literal_value(a)) return lit(-*v);
  return make(ExprNode::Negate{std::move(a)});
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
  const double* vb = literal_value(b);
  if (vb && *vb == 0.0) return a;
  const double* va = literal_value(a);
  if (va && *va == 0.0) return neg(std::move(b));
  if (va && vb) return lit(*va - *vb);
  return make(ExprNode::Binary{BinaryOp::sub, std::move(a), std::move(b)});
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
  const double* va = literal_value(a);
  const double* vb = literal_value(b);
  if ((va && *va == 0.0) || (vb && *vb == 0.0)) return lit(0.0);
  if (va && vb) return lit(*va * *vb);
  if (va && *va == 1.0) return b;
  if (vb && *vb == 1.0) return a;
  return make(ExprNode::Binary{BinaryOp::mul, std::move(a), std::move(b)});
}

ExprPtr divide(ExprPtr a, ExprPtr b) {
  const double* va = literal_value(a);
  if (va && *va == 0.0) return lit(0.0);
  const double* vb = literal_value(b);
  if (vb && *vb == 1.0) return a;
  return make(ExprNode::Binary{BinaryOp::div, std::move(a), std::move(b)});
}

ExprPtr power(ExprPtr base, int e) {
  if (e == 0) return lit(1.0);
  if (e == 1) return base;
  return make(ExprNode::Power{std::move(base), e});
}

ExprPtr call(Function fn, ExprPtr arg) { return make(ExprNode::Call{fn, std::move(arg)}); }

ExprPtr derive(const ExprPtr& node, int coord) {
  return std::visit(
      [&](const auto& k) -> ExprPtr {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ExprNode::Literal>) {
          return lit(0.0);
        } else if constexpr (std::is_same_v<K, ExprNode::Coordinate>) {
          return lit(k.index == coord ? 1.0 : 0.0);
        } else if constexpr (std::is_same_v<K, ExprNode::Negate>) {
          return neg(derive(k.operand, coord));
        } else if constexpr (std::is_same_v<K, ExprNode::Binary>) {
          ExprPtr da = derive(k.lhs, coord);
          ExprPtr db = derive(k.rhs, coord);
          switch (k.op) {
            case BinaryOp::add: return add(da, db);
            case BinaryOp::sub: return sub(da, db);
            case BinaryOp::mul: return add(mul(da, k.rhs), mul(k.lhs, db));
            case BinaryOp::div:
              return divide(sub(mul(da, k.rhs), mul(k.lhs, db)), power(k.rhs, 2));
          }
          return lit(0.0);
        } else if constexpr (std::is_same_v<K, ExprNode::Power>) {
          ExprPtr db = derive(k.base, coord);
          return mul(mul(lit(static_cast<double>(k.exponent)), power(k.base, k.exponent - 1)), db);
        } else {
          ExprPtr da = derive(k.arg, coord);
          switch (k.fn) {
            case Function::sqrt: return divide(da, mul(lit(2.0), node));
            case Function::exp: return mul(node, da);
            case Function::ln: return divide(da, k.arg);
            case Function::sinh: return mul(call(Function::cosh, k.arg), da);
            case Function::cosh: return mul(call(Function::sinh, k.arg), da);
          }
          return lit(0.0);
        }
      },
      node->kind);
}

}  // namespace

ExprAst parse(std::string_view text, std::span<const std::string> coords) {
  Parser p(text, coords);
  ExprPtr root = p.parse_all();
  return ExprAst(std::move(root), std::vector<std::string>(coords.begin(), coords.end()), std::string(text));
}

Jet eval_jet(const ExprAst& ast, std::span<const double> point, int order) {
  if (static_cast<int>(point.size()) != ast.dim()) {
    throw DimensionError("eval_jet: point has " + std::to_string(point.size()) + " coordinates, expected " +
                         std::to_string(ast.dim()));
  }
  if (order < 0 || order > Jet::kMaxOrder) throw DimensionError("eval_jet: order must be in 0..3");
  return JetEvaluator{ast, point, order}(ast.root());
}

double evaluate(const ExprAst& ast, std::span<const double> point) {
  if (static_cast<int>(point.size()) != ast.dim()) throw DimensionError("evaluate: point dimension mismatch");
  return eval_double(ast.root(), point);
}

std::string to_string(const ExprAst& ast) { return print(ast.root(), ast.coordinates()); }

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  return a.coordinates() == b.coordinates() && equal_nodes(a.root(), b.root());
}

ExprAst differentiate(const ExprAst& ast, int coord) {
  if (coord < 0 || coord >= ast.dim()) throw DimensionError("differentiate: coordinate out of range");
  ExprPtr d = derive(ast.root_ptr(), coord);
  // The derived tree carries no spans into the original text.
  return ExprAst(std::move(d), ast.coordinates(), std::string());
}

ScalarField ScalarField::from_expression(ExprAst ast) {
  ScalarField f;
  f.dim_ = ast.dim();
  f.description_ = ast.source().empty() ? to_string(ast) : ast.source();
  f.ast_ = std::make_shared<const ExprAst>(std::move(ast));
  return f;
}

ScalarField ScalarField::closed_form(int dim, ClosedForm fn, std::string description) {
  ScalarField f;
  f.dim_ = dim;
  f.closed_ = std::move(fn);
  f.description_ = std::move(description);
  return f;
}

ScalarField ScalarField::constant(int dim, double value) {
  return closed_form(
      dim, [dim, value](std::span<const double>, int order) { return Jet::constant(dim, value, order); },
      std::to_string(value));
}

Jet ScalarField::evaluate(std::span<const double> point, int order) const {
  if (ast_) return eval_jet(*ast_, point, order);
  return closed_(point, order);
}

}  // namespace paracurv

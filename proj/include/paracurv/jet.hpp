#pragma once

// Truncated Taylor jets of a scalar function of d variables, up to third
// order. Partials are stored as actual derivatives (not Taylor
// coefficients), so d2(i,j) is the second partial of f with respect to x_i
// and x_j.

#include <span>
#include <vector>

namespace paracurv {

class Jet {
 public:
  static constexpr int kMaxOrder = 3;

  /// Zero-dimensional constant 0 of order kMaxOrder.
  Jet();

  static Jet constant(int dim, double value, int order = kMaxOrder);
  /// The coordinate function x_index evaluated at `value`.
  static Jet variable(int dim, int index, double value, int order = kMaxOrder);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  double value() const noexcept { return c_[0]; }

  double d1(int i) const;
  double d2(int i, int j) const;
  double d3(int i, int j, int k) const;

  /// Jet of the partial derivative along x_i; its order is one less.
  Jet partial(int i) const;
  /// The same function truncated to a lower order.
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator*=(double s);
  Jet& operator+=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  /// Coefficient storage: value, d1 (d), d2 (d*d), d3 (d*d*d), up to order.
  std::span<const double> coefficients() const noexcept { return c_; }

  /// Composition f(a) given f and its first three derivatives at a.value().
  static Jet compose(const Jet& a, double f0, double f1, double f2, double f3);

 private:
  Jet(int dim, int order);
  static std::size_t size_for(int dim, int order);
  std::size_t off1() const noexcept { return 1; }
  std::size_t off2() const noexcept { return 1 + static_cast<std::size_t>(dim_); }
  std::size_t off3() const noexcept {
    return 1 + static_cast<std::size_t>(dim_) + static_cast<std::size_t>(dim_) * dim_;
  }
  void require_same_dim(const Jet& other) const;

  int dim_ = 0;
  int order_ = kMaxOrder;
  std::vector<double> c_;
};

/// Integer power; negative exponents require a nonzero value.
Jet pow(const Jet& a, int exponent);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet reciprocal(const Jet& a);

}  // namespace paracurv

#include "paracurv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "paracurv/errors.hpp"

namespace paracurv {

namespace {

// A zero-dimensional jet acts as a constant of any dimension.
Jet promoted(const Jet& a, int dim) {
  if (a.dim() == dim) return a;
  return Jet::constant(dim, a.value(), a.order());
}

}  // namespace

Jet::Jet() : dim_(0), order_(kMaxOrder), c_(1, 0.0) {}

Jet::Jet(int dim, int order) : dim_(dim), order_(order), c_(size_for(dim, order), 0.0) {}

std::size_t Jet::size_for(int dim, int order) {
  const auto d = static_cast<std::size_t>(dim);
  std::size_t n = 1;
  if (order >= 1) n += d;
  if (order >= 2) n += d * d;
  if (order >= 3) n += d * d * d;
  return n;
}

Jet Jet::constant(int dim, double value, int order) {
  if (dim < 0 || order < 0 || order > kMaxOrder) {
    throw DimensionError("jet: invalid dimension or order");
  }
  Jet j(dim, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int dim, int index, double value, int order) {
  if (index < 0 || index >= dim) throw DimensionError("jet: variable index out of range");
  Jet j = constant(dim, value, order);
  if (order >= 1) j.c_[j.off1() + static_cast<std::size_t>(index)] = 1.0;
  return j;
}

double Jet::d1(int i) const {
  if (order_ < 1) return 0.0;
  return c_[off1() + static_cast<std::size_t>(i)];
}

double Jet::d2(int i, int j) const {
  if (order_ < 2) return 0.0;
  return c_[off2() + static_cast<std::size_t>(i) * dim_ + j];
}

double Jet::d3(int i, int j, int k) const {
  if (order_ < 3) return 0.0;
  return c_[off3() + (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
}

Jet Jet::partial(int i) const {
  if (order_ < 1) throw DimensionError("jet: cannot differentiate an order-0 jet");
  if (i < 0 || i >= dim_) throw DimensionError("jet: partial index out of range");
  Jet r(dim_, order_ - 1);
  const int d = dim_;
  r.c_[0] = d1(i);
  if (r.order_ >= 1) {
    for (int j = 0; j < d; ++j) r.c_[r.off1() + j] = d2(i, j);
  }
  if (r.order_ >= 2) {
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r.c_[r.off2() + static_cast<std::size_t>(j) * d + k] = d3(i, j, k);
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(dim_, std::max(order, 0));
  std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
  return r;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

void Jet::require_same_dim(const Jet& other) const {
  if (dim_ != other.dim_ && dim_ != 0 && other.dim_ != 0) {
    throw DimensionError("jet: dimension mismatch (" + std::to_string(dim_) + " vs " +
                         std::to_string(other.dim_) + ")");
  }
}

Jet& Jet::operator+=(const Jet& rhs) {
  require_same_dim(rhs);
  if (dim_ == 0 && rhs.dim_ != 0) *this = promoted(*this, rhs.dim_);
  if (rhs.dim_ == 0 && dim_ != 0) {
    c_[0] += rhs.c_[0];
    if (rhs.order_ < order_) *this = truncated(rhs.order_);
    return *this;
  }
  if (rhs.order_ < order_) *this = truncated(rhs.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += rhs.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) { return *this += -rhs; }

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Jet operator*(const Jet& a_in, const Jet& b_in) {
  a_in.require_same_dim(b_in);
  const int d = std::max(a_in.dim_, b_in.dim_);
  Jet pa, pb;
  const Jet* ap = &a_in;
  const Jet* bp = &b_in;
  if (a_in.dim_ != d) ap = &(pa = promoted(a_in, d));
  if (b_in.dim_ != d) bp = &(pb = promoted(b_in, d));
  const Jet& a = *ap;
  const Jet& b = *bp;
  const int order = std::min(a.order_, b.order_);
  Jet r(d, order);
  const double a0 = a.c_[0];
  const double b0 = b.c_[0];
  r.c_[0] = a0 * b0;
  if (order >= 1) {
    const double* a1 = a.c_.data() + a.off1();
    const double* b1 = b.c_.data() + b.off1();
    double* r1 = r.c_.data() + r.off1();
    for (int i = 0; i < d; ++i) r1[i] = a0 * b1[i] + a1[i] * b0;
    if (order >= 2) {
      const double* a2 = a.c_.data() + a.off2();
      const double* b2 = b.c_.data() + b.off2();
      double* r2 = r.c_.data() + r.off2();
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const int ij = i * d + j;
          const double v = a0 * b2[ij] + a1[i] * b1[j] + a1[j] * b1[i] + a2[ij] * b0;
          r2[ij] = v;
          r2[j * d + i] = v;
        }
      }
      if (order >= 3) {
        const double* a3 = a.c_.data() + a.off3();
        const double* b3 = b.c_.data() + b.off3();
        double* r3 = r.c_.data() + r.off3();
        for (int i = 0; i < d; ++i) {
          for (int j = i; j < d; ++j) {
            for (int k = j; k < d; ++k) {
              const int ij = i * d + j, ik = i * d + k, jk = j * d + k;
              const int ijk = (i * d + j) * d + k;
              const double v = a0 * b3[ijk] + a1[i] * b2[jk] + a1[j] * b2[ik] + a1[k] * b2[ij] +
                               a2[jk] * b1[i] + a2[ik] * b1[j] + a2[ij] * b1[k] + a3[ijk] * b0;
              r3[(i * d + j) * d + k] = v;
              r3[(i * d + k) * d + j] = v;
              r3[(j * d + i) * d + k] = v;
              r3[(j * d + k) * d + i] = v;
              r3[(k * d + i) * d + j] = v;
              r3[(k * d + j) * d + i] = v;
            }
          }
        }
      }
    }
  }
  return r;
}

Jet Jet::compose(const Jet& a, double f0, double f1, double f2, double f3) {
  const int d = a.dim_;
  Jet r(d, a.order_);
  r.c_[0] = f0;
  if (a.order_ >= 1) {
    const double* a1 = a.c_.data() + a.off1();
    double* r1 = r.c_.data() + r.off1();
    for (int i = 0; i < d; ++i) r1[i] = f1 * a1[i];
    if (a.order_ >= 2) {
      const double* a2 = a.c_.data() + a.off2();
      double* r2 = r.c_.data() + r.off2();
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const double v = f1 * a2[i * d + j] + f2 * a1[i] * a1[j];
          r2[i * d + j] = v;
          r2[j * d + i] = v;
        }
      }
      if (a.order_ >= 3) {
        const double* a3 = a.c_.data() + a.off3();
        double* r3 = r.c_.data() + r.off3();
        for (int i = 0; i < d; ++i) {
          for (int j = i; j < d; ++j) {
            for (int k = j; k < d; ++k) {
              const double v = f1 * a3[(i * d + j) * d + k] +
                               f2 * (a2[i * d + j] * a1[k] + a2[i * d + k] * a1[j] + a2[j * d + k] * a1[i]) +
                               f3 * a1[i] * a1[j] * a1[k];
              r3[(i * d + j) * d + k] = v;
              r3[(i * d + k) * d + j] = v;
              r3[(j * d + i) * d + k] = v;
              r3[(j * d + k) * d + i] = v;
              r3[(k * d + i) * d + j] = v;
              r3[(k * d + j) * d + i] = v;
            }
          }
        }
      }
    }
  }
  return r;
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (!(std::abs(x) >= std::numeric_limits<double>::min()) || !std::isfinite(x)) {
    throw DomainError("division by a zero value", x);
  }
  const double r = 1.0 / x;
  return Jet::compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

namespace {

// n (n-1) ... (n-k+1) x^(n-k), zero when the falling factorial vanishes.
double power_derivative(int n, int k, double x) {
  double coeff = 1.0;
  for (int m = 0; m < k; ++m) coeff *= static_cast<double>(n - m);
  if (coeff == 0.0) return 0.0;
  return coeff * std::pow(x, n - k);
}

}  // namespace

Jet pow(const Jet& a, int exponent) {
  const double x = a.value();
  if (exponent < 0 && x == 0.0) throw DomainError("negative power of zero", x);
  if (exponent == 0) return Jet::constant(a.dim(), 1.0, a.order());
  return Jet::compose(a, power_derivative(exponent, 0, x), power_derivative(exponent, 1, x),
                      power_derivative(exponent, 2, x), power_derivative(exponent, 3, x));
}

Jet sqrt(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("sqrt of a non-positive value", x);
  const double s = std::sqrt(x);
  return Jet::compose(a, s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x));
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return Jet::compose(a, e, e, e, e);
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("ln of a non-positive value", x);
  return Jet::compose(a, std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return Jet::compose(a, s, c, s, c);
}

Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return Jet::compose(a, c, s, c, s);
}

}  // namespace paracurv

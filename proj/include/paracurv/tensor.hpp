#pragma once

// Dense pointwise tensors. Components are stored row-major in slot order with
// the contravariant slots first: a (1,2) tensor T^l_{ij} lives at
// data[(l*d + i)*d + j]. Slots are numbered globally, 0..up-1 contravariant
// and up..rank-1 covariant.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "paracurv/errors.hpp"
#include "paracurv/jet.hpp"

namespace paracurv {

struct Valence {
  int up = 0;
  int down = 0;
  int rank() const noexcept { return up + down; }
  friend bool operator==(const Valence&, const Valence&) = default;
};

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Jet& x) noexcept { return x.value(); }

template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, Valence valence, T fill = T{})
      : dim_(dim), valence_(valence), data_(ipow(dim, valence.rank()), std::move(fill)) {
    if (dim < 0 || valence.up < 0 || valence.down < 0) throw DimensionError("tensor: invalid shape");
  }

  int dim() const noexcept { return dim_; }
  Valence valence() const noexcept { return valence_; }
  int rank() const noexcept { return valence_.rank(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_upper(int slot) const noexcept { return slot < valence_.up; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  T& at(std::initializer_list<int> idx) { return data_[flat_index(idx)]; }
  const T& at(std::initializer_list<int> idx) const { return data_[flat_index(idx)]; }
  T& at(std::span<const int> idx) { return data_[flat_index(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[flat_index(idx)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::size_t flat_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw DimensionError("tensor: wrong number of indices");
    std::size_t flat = 0;
    for (int i : idx) flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return flat;
  }
  std::size_t flat_index(std::initializer_list<int> idx) const {
    return flat_index(std::span<const int>(idx.begin(), idx.size()));
  }

  /// Inverse of flat_index; idx must have rank() entries.
  void unflatten(std::size_t flat, std::span<int> idx) const {
    for (int s = rank() - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
      flat /= static_cast<std::size_t>(dim_);
    }
  }

  Tensor& operator+=(const Tensor& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  void require_same_shape(const Tensor& o) const {
    if (dim_ != o.dim_ || !(valence_ == o.valence_)) throw DimensionError("tensor: shape mismatch");
  }

  static std::size_t ipow(int base, int e) {
    std::size_t r = 1;
    for (int k = 0; k < e; ++k) r *= static_cast<std::size_t>(base);
    return r;
  }

 private:
  int dim_ = 0;
  Valence valence_{};
  std::vector<T> data_;
};

using TensorValue = Tensor<double>;
using JetTensor = Tensor<Jet>;

/// Component values of a jet-valued tensor.
inline TensorValue values(const JetTensor& t) {
  TensorValue r(t.dim(), t.valence(), 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) r[k] = t[k].value();
  return r;
}

/// Componentwise partial derivative along coordinate `coord`.
inline JetTensor partials(const JetTensor& t, int coord) {
  JetTensor r(t.dim(), t.valence());
  for (std::size_t k = 0; k < t.size(); ++k) r[k] = t[k].partial(coord);
  return r;
}

inline JetTensor truncated(const JetTensor& t, int order) {
  JetTensor r(t.dim(), t.valence());
  for (std::size_t k = 0; k < t.size(); ++k) r[k] = t[k].truncated(order);
  return r;
}

/// Max absolute component, the sup norm used by every residual. A NaN
/// component makes the result NaN.
template <class T>
double max_abs(const Tensor<T>& t) {
  double m = 0.0;
  for (const auto& v : t.data()) {
    const double a = std::abs(value_of(v));
    if (!(a <= m)) m = a;
  }
  return m;
}

/// Trace over one contravariant and one covariant slot.
template <class T>
Tensor<T> contract(const Tensor<T>& t, int upper_slot, int lower_slot) {
  const int rank = t.rank();
  if (upper_slot < 0 || upper_slot >= rank || lower_slot < 0 || lower_slot >= rank) {
    throw SlotError("contract: slot index out of range");
  }
  if (!t.is_upper(upper_slot) || t.is_upper(lower_slot)) {
    throw SlotError("contract: needs one contravariant and one covariant slot");
  }
  const int d = t.dim();
  Tensor<T> r(d, {t.valence().up - 1, t.valence().down - 1});
  std::vector<int> ridx(static_cast<std::size_t>(r.rank()));
  std::vector<int> tidx(static_cast<std::size_t>(rank));
  for (std::size_t f = 0; f < r.size(); ++f) {
    r.unflatten(f, ridx);
    for (int s = 0, k = 0; s < rank; ++s) {
      if (s != upper_slot && s != lower_slot) tidx[static_cast<std::size_t>(s)] = ridx[static_cast<std::size_t>(k++)];
    }
    T acc{};
    bool first = true;
    for (int m = 0; m < d; ++m) {
      tidx[static_cast<std::size_t>(upper_slot)] = m;
      tidx[static_cast<std::size_t>(lower_slot)] = m;
      if (first) {
        acc = t.at(std::span<const int>(tidx));
        first = false;
      } else {
        acc += t.at(std::span<const int>(tidx));
      }
    }
    r[f] = std::move(acc);
  }
  return r;
}

/// Swap two slots of the same kind.
template <class T>
Tensor<T> transpose(const Tensor<T>& t, int a, int b) {
  if (t.is_upper(a) != t.is_upper(b)) throw SlotError("transpose: slots differ in kind");
  Tensor<T> r(t.dim(), t.valence());
  std::vector<int> idx(static_cast<std::size_t>(t.rank()));
  for (std::size_t f = 0; f < t.size(); ++f) {
    t.unflatten(f, idx);
    std::swap(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    r.at(std::span<const int>(idx)) = t[f];
  }
  return r;
}

/// Exact symmetric (sign=+1) or antisymmetric (sign=-1) part over two slots.
/// Paired components are written from one evaluation so the symmetry holds
/// bit-exactly.
template <class T>
Tensor<T> symmetrized(const Tensor<T>& t, int a, int b, int sign = +1) {
  if (t.is_upper(a) != t.is_upper(b)) throw SlotError("symmetrize: slots differ in kind");
  Tensor<T> r = t;
  std::vector<int> idx(static_cast<std::size_t>(t.rank()));
  for (std::size_t f = 0; f < t.size(); ++f) {
    t.unflatten(f, idx);
    auto& ia = idx[static_cast<std::size_t>(a)];
    auto& ib = idx[static_cast<std::size_t>(b)];
    if (ia > ib) continue;
    if (ia == ib) {
      if (sign < 0) r[f] = t[f] * 0.0;
      continue;
    }
    std::swap(ia, ib);
    const std::size_t g = t.flat_index(std::span<const int>(idx));
    T v = sign > 0 ? (t[f] + t[g]) * 0.5 : (t[f] - t[g]) * 0.5;
    r[g] = sign > 0 ? v : v * -1.0;
    r[f] = std::move(v);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dense LU with partial pivoting on the value part. Works for double and for
// Jet: jets form a commutative ring whose units are the jets with nonzero
// value, so pivoting on value_of keeps every division well defined.
// ---------------------------------------------------------------------------

template <class T>
class LuDecomposition {
 public:
  /// `a` is row-major n×n. Throws SingularMetric when a pivot falls below
  /// `pivot_floor` in magnitude.
  LuDecomposition(std::vector<T> a, int n, double pivot_floor = 1e-12)
      : n_(n), lu_(std::move(a)), perm_(static_cast<std::size_t>(n)) {
    if (lu_.size() != static_cast<std::size_t>(n) * n) throw DimensionError("lu: size mismatch");
    for (int i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
    min_pivot_ = n > 0 ? INFINITY : 0.0;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(value_of(at(k, k)));
      for (int i = k + 1; i < n; ++i) {
        const double v = std::abs(value_of(at(i, k)));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      min_pivot_ = std::min(min_pivot_, best);
      if (!(best > pivot_floor)) {
        throw SingularMetric("matrix is singular (pivot " + std::to_string(best) + ")");
      }
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
        std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
      }
      const T inv_pivot = reciprocal_of(at(k, k));
      for (int i = k + 1; i < n; ++i) {
        at(i, k) = at(i, k) * inv_pivot;
        const T factor = at(i, k);
        for (int j = k + 1; j < n; ++j) at(i, j) -= factor * at(k, j);
      }
    }
  }

  int size() const noexcept { return n_; }
  double min_pivot() const noexcept { return min_pivot_; }

  std::vector<T> solve(std::vector<T> b) const {
    if (b.size() != static_cast<std::size_t>(n_)) throw DimensionError("lu: rhs size mismatch");
    std::vector<T> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= at(i, j) * x[static_cast<std::size_t>(j)];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) x[static_cast<std::size_t>(i)] -= at(i, j) * x[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] * reciprocal_of(at(i, i));
    }
    return x;
  }

  /// Row-major inverse.
  std::vector<T> inverse(const T& zero, const T& one) const {
    std::vector<T> inv(static_cast<std::size_t>(n_) * n_, zero);
    for (int c = 0; c < n_; ++c) {
      std::vector<T> e(static_cast<std::size_t>(n_), zero);
      e[static_cast<std::size_t>(c)] = one;
      auto col = solve(std::move(e));
      for (int r = 0; r < n_; ++r) inv[static_cast<std::size_t>(r) * n_ + c] = std::move(col[static_cast<std::size_t>(r)]);
    }
    return inv;
  }

 private:
  static double reciprocal_of(double x) { return 1.0 / x; }
  static Jet reciprocal_of(const Jet& x) { return reciprocal(x); }
  T& at(int i, int j) { return lu_[static_cast<std::size_t>(i) * n_ + j]; }
  const T& at(int i, int j) const { return lu_[static_cast<std::size_t>(i) * n_ + j]; }

  int n_;
  std::vector<T> lu_;
  std::vector<int> perm_;
  double min_pivot_ = 0.0;
};

/// Inverse of a rank-2 tensor with both slots of the same kind; the result
/// has the opposite valence ((0,2) -> (2,0)).
template <class T>
Tensor<T> inverse_metric(const Tensor<T>& m, const T& zero, const T& one, double pivot_floor = 1e-12) {
  if (m.rank() != 2 || m.valence().up == 1) throw SlotError("inverse_metric: needs a (0,2) or (2,0) tensor");
  const int d = m.dim();
  std::vector<T> a(m.data().begin(), m.data().end());
  LuDecomposition<T> lu(std::move(a), d, pivot_floor);
  auto inv = lu.inverse(zero, one);
  Tensor<T> r(d, {m.valence().down, m.valence().up});
  for (std::size_t k = 0; k < inv.size(); ++k) r[k] = std::move(inv[k]);
  return r;
}

enum class IndexMove { raise, lower };

/// Raise or lower one slot with the metric g_{ij} (a symmetric (0,2)
/// tensor). The moved index lands at position `target` inside its new group
/// (0 = first). Raising inverts the metric internally.
template <class T>
Tensor<T> raise_lower(const Tensor<T>& t, int slot, const TensorValue& metric, IndexMove direction,
                      int target = 0) {
  const int d = t.dim();
  if (metric.dim() != d || !(metric.valence() == Valence{0, 2})) {
    throw DimensionError("raise_lower: metric must be a (0,2) tensor of matching dimension");
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (metric.at({i, j}) != metric.at({j, i})) throw SlotError("raise_lower: metric is not symmetric");
  if (slot < 0 || slot >= t.rank()) throw SlotError("raise_lower: slot out of range");
  const bool lowering = direction == IndexMove::lower;
  if (lowering != t.is_upper(slot)) {
    throw SlotError(lowering ? "raise_lower: cannot lower a covariant slot"
                             : "raise_lower: cannot raise a contravariant slot");
  }
  const TensorValue m = lowering ? metric : inverse_metric(metric, 0.0, 1.0);
  const Valence v = t.valence();
  const Valence rv = lowering ? Valence{v.up - 1, v.down + 1} : Valence{v.up + 1, v.down - 1};
  const int group_size = lowering ? rv.down : rv.up;
  if (target < 0 || target >= group_size) throw SlotError("raise_lower: target position out of range");

  // Slot order of the result expressed as source slots (-1 marks the moved one).
  std::vector<int> order;
  {
    std::vector<int> ups, downs;
    for (int s = 0; s < t.rank(); ++s) {
      if (s == slot) continue;
      (t.is_upper(s) ? ups : downs).push_back(s);
    }
    auto& group = lowering ? downs : ups;
    group.insert(group.begin() + target, -1);
    order = ups;
    order.insert(order.end(), downs.begin(), downs.end());
  }
  const int moved_pos = lowering ? rv.up + target : target;

  Tensor<T> r(d, rv);
  std::vector<int> ridx(static_cast<std::size_t>(r.rank()));
  std::vector<int> tidx(static_cast<std::size_t>(t.rank()));
  for (std::size_t f = 0; f < r.size(); ++f) {
    r.unflatten(f, ridx);
    for (int k = 0; k < r.rank(); ++k) {
      if (order[static_cast<std::size_t>(k)] >= 0) tidx[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = ridx[static_cast<std::size_t>(k)];
    }
    const int free = ridx[static_cast<std::size_t>(moved_pos)];
    T acc{};
    for (int m_idx = 0; m_idx < d; ++m_idx) {
      tidx[static_cast<std::size_t>(slot)] = m_idx;
      T term = t.at(std::span<const int>(tidx)) * m.at({free, m_idx});
      if (m_idx == 0) {
        acc = std::move(term);
      } else {
        acc += term;
      }
    }
    r[f] = std::move(acc);
  }
  return r;
}

}  // namespace paracurv

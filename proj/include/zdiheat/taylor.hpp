#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace zdiheat {

/// Truncated Taylor series c_0 + c_1 u + ... + c_N u^N of a univariate
/// function about a fixed expansion point. Composition rules are the standard
/// O(N^2) recurrences of automatic differentiation.
template <class T>
class TaylorSeries {
 public:
  TaylorSeries() = default;
  explicit TaylorSeries(std::size_t order) : c_(order + 1, T(0)) {}
  explicit TaylorSeries(std::vector<T> coefficients) : c_(std::move(coefficients)) {}

  static TaylorSeries constant(T value, std::size_t order) {
    TaylorSeries s(order);
    s.c_[0] = value;
    return s;
  }

  /// The affine map u -> origin + scale * u.
  static TaylorSeries variable(T origin, T scale, std::size_t order) {
    TaylorSeries s(order);
    s.c_[0] = origin;
    if (order >= 1) s.c_[1] = scale;
    return s;
  }

  std::size_t order() const noexcept { return c_.size() - 1; }
  T& operator[](std::size_t n) { return c_[n]; }
  const T& operator[](std::size_t n) const { return c_[n]; }
  const std::vector<T>& coefficients() const noexcept { return c_; }

  TaylorSeries& operator+=(const TaylorSeries& o) {
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o.c_[n];
    return *this;
  }
  TaylorSeries& operator-=(const TaylorSeries& o) {
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
    return *this;
  }
  TaylorSeries& operator*=(T s) {
    for (T& v : c_) v *= s;
    return *this;
  }

  friend TaylorSeries operator+(TaylorSeries a, const TaylorSeries& b) { return a += b; }
  friend TaylorSeries operator-(TaylorSeries a, const TaylorSeries& b) { return a -= b; }
  friend TaylorSeries operator*(TaylorSeries a, T s) { return a *= s; }
  friend TaylorSeries operator*(T s, TaylorSeries a) { return a *= s; }

  friend TaylorSeries operator*(const TaylorSeries& a, const TaylorSeries& b) {
    TaylorSeries r(a.order());
    for (std::size_t n = 0; n <= a.order(); ++n) {
      T acc(0);
      for (std::size_t k = 0; k <= n; ++k) acc += a.c_[k] * b.c_[n - k];
      r.c_[n] = acc;
    }
    return r;
  }

  /// d/du, one order shorter.
  TaylorSeries derivative() const {
    TaylorSeries r(order() == 0 ? 0 : order() - 1);
    if (order() == 0) return r;
    for (std::size_t n = 0; n + 1 <= order(); ++n) r.c_[n] = T(n + 1) * c_[n + 1];
    return r;
  }

 private:
  std::vector<T> c_{T(0)};
};

/// 1/a; requires a[0] != 0.
template <class T>
TaylorSeries<T> reciprocal(const TaylorSeries<T>& a) {
  const std::size_t order = a.order();
  TaylorSeries<T> r(order);
  const T inv = T(1) / a[0];
  r[0] = inv;
  for (std::size_t n = 1; n <= order; ++n) {
    T acc(0);
    for (std::size_t k = 1; k <= n; ++k) acc += a[k] * r[n - k];
    r[n] = -inv * acc;
  }
  return r;
}

/// a^p for real p; requires a[0] > 0.
template <class T>
TaylorSeries<T> power(const TaylorSeries<T>& a, T p) {
  using std::pow;
  const std::size_t order = a.order();
  TaylorSeries<T> f(order);
  f[0] = pow(a[0], p);
  for (std::size_t n = 1; n <= order; ++n) {
    T acc(0);
    for (std::size_t k = 1; k <= n; ++k) {
      acc += (p * T(k) - T(n - k)) * a[k] * f[n - k];
    }
    f[n] = acc / (T(n) * a[0]);
  }
  return f;
}

/// exp(a).
template <class T>
TaylorSeries<T> exponential(const TaylorSeries<T>& a) {
  using std::exp;
  const std::size_t order = a.order();
  TaylorSeries<T> e(order);
  e[0] = exp(a[0]);
  for (std::size_t n = 1; n <= order; ++n) {
    T acc(0);
    for (std::size_t k = 1; k <= n; ++k) acc += T(k) * a[k] * e[n - k];
    e[n] = acc / T(n);
  }
  return e;
}

}  // namespace zdiheat

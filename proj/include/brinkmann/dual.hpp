#pragma once

// Forward-mode dual numbers. Dual<double> carries exact first partials,
// Dual<Dual<double>> carries first and second partials.

#include <algorithm>
#include <array>
#include <cmath>

namespace brinkmann {

/// Largest chart dimension supported by the differentiation machinery
/// (u, v and nine transverse coordinates).
inline constexpr int kMaxDim = 11;

/// Value plus `n` partial derivatives. A Dual with n == 0 is a constant.
template <class T>
struct Dual {
  T v{};
  std::array<T, kMaxDim> d{};
  int n = 0;

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT(google-explicit-constructor)
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double constant(double c, int) { return c; }
  static double variable(double x, int, int) { return x; }
};

template <class T>
struct ScalarOps<Dual<T>> {
  static Dual<T> constant(double c, int n) {
    Dual<T> r;
    r.v = ScalarOps<T>::constant(c, n);
    r.n = n;
    for (int i = 0; i < n; ++i) r.d[i] = ScalarOps<T>::constant(0.0, n);
    return r;
  }
  static Dual<T> variable(double x, int index, int n) {
    Dual<T> r = constant(0.0, n);
    r.v = ScalarOps<T>::variable(x, index, n);
    r.d[index] = ScalarOps<T>::constant(1.0, n);
    return r;
  }
};

template <class T>
T make_constant(double c, int n) {
  return ScalarOps<T>::constant(c, n);
}

/// Independent variable number `index` of an `n`-dimensional chart.
template <class T>
T make_variable(double x, int index, int n) {
  return ScalarOps<T>::variable(x, index, n);
}

namespace detail {
template <class T>
Dual<T> chain(const Dual<T>& a, const T& fv, const T& dfv) {
  Dual<T> r;
  r.v = fv;
  r.n = a.n;
  for (int i = 0; i < a.n; ++i) r.d[i] = dfv * a.d[i];
  return r;
}
}  // namespace detail

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  r.n = a.n;
  for (int i = 0; i < a.n; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v + b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v - b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v * b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  const T inv = T(1.0) / b.v;
  Dual<T> r;
  r.v = a.v * inv;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}

template <class T>
Dual<T> operator*(double s, const Dual<T>& a) {
  Dual<T> r;
  r.v = s * a.v;
  r.n = a.n;
  for (int i = 0; i < a.n; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& a, double s) {
  return s * a;
}

template <class T>
Dual<T> operator+(const Dual<T>& a, double s) {
  Dual<T> r = a;
  r.v = a.v + s;
  return r;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a = a + b;
  return a;
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return detail::chain<T>(a, sin(a.v), cos(a.v));
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return detail::chain<T>(a, cos(a.v), -sin(a.v));
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return detail::chain<T>(a, e, e);
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return detail::chain<T>(a, log(a.v), T(1.0) / a.v);
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return detail::chain<T>(a, s, T(0.5) / s);
}

template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  return detail::chain<T>(a, t, T(1.0) - t * t);
}

/// a^c for a constant exponent c. Integer exponents are valid for negative bases.
inline double pow_const(double a, double c) { return std::pow(a, c); }

template <class T>
Dual<T> pow_const(const Dual<T>& a, double c) {
  if (c == 0.0) return make_constant<Dual<T>>(1.0, a.n);
  const T p = pow_const(a.v, c);
  const T dp = c * pow_const(a.v, c - 1.0);
  return detail::chain<T>(a, p, dp);
}

}  // namespace brinkmann

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace mfda {

inline constexpr int kMaxJetOrder = 6;

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Truncated univariate Taylor series: c[j] = f^(j)(x0) / j!.
struct Jet1 {
  int order = 0;
  std::array<double, kMaxJetOrder + 1> c{};

  Jet1() = default;
  explicit Jet1(int ord, double value = 0.0) : order(ord) {
    if (ord < 0 || ord > kMaxJetOrder) throw std::invalid_argument("jet order out of range");
    c[0] = value;
  }
  static Jet1 variable(int ord, double x0) {
    Jet1 j(ord, x0);
    if (ord >= 1) j.c[1] = 1.0;
    return j;
  }
  double derivative(int k) const { return k <= order ? c[k] * factorial(k) : 0.0; }

  Jet1& operator+=(const Jet1& o) {
    for (int i = 0; i <= order; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& o) {
    for (int i = 0; i <= order; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet1& operator*=(double s) {
    for (int i = 0; i <= order; ++i) c[i] *= s;
    return *this;
  }
  friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
  friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
  friend Jet1 operator*(double s, Jet1 a) { return a *= s; }
  friend Jet1 operator*(const Jet1& a, const Jet1& b) {
    Jet1 r(a.order);
    for (int k = 0; k <= a.order; ++k)
      for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
    return r;
  }
  friend Jet1 reciprocal(const Jet1& a) {
    Jet1 r(a.order);
    r.c[0] = 1.0 / a.c[0];
    for (int k = 1; k <= a.order; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += a.c[i] * r.c[k - i];
      r.c[k] = -s * r.c[0];
    }
    return r;
  }
  friend Jet1 operator/(const Jet1& a, const Jet1& b) { return a * reciprocal(b); }
  friend Jet1 exp(const Jet1& a) {
    Jet1 r(a.order);
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= a.order; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += i * a.c[i] * r.c[k - i];
      r.c[k] = s / k;
    }
    return r;
  }
};

// Truncated bivariate Taylor series: c[a][b] = d^a_x d^b_y f / (a! b!), a + b <= order.
struct Jet2 {
  int order = 0;
  std::array<std::array<double, kMaxJetOrder + 1>, kMaxJetOrder + 1> c{};

  Jet2() = default;
  explicit Jet2(int ord, double value = 0.0) : order(ord) {
    if (ord < 0 || ord > kMaxJetOrder) throw std::invalid_argument("jet order out of range");
    c[0][0] = value;
  }
  // Product of univariate jets in x and y.
  static Jet2 tensor(const Jet1& x, const Jet1& y, int ord) {
    Jet2 r(ord);
    for (int a = 0; a <= ord; ++a)
      for (int b = 0; a + b <= ord; ++b)
        r.c[a][b] = (a <= x.order ? x.c[a] : 0.0) * (b <= y.order ? y.c[b] : 0.0);
    return r;
  }
  double derivative(int a, int b) const {
    return a + b <= order ? c[a][b] * factorial(a) * factorial(b) : 0.0;
  }
  void set_derivative(int a, int b, double v) { c[a][b] = v / (factorial(a) * factorial(b)); }

  Jet2& operator+=(const Jet2& o) {
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) c[a][b] += o.c[a][b];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) c[a][b] -= o.c[a][b];
    return *this;
  }
  Jet2& operator*=(double s) {
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) c[a][b] *= s;
    return *this;
  }
  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator*(const Jet2& x, const Jet2& y) {
    Jet2 r(x.order);
    for (int a = 0; a <= x.order; ++a)
      for (int b = 0; a + b <= x.order; ++b) {
        double s = 0.0;
        for (int i = 0; i <= a; ++i)
          for (int j = 0; j <= b; ++j) s += x.c[i][j] * y.c[a - i][b - j];
        r.c[a][b] = s;
      }
    return r;
  }
  friend Jet2 reciprocal(const Jet2& x) {
    Jet2 r(x.order);
    r.c[0][0] = 1.0 / x.c[0][0];
    for (int total = 1; total <= x.order; ++total)
      for (int a = 0; a <= total; ++a) {
        const int b = total - a;
        double s = 0.0;
        for (int i = 0; i <= a; ++i)
          for (int j = 0; j <= b; ++j)
            if (i + j > 0) s += x.c[i][j] * r.c[a - i][b - j];
        r.c[a][b] = -s * r.c[0][0];
      }
    return r;
  }
  friend Jet2 operator/(const Jet2& x, const Jet2& y) { return x * reciprocal(y); }
  friend Jet2 exp(const Jet2& x) {
    // Split off the constant term; exp of the nilpotent part is a finite sum.
    Jet2 nil = x;
    nil.c[0][0] = 0.0;
    Jet2 r(x.order, 1.0), term(x.order, 1.0);
    for (int k = 1; k <= x.order; ++k) {
      term = term * nil;
      term *= 1.0 / k;
      r += term;
    }
    r *= std::exp(x.c[0][0]);
    return r;
  }
};

}  // namespace mfda

// Second-order forward-mode jets in two parameters.
//
// Charts, variation fields and scenario expressions are written once as
// generic callables and evaluated either on doubles (positions) or on J2
// (positions plus exact first and second parameter derivatives).
#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace wstab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

struct J2 {
  double v = 0.0;
  double d[2] = {0.0, 0.0};
  double h[3] = {0.0, 0.0, 0.0};  // uu, uv, vv

  J2() = default;
  J2(double c) : v(c) {}  // NOLINT: implicit promotion of constants

  static J2 variable(double x, int i) {
    J2 r(x);
    r.d[i] = 1.0;
    return r;
  }
};

inline double value(double x) { return x; }
inline double value(const J2& x) { return x.v; }

// f(a) given f, f', f'' at a.v.
inline J2 chain(const J2& a, double f0, double f1, double f2) {
  J2 r;
  r.v = f0;
  r.d[0] = f1 * a.d[0];
  r.d[1] = f1 * a.d[1];
  r.h[0] = f2 * a.d[0] * a.d[0] + f1 * a.h[0];
  r.h[1] = f2 * a.d[0] * a.d[1] + f1 * a.h[1];
  r.h[2] = f2 * a.d[1] * a.d[1] + f1 * a.h[2];
  return r;
}

inline J2 operator+(const J2& a, const J2& b) {
  J2 r;
  r.v = a.v + b.v;
  for (int i = 0; i < 2; ++i) r.d[i] = a.d[i] + b.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = a.h[i] + b.h[i];
  return r;
}
inline J2 operator-(const J2& a, const J2& b) {
  J2 r;
  r.v = a.v - b.v;
  for (int i = 0; i < 2; ++i) r.d[i] = a.d[i] - b.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = a.h[i] - b.h[i];
  return r;
}
inline J2 operator-(const J2& a) {
  J2 r;
  r.v = -a.v;
  for (int i = 0; i < 2; ++i) r.d[i] = -a.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = -a.h[i];
  return r;
}
inline J2 operator*(const J2& a, const J2& b) {
  J2 r;
  r.v = a.v * b.v;
  r.d[0] = a.d[0] * b.v + a.v * b.d[0];
  r.d[1] = a.d[1] * b.v + a.v * b.d[1];
  r.h[0] = a.h[0] * b.v + 2.0 * a.d[0] * b.d[0] + a.v * b.h[0];
  r.h[1] = a.h[1] * b.v + a.d[0] * b.d[1] + a.d[1] * b.d[0] + a.v * b.h[1];
  r.h[2] = a.h[2] * b.v + 2.0 * a.d[1] * b.d[1] + a.v * b.h[2];
  return r;
}
inline J2 operator*(double c, const J2& a) {
  J2 r;
  r.v = c * a.v;
  for (int i = 0; i < 2; ++i) r.d[i] = c * a.d[i];
  for (int i = 0; i < 3; ++i) r.h[i] = c * a.h[i];
  return r;
}
inline J2 operator*(const J2& a, double c) { return c * a; }
inline J2 reciprocal(const J2& b) {
  const double ib = 1.0 / b.v;
  return chain(b, ib, -ib * ib, 2.0 * ib * ib * ib);
}
inline J2 operator/(const J2& a, const J2& b) { return a * reciprocal(b); }
inline J2 operator/(const J2& a, double c) { return (1.0 / c) * a; }
inline J2 operator/(double c, const J2& b) { return c * reciprocal(b); }
inline J2 operator+(const J2& a, double c) {
  J2 r = a;
  r.v += c;
  return r;
}
inline J2 operator+(double c, const J2& a) { return a + c; }
inline J2 operator-(const J2& a, double c) { return a + (-c); }
inline J2 operator-(double c, const J2& a) { return (-a) + c; }
inline J2& operator+=(J2& a, const J2& b) { return a = a + b; }
inline J2& operator-=(J2& a, const J2& b) { return a = a - b; }
inline J2& operator*=(J2& a, const J2& b) { return a = a * b; }

inline J2 sqrt(const J2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline J2 sin(const J2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}
inline J2 cos(const J2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}
inline J2 tan(const J2& a) {
  const double t = std::tan(a.v), sec2 = 1.0 + t * t;
  return chain(a, t, sec2, 2.0 * t * sec2);
}
inline J2 exp(const J2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline J2 log(const J2& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline J2 atan(const J2& a) {
  const double q = 1.0 / (1.0 + a.v * a.v);
  return chain(a, std::atan(a.v), q, -2.0 * a.v * q * q);
}
inline J2 acos(const J2& a) {
  const double w = 1.0 - a.v * a.v;
  return chain(a, std::acos(a.v), -1.0 / std::sqrt(w), -a.v / (w * std::sqrt(w)));
}
inline J2 asin(const J2& a) {
  const double w = 1.0 - a.v * a.v;
  return chain(a, std::asin(a.v), 1.0 / std::sqrt(w), a.v / (w * std::sqrt(w)));
}
inline J2 sinh(const J2& a) { return chain(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v)); }
inline J2 cosh(const J2& a) { return chain(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v)); }
inline J2 pow(const J2& a, double p) {
  return chain(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0),
               p * (p - 1.0) * std::pow(a.v, p - 2.0));
}
inline J2 atan2(const J2& y, const J2& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  J2 r;
  r.v = std::atan2(y.v, x.v);
  double g[2];
  for (int i = 0; i < 2; ++i) g[i] = (x.v * y.d[i] - y.v * x.d[i]) / r2;
  r.d[0] = g[0];
  r.d[1] = g[1];
  const int ii[3] = {0, 0, 1}, jj[3] = {0, 1, 1};
  for (int k = 0; k < 3; ++k) {
    const int i = ii[k], j = jj[k];
    const double num = x.d[j] * y.d[i] + x.v * y.h[k] - y.d[j] * x.d[i] - y.v * x.h[k];
    const double dr2 = 2.0 * (x.v * x.d[j] + y.v * y.d[j]);
    r.h[k] = num / r2 - g[i] * dr2 / r2;
  }
  return r;
}

// Three-vector over a scalar type (double or J2).
template <class T>
struct V3 {
  T c[3];
  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }
};

template <class T>
V3<T> operator+(const V3<T>& a, const V3<T>& b) {
  return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}};
}
template <class T>
V3<T> operator-(const V3<T>& a, const V3<T>& b) {
  return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}};
}
template <class T, class S>
V3<T> operator*(const S& s, const V3<T>& a) {
  return {{s * a[0], s * a[1], s * a[2]}};
}
template <class T>
T dot(const V3<T>& a, const V3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
template <class T>
V3<T> cross(const V3<T>& a, const V3<T>& b) {
  return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}
template <class T>
T norm(const V3<T>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

template <class T>
V3<T> constant_v3(const Vec3& p) {
  return {{T(p[0]), T(p[1]), T(p[2])}};
}

inline Vec3 values(const V3<J2>& a) { return {a[0].v, a[1].v, a[2].v}; }
inline Vec3 values(const V3<double>& a) { return {a[0], a[1], a[2]}; }
inline Vec3 partial(const V3<J2>& a, int i) { return {a[0].d[i], a[1].d[i], a[2].d[i]}; }
// k = 0 (uu), 1 (uv), 2 (vv)
inline Vec3 second(const V3<J2>& a, int k) { return {a[0].h[k], a[1].h[k], a[2].h[k]}; }

// Lifts a scalar ambient function known through value, gradient and Hessian
// at values(y) to a jet along the parametrized point y.
inline J2 lift(const V3<J2>& y, double f, const Vec3& g, const Mat3& H) {
  J2 r;
  r.v = f;
  const Vec3 y0 = partial(y, 0), y1 = partial(y, 1);
  r.d[0] = g.dot(y0);
  r.d[1] = g.dot(y1);
  r.h[0] = y0.dot(H * y0) + g.dot(second(y, 0));
  r.h[1] = y0.dot(H * y1) + g.dot(second(y, 1));
  r.h[2] = y1.dot(H * y1) + g.dot(second(y, 2));
  return r;
}

}  // namespace wstab

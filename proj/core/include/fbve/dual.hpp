/// @file dual.hpp
/// @brief Forward-mode dual number carrying the two spatial partials.
#pragma once

#include <cmath>

namespace fbve {

struct Dual {
  double v = 0.0;
  double d[2] = {0.0, 0.0};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  Dual(double value, double d1, double d2) : v(value), d{d1, d2} {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d[0] += o.d[0];
    d[1] += o.d[1];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d[0] -= o.d[0];
    d[1] -= o.d[1];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d[0] = d[0] * o.v + v * o.d[0];
    d[1] = d[1] * o.v + v * o.d[1];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    d[0] = (d[0] - v * o.d[0] * inv) * inv;
    d[1] = (d[1] - v * o.d[1] * inv) * inv;
    v *= inv;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d[0], -a.d[1]}; }

inline Dual pow(const Dual& a, double e) {
  const double p = std::pow(a.v, e);
  const double dp = e * std::pow(a.v, e - 1.0);
  return {p, dp * a.d[0], dp * a.d[1]};
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace fbve

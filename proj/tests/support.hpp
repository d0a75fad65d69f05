/// @file support.hpp
/// @brief Shared fixtures for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "fbve/diagnostics.hpp"
#include "fbve/initial_data.hpp"

namespace fbve::testing {

inline constexpr double kPi = std::numbers::pi;

/// Fills a field from f(component, x1, x2).
template <int N, class Fn>
Field<N> sample(const Grid& g, Fn&& f) {
  Field<N> out(g);
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) out(c, i, j) = f(c, g.x1(i), g.x2(j));
  return out;
}

/// Smooth random displacement: a few low Fourier modes in x1 times a
/// polynomial/trig profile in x2, small enough to keep J well above 0.
struct RandomSmoothMap {
  struct Mode {
    int k;
    double amp, phase, k2, phase2;
  };
  std::array<std::vector<Mode>, 2> modes;

  RandomSmoothMap(std::uint64_t seed, double size = 0.02) {
    std::mt19937_64 rng(seed);
    for (auto& m : modes)
      for (int n = 0; n < 3; ++n)
        m.push_back({1 + static_cast<int>(rng() % 3), size * (2.0 * uniform01(rng) - 1.0),
                     2.0 * kPi * uniform01(rng), 0.5 + 2.0 * uniform01(rng), 2.0 * kPi * uniform01(rng)});
  }

  double operator()(int c, double x1, double x2) const {
    double s = 0.0;
    for (const auto& m : modes[c])
      s += m.amp * std::sin(2.0 * kPi * m.k * x1 + m.phase) * std::cos(kPi * m.k2 * x2 + m.phase2);
    return s;
  }

  VectorField displacement(const Grid& g) const {
    return sample<2>(g, [&](int c, double x1, double x2) { return (*this)(c, x1, x2); });
  }
  VectorField eta(const Grid& g) const { return identity_map(g) + displacement(g); }
};

/// Unit parameters with the given viscosity and surface tension.
inline MaterialParams unit_params(const Grid& g, double eps = 1e-2, double sigma = 0.05) {
  MaterialParams p = MaterialParams::unit(g);
  p.epsilon = eps;
  p.sigma = sigma;
  return p;
}

/// Max of |a - b| over two fields of the same shape.
template <int N>
double max_diff(const Field<N>& a, const Field<N>& b) {
  return ops::max_abs(a - b);
}

/// Max of |a - b| over two boundary traces (b empty means zero).
template <int N>
double trace_diff(const BoundaryTrace<N>& a, const BoundaryTrace<N>* b = nullptr) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    m = std::max(m, std::abs(a.values[k] - (b ? b->values[k] : 0.0)));
  return m;
}

/// Least-squares slope of log y against log x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
  }
  return sxy / sxx;
}

}  // namespace fbve::testing

#include "fbve/grid_ops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <string>

#include "fbve/errors.hpp"

namespace fbve {

Grid::Grid(int n1_, int n2_) : n1(n1_), n2(n2_) {
  if (n1 < 8 || n1 % 2 != 0) throw std::invalid_argument("n1 must be even and at least 8");
  if (n2 < 5) throw std::invalid_argument("n2 must be at least 5");
  h1 = 1.0 / n1;
  h2 = 1.0 / (n2 - 1);
}

VectorField identity_map(const Grid& g) {
  VectorField x(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      x(0, i, j) = g.x1(i);
      x(1, i, j) = g.x2(j);
    }
  x.jump() = {1.0, 0.0};
  return x;
}

namespace ops {

VectorField flux_div2(const VectorField& flux, const BoundaryTrace<2>& traction_bottom,
                      const BoundaryTrace<2>& traction_top) {
  const Grid& g = flux.grid();
  VectorField f = flux;
  const int t = g.n2 - 1;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < g.n1; ++i) {
      f(c, i, 0) = traction_bottom.sign() * traction_bottom(c, i);
      f(c, i, t) = traction_top.sign() * traction_top(c, i);
    }
  f.jump() = {0.0, 0.0};
  return d2(f);
}

double integrate(const ScalarField& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) s += row_weight(g, j) * f(i, j);
  return s * g.h1;
}

double integrate_band(const ScalarField& f, double lo, double hi) {
  const Grid& g = f.grid();
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (hi <= lo) return 0.0;
  double s = 0.0;
  for (int j = 0; j + 1 < g.n2; ++j) {
    const double a = g.x2(j);
    const double b = g.x2(j + 1);
    const double l = std::max(a, lo);
    const double r = std::min(b, hi);
    if (r <= l) continue;
    // Linear interpolant on [a, b], integrated exactly over [l, r].
    const double tl = (l - a) / g.h2;
    const double tr = (r - a) / g.h2;
    const double w1 = 0.5 * (tl + tr);
    const double w0 = 1.0 - w1;
    for (int i = 0; i < g.n1; ++i) s += (r - l) * (w0 * f(i, j) + w1 * f(i, j + 1));
  }
  return s * g.h1;
}

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

/// |g_k|^2 for k = 0..n/2 of one real sequence, DFT scaled by 1/n.
std::vector<double> half_spectrum_power(const double* x, int n) {
  std::vector<double> in(x, x + n);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> p(n / 2 + 1);
  const double inv = 1.0 / n;
  for (int k = 0; k <= n / 2; ++k) p[k] = std::norm(out[k] * inv);
  return p;
}

}  // namespace

template <int N>
double boundary_norm(const BoundaryTrace<N>& trace, double s) {
  if (!(s >= -1.0)) throw std::invalid_argument("boundary_norm requires s >= -1");
  for (double x : trace.values)
    if (!std::isfinite(x)) throw DegenerateMapError("boundary_norm: non-finite trace value");
  for (double x : trace.jump)
    if (x != 0.0) throw std::invalid_argument("boundary_norm: trace is not periodic");
  const int n = trace.grid.n1;
  double total = 0.0;
  for (int c = 0; c < N; ++c) {
    const auto p = half_spectrum_power(trace.values.data() + static_cast<std::size_t>(c) * n, n);
    total += p[0];
    for (int k = 1; k < n / 2; ++k) total += 2.0 * std::pow(1.0 + double(k) * k, s) * p[k];
    // Nyquist mode appears once, at k = -n/2.
    const double kn = n / 2;
    total += std::pow(1.0 + kn * kn, s) * p[n / 2];
  }
  return std::sqrt(total);
}

template <int N>
double sobolev_norm(const Field<N>& f, int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("sobolev_norm requires 0 <= k <= 3");
  double total = 0.0;
  // Row a2 holds d2^a2 f; walk a1 along it.
  Field<N> row = f;
  for (int a2 = 0; a2 <= k; ++a2) {
    Field<N> cur = row;
    for (int a1 = 0; a1 + a2 <= k; ++a1) {
      if (a1 + a2 == 0) {
        Field<N> base = f;
        base.jump() = {};
        total += l2_norm_squared(base);
      } else {
        total += l2_norm_squared(cur);
      }
      if (a1 + a2 < k) cur = d1(cur);
    }
    if (a2 < k) row = d2(row);
  }
  return std::sqrt(total);
}

template <int N>
void require_finite(const Field<N>& f, const char* what) {
  if (!f.all_finite()) throw DegenerateMapError(std::string("non-finite value in ") + what);
}

template double boundary_norm<1>(const BoundaryTrace<1>&, double);
template double boundary_norm<2>(const BoundaryTrace<2>&, double);
template double sobolev_norm<1>(const Field<1>&, int);
template double sobolev_norm<2>(const Field<2>&, int);
template double sobolev_norm<4>(const Field<4>&, int);
template void require_finite<1>(const Field<1>&, const char*);
template void require_finite<2>(const Field<2>&, const char*);
template void require_finite<4>(const Field<4>&, const char*);

}  // namespace ops
}  // namespace fbve

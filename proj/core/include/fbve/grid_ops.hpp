/// @file grid_ops.hpp
/// @brief Node-centred storage and second-order difference operators on the
/// strip T x (0,1).
///
/// Layout conventions:
///   - node (i, j) sits at x = (i*h1, j*h2), i in [0, n1) periodic, j in [0, n2-1]
///   - rows j = 0 and j = n2-1 are the bottom and top faces of the strip
///   - field storage is row-major (component, i, j), j fastest
///   - matrix fields store entry (r, c) at component 2*r + c
///
/// A field component may carry a period jump: f(i + n1) = f(i) + jump. The
/// flow map has jump (1, 0) because eta_1 = x_1 + periodic. Every x1
/// derivative honours the jump; derived fields carry no jump.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fbve {

struct Grid {
  int n1 = 0;
  int n2 = 0;
  double h1 = 0.0;
  double h2 = 0.0;

  Grid() = default;
  /// Throws std::invalid_argument unless n1 >= 8 is even and n2 >= 5.
  Grid(int n1_, int n2_);

  double x1(int i) const { return i * h1; }
  double x2(int j) const { return j * h2; }
  int top_row() const { return n2 - 1; }
  std::size_t nodes() const { return static_cast<std::size_t>(n1) * n2; }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n1 == b.n1 && a.n2 == b.n2; }
};

enum class Face { bottom, top };

/// Sign of the outward normal's x2 component: -1 at the bottom, +1 at the top.
constexpr double face_sign(Face f) { return f == Face::top ? 1.0 : -1.0; }
constexpr int face_row(const Grid& g, Face f) { return f == Face::top ? g.n2 - 1 : 0; }
constexpr std::array<Face, 2> kFaces{Face::bottom, Face::top};

/// Index of matrix entry (r, c) in a 4-component field.
constexpr int mi(int r, int c) { return 2 * r + c; }

template <int N>
class Field {
  static_assert(N == 1 || N == 2 || N == 4, "fields carry 1, 2 or 4 components");

 public:
  static constexpr int components = N;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid_(g), data_(N * g.nodes(), fill) {}

  const Grid& grid() const { return grid_; }

  double& operator()(int c, int i, int j) { return data_[index(c, i, j)]; }
  double operator()(int c, int i, int j) const { return data_[index(c, i, j)]; }
  /// Scalar shorthand.
  double& operator()(int i, int j) { return data_[index(0, i, j)]; }
  double operator()(int i, int j) const { return data_[index(0, i, j)]; }

  std::span<double> component(int c) { return {data_.data() + c * grid_.nodes(), grid_.nodes()}; }
  std::span<const double> component(int c) const {
    return {data_.data() + c * grid_.nodes(), grid_.nodes()};
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  std::array<double, N>& jump() { return jump_; }
  const std::array<double, N>& jump() const { return jump_; }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    for (int c = 0; c < N; ++c) jump_[c] += o.jump_[c];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    for (int c = 0; c < N; ++c) jump_[c] -= o.jump_[c];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& x : data_) x *= s;
    for (auto& x : jump_) x *= s;
    return *this;
  }
  /// this += s * o
  Field& axpy(double s, const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    for (int c = 0; c < N; ++c) jump_[c] += s * o.jump_[c];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  std::size_t index(int c, int i, int j) const {
    return (static_cast<std::size_t>(c) * grid_.n1 + i) * grid_.n2 + j;
  }
  void check_same(const Field& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("field grids differ");
  }

  Grid grid_;
  std::vector<double> data_;
  std::array<double, N> jump_{};
};

using ScalarField = Field<1>;
using VectorField = Field<2>;
using MatrixField = Field<4>;

/// Values of an N-component quantity along one boundary face.
template <int N>
struct BoundaryTrace {
  Grid grid;
  Face face = Face::bottom;
  std::vector<double> values;  // (component, i)
  std::array<double, N> jump{};

  BoundaryTrace() = default;
  BoundaryTrace(const Grid& g, Face f, double fill = 0.0)
      : grid(g), face(f), values(static_cast<std::size_t>(N) * g.n1, fill) {}

  double sign() const { return face_sign(face); }
  double& operator()(int c, int i) { return values[static_cast<std::size_t>(c) * grid.n1 + i]; }
  double operator()(int c, int i) const { return values[static_cast<std::size_t>(c) * grid.n1 + i]; }
};

namespace ops {

/// Periodic value lookup honouring the period jump.
template <int N>
inline double wrapped(const Field<N>& f, int c, int i, int j) {
  const int n = f.grid().n1;
  if (i < 0) return f(c, i + n, j) - f.jump()[c];
  if (i >= n) return f(c, i - n, j) + f.jump()[c];
  return f(c, i, j);
}

/// Centred periodic difference in x1: (f(i+1) - f(i-1)) / (2 h1).
template <int N>
Field<N> d1(const Field<N>& f) {
  const Grid& g = f.grid();
  Field<N> out(g);
  const double inv = 1.0 / (2.0 * g.h1);
  for (int c = 0; c < N; ++c) {
    const double jmp = f.jump()[c];
    for (int i = 0; i < g.n1; ++i) {
      const int ip = (i + 1) % g.n1;
      const int im = (i + g.n1 - 1) % g.n1;
      const double lift_p = (i + 1 == g.n1) ? jmp : 0.0;
      const double lift_m = (i == 0) ? jmp : 0.0;
      for (int j = 0; j < g.n2; ++j)
        out(c, i, j) = ((f(c, ip, j) + lift_p) - (f(c, im, j) - lift_m)) * inv;
    }
  }
  return out;
}

/// Centred difference in x2 with second-order one-sided closures
/// (-3f0 + 4f1 - f2)/(2h2) at j = 0 and its mirror at j = n2-1.
template <int N>
Field<N> d2(const Field<N>& f) {
  const Grid& g = f.grid();
  Field<N> out(g);
  const double inv = 1.0 / (2.0 * g.h2);
  const int t = g.n2 - 1;
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < g.n1; ++i) {
      out(c, i, 0) = (-3.0 * f(c, i, 0) + 4.0 * f(c, i, 1) - f(c, i, 2)) * inv;
      for (int j = 1; j < t; ++j) out(c, i, j) = (f(c, i, j + 1) - f(c, i, j - 1)) * inv;
      out(c, i, t) = (3.0 * f(c, i, t) - 4.0 * f(c, i, t - 1) + f(c, i, t - 2)) * inv;
    }
  return out;
}

/// Extracts the face row of a field (jump carried over).
template <int N>
BoundaryTrace<N> trace(const Field<N>& f, Face face) {
  BoundaryTrace<N> out(f.grid(), face);
  const int j = face_row(f.grid(), face);
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < f.grid().n1; ++i) out(c, i) = f(c, i, j);
  out.jump = f.jump();
  return out;
}

/// Centred periodic derivative along a face.
template <int N>
BoundaryTrace<N> d1(const BoundaryTrace<N>& tr) {
  const Grid& g = tr.grid;
  BoundaryTrace<N> out(g, tr.face);
  const double inv = 1.0 / (2.0 * g.h1);
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < g.n1; ++i) {
      const double fp = (i + 1 == g.n1) ? tr(c, 0) + tr.jump[c] : tr(c, i + 1);
      const double fm = (i == 0) ? tr(c, g.n1 - 1) - tr.jump[c] : tr(c, i - 1);
      out(c, i) = (fp - fm) * inv;
    }
  return out;
}

/// D2 of the x2-flux with the face values replaced by s * traction
/// (s = -1 bottom, +1 top) and the one-sided closures of d2.
VectorField flux_div2(const VectorField& flux, const BoundaryTrace<2>& traction_bottom,
                      const BoundaryTrace<2>& traction_top);

/// Trapezoidal weight of row j in x2 (h2/2 on the faces, h2 inside).
inline double row_weight(const Grid& g, int j) {
  return (j == 0 || j == g.n2 - 1) ? 0.5 * g.h2 : g.h2;
}

/// Integral over the strip: rectangle rule in x1, trapezoid in x2.
double integrate(const ScalarField& f);

/// Squared L2 norm summed over components.
template <int N>
double l2_norm_squared(const Field<N>& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) s += g.h1 * row_weight(g, j) * f(c, i, j) * f(c, i, j);
  return s;
}

/// Integral over x2 in [lo, hi] of a nodal field, treated as piecewise linear
/// in x2 (partial cells included); rectangle rule in x1.
double integrate_band(const ScalarField& f, double lo, double hi);

/// Boundary Sobolev norm (sum_k (1 + k^2)^s |g_k|^2)^(1/2) over integer modes
/// k in [-n1/2, n1/2), DFT normalised by 1/n1. Throws for non-finite input,
/// s < -1, or a trace with a non-zero period jump.
template <int N>
double boundary_norm(const BoundaryTrace<N>& trace, double s);

/// Discrete H^k norm: sum over multi-indices (a1, a2) with a1 + a2 <= k of
/// || d1^a1 d2^a2 f ||^2, square-rooted. Requires 0 <= k <= 3.
template <int N>
double sobolev_norm(const Field<N>& f, int k);

/// h1-weighted L2 norm of a trace (summed over components).
template <int N>
double trace_l2_norm(const BoundaryTrace<N>& tr) {
  double s = 0.0;
  for (double x : tr.values) s += tr.grid.h1 * x * x;
  return std::sqrt(s);
}

template <int N>
double max_abs(const Field<N>& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

/// Throws DegenerateMapError naming `what` when any entry is NaN/Inf.
template <int N>
void require_finite(const Field<N>& f, const char* what);

}  // namespace ops

/// Node coordinates as a flow map: (x1, x2) with jump (1, 0).
VectorField identity_map(const Grid& g);

}  // namespace fbve

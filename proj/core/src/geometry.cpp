#include "fbve/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbve/errors.hpp"

namespace fbve::geometry {

MatrixField deformation_gradient(const VectorField& eta) {
  const Grid& g = eta.grid();
  const VectorField e1 = ops::d1(eta);
  const VectorField e2 = ops::d2(eta);
  MatrixField F(g);
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        F(mi(r, 0), i, j) = e1(r, i, j);
        F(mi(r, 1), i, j) = e2(r, i, j);
      }
  return F;
}

ScalarField jacobian(const MatrixField& F, double j_floor) {
  const Grid& g = F.grid();
  ScalarField J(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double v = F(0, i, j) * F(3, i, j) - F(1, i, j) * F(2, i, j);
      if (!(v > j_floor)) {
        std::ostringstream os;
        os << "degenerate map: J = " << v << " at node (" << i << ", " << j << ")";
        throw DegenerateMapError(os.str());
      }
      J(i, j) = v;
    }
  return J;
}

MatrixField cofactor(const MatrixField& F) {
  const Grid& g = F.grid();
  MatrixField a(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      a(mi(0, 0), i, j) = F(mi(1, 1), i, j);
      a(mi(0, 1), i, j) = -F(mi(1, 0), i, j);
      a(mi(1, 0), i, j) = -F(mi(0, 1), i, j);
      a(mi(1, 1), i, j) = F(mi(0, 0), i, j);
    }
  return a;
}

MatrixField inverse_transpose(const MatrixField& a, const ScalarField& J) {
  const Grid& g = a.grid();
  MatrixField A(g);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) A(c, i, j) = a(c, i, j) / J(i, j);
  return A;
}

namespace {

BoundaryTrace<2> tangent(const VectorField& eta, Face face) {
  return ops::d1(ops::trace(eta, face));
}

}  // namespace

BoundaryTrace<1> metric(const VectorField& eta, Face face) {
  const auto t = tangent(eta, face);
  BoundaryTrace<1> m(eta.grid(), face);
  for (int i = 0; i < eta.grid().n1; ++i) m(0, i) = t(0, i) * t(0, i) + t(1, i) * t(1, i);
  return m;
}

BoundaryTrace<2> outward_normal(const VectorField& eta, Face face) {
  const auto t = tangent(eta, face);
  const double s = face_sign(face);
  BoundaryTrace<2> n(eta.grid(), face);
  for (int i = 0; i < eta.grid().n1; ++i) {
    const double len = std::hypot(t(0, i), t(1, i));
    if (!(len >= kTangentFloor)) {
      std::ostringstream os;
      os << "degenerate boundary tangent |d1 eta| = " << len << " at i = " << i;
      throw DegenerateMapError(os.str());
    }
    n(0, i) = -s * t(1, i) / len;
    n(1, i) = s * t(0, i) / len;
  }
  return n;
}

GeometryCache build_cache(const VectorField& eta, double j_floor) {
  ops::require_finite(eta, "flow map");
  GeometryCache c;
  c.grad_eta = deformation_gradient(eta);
  c.J = jacobian(c.grad_eta, j_floor);
  c.a = cofactor(c.grad_eta);
  c.A = inverse_transpose(c.a, c.J);
  c.g_metric_bottom = metric(eta, Face::bottom);
  c.g_metric_top = metric(eta, Face::top);
  c.normal_bottom = outward_normal(eta, Face::bottom);
  c.normal_top = outward_normal(eta, Face::top);
  return c;
}

namespace {

double piola_rows(const MatrixField& a, int j_lo, int j_hi, bool boundary_only) {
  const Grid& g = a.grid();
  const MatrixField da1 = ops::d1(a);
  const MatrixField da2 = ops::d2(a);
  double m = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < g.n1; ++i)
      for (int j = j_lo; j <= j_hi; ++j) {
        if (boundary_only && j != 0 && j != g.n2 - 1) continue;
        m = std::max(m, std::abs(da1(mi(k, 0), i, j) + da2(mi(k, 1), i, j)));
      }
  return m;
}

}  // namespace

double piola_residual(const MatrixField& a) {
  return piola_rows(a, 1, a.grid().n2 - 2, false);
}

double piola_residual_boundary(const MatrixField& a) {
  return piola_rows(a, 0, a.grid().n2 - 1, true);
}

double metric_decomp_residual(const MatrixField& a, const MatrixField& F) {
  const Grid& g = a.grid();
  double m = 0.0;
  for (Face face : kFaces) {
    const int j = face_row(g, face);
    for (int i = 0; i < g.n1; ++i) {
      const double t[2] = {F(mi(0, 0), i, j), F(mi(1, 0), i, j)};
      const double c2[2] = {a(mi(0, 1), i, j), a(mi(1, 1), i, j)};
      const double gm = t[0] * t[0] + t[1] * t[1];
      const double scale = std::max(gm, 1e-300);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          const double lhs = c2[p] * c2[q] + t[p] * t[q];
          const double rhs = (p == q) ? gm : 0.0;
          m = std::max(m, std::abs(lhs - rhs) / scale);
        }
    }
  }
  return m;
}

double cofactor_identity_residual(const MatrixField& a, const MatrixField& F, const ScalarField& J) {
  const Grid& g = a.grid();
  double m = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double scale = std::max(1.0, std::abs(J(i, j)));
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          double s = 0.0;
          for (int k = 0; k < 2; ++k) s += a(mi(p, k), i, j) * F(mi(q, k), i, j);
          const double rhs = (p == q) ? J(i, j) : 0.0;
          m = std::max(m, std::abs(s - rhs) / scale);
        }
    }
  return m;
}

double geo_diff_residual(const VectorField& eta) {
  const Grid& g = eta.grid();
  const MatrixField F = deformation_gradient(eta);
  const MatrixField a = cofactor(F);
  ScalarField J(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j)
      J(i, j) = F(0, i, j) * F(3, i, j) - F(1, i, j) * F(2, i, j);
  double m = 0.0;
  for (int dir = 0; dir < 2; ++dir) {
    const ScalarField dJ = dir == 0 ? ops::d1(J) : ops::d2(J);
    VectorField deta = dir == 0 ? ops::d1(eta) : ops::d2(eta);
    const MatrixField G = deformation_gradient(deta);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 1; j < g.n2 - 1; ++j) {
        double s = 0.0;
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) s += a(mi(p, q), i, j) * G(mi(p, q), i, j);
        m = std::max(m, std::abs(dJ(i, j) - s));
      }
  }
  return m;
}

}  // namespace fbve::geometry

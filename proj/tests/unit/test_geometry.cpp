#include <doctest.h>

#include <Eigen/Dense>

#include "fbve/errors.hpp"
#include "fbve/geometry.hpp"
#include "support.hpp"

using namespace fbve;
using namespace fbve::testing;

namespace {

VectorField affine(const Grid& g, double s1, double s2) {
  VectorField eta = sample<2>(g, [&](int c, double x1, double x2) { return c == 0 ? s1 * x1 : s2 * x2; });
  eta.jump() = {s1, 0.0};
  return eta;
}

VectorField wobble(const Grid& g) {
  VectorField eta = identity_map(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) eta(0, i, j) += 0.1 * std::sin(2 * kPi * g.x1(i));
  return eta;
}

}  // namespace

TEST_CASE("deformation gradient of the identity and affine maps") {
  const Grid g(16, 9);
  const auto F = geometry::deformation_gradient(identity_map(g));
  const auto D = geometry::deformation_gradient(affine(g, 2.0, 3.0));
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      CHECK(F(mi(0, 0), i, j) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(F(mi(1, 1), i, j) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(F(mi(0, 1), i, j)) < 1e-14);
      CHECK(std::abs(F(mi(1, 0), i, j)) < 1e-14);
      CHECK(D(mi(0, 0), i, j) == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(D(mi(1, 1), i, j) == doctest::Approx(3.0).epsilon(1e-14));
    }
  const auto a = geometry::cofactor(D);
  const auto J = geometry::jacobian(D);
  CHECK(a(mi(0, 0), 3, 4) == doctest::Approx(3.0));
  CHECK(a(mi(1, 1), 3, 4) == doctest::Approx(2.0));
  CHECK(J(3, 4) == doctest::Approx(6.0));
}

TEST_CASE("wobbled map: gradient and Jacobian against the symbolic oracle") {
  const Grid g(64, 9);
  const auto F = geometry::deformation_gradient(wobble(g));
  const auto J = geometry::jacobian(F);
  double eF = 0.0, eJ = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const double exact = 1.0 + 0.2 * kPi * std::cos(2 * kPi * g.x1(i));
    eF = std::max(eF, std::abs(F(mi(0, 0), i, 4) - exact));
    eJ = std::max(eJ, std::abs(J(i, 4) - exact));
  }
  CHECK(eF <= 0.2 * kPi * 4 * kPi * kPi / 6 * g.h1 * g.h1 * 1.01);
  CHECK(eJ <= 0.2 * kPi * 4 * kPi * kPi / 6 * g.h1 * g.h1 * 1.01);
  CHECK(1.0 + 0.2 * kPi == doctest::Approx(1.6283).epsilon(1e-4));
}

TEST_CASE("jacobian of shifted identity is exactly one") {
  const Grid g(16, 9);
  VectorField eta = identity_map(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      eta(0, i, j) += 0.37;
      eta(1, i, j) -= 1.25;
    }
  const auto J = geometry::jacobian(geometry::deformation_gradient(eta));
  for (double x : J.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("jacobian rejects folded maps") {
  const Grid g(16, 9);
  CHECK_THROWS_AS(geometry::jacobian(geometry::deformation_gradient(affine(g, 1.0, -1.0))),
                  DegenerateMapError);
  CHECK_THROWS_AS(geometry::build_cache(affine(g, 1.0, 1e-8)), DegenerateMapError);
}

TEST_CASE("cofactor and inverse transpose against Eigen on random maps") {
  const Grid g(32, 17);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto eta = RandomSmoothMap(seed, 0.04).eta(g);
    const auto c = geometry::build_cache(eta);
    double err = 0.0;
    for (int i = 0; i < g.n1; i += 3)
      for (int j = 0; j < g.n2; j += 2) {
        Eigen::Matrix2d F;
        F << c.grad_eta(0, i, j), c.grad_eta(1, i, j), c.grad_eta(2, i, j), c.grad_eta(3, i, j);
        const Eigen::Matrix2d A = F.inverse().transpose();
        const Eigen::Matrix2d a = F.determinant() * A;
        for (int r = 0; r < 2; ++r)
          for (int k = 0; k < 2; ++k) {
            err = std::max(err, std::abs(c.a(mi(r, k), i, j) - a(r, k)));
            err = std::max(err, std::abs(c.A(mi(r, k), i, j) - A(r, k)));
          }
        err = std::max(err, std::abs(c.J(i, j) - F.determinant()));
      }
    CHECK(err <= 1e-13);
    CHECK(geometry::cofactor_identity_residual(c.a, c.grad_eta, c.J) <= 1e-12);
  }
}

TEST_CASE("outward normals") {
  const Grid g(64, 9);
  const auto id = identity_map(g);
  const auto nt = geometry::outward_normal(id, Face::top);
  const auto nb = geometry::outward_normal(id, Face::bottom);
  for (int i = 0; i < g.n1; ++i) {
    CHECK(std::abs(nt(0, i)) < 1e-15);
    CHECK(nt(1, i) == doctest::Approx(1.0));
    CHECK(std::abs(nb(0, i)) < 1e-15);
    CHECK(nb(1, i) == doctest::Approx(-1.0));
  }

  VectorField eta = identity_map(g);
  for (int i = 0; i < g.n1; ++i) eta(1, i, g.n2 - 1) += 0.1 * std::sin(2 * kPi * g.x1(i));
  const auto n = geometry::outward_normal(eta, Face::top);
  double err = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const double t = -0.2 * kPi * std::cos(2 * kPi * g.x1(i));
    const double len = std::hypot(t, 1.0);
    err = std::max(err, std::abs(n(0, i) - t / len) + std::abs(n(1, i) - 1.0 / len));
  }
  CHECK(err <= 1e-2 * 0.2 * kPi);
  CHECK(err <= 5.0 * g.h1 * g.h1);
}

TEST_CASE("metric is |d1 eta|^2") {
  const Grid g(16, 9);
  const auto m = geometry::metric(affine(g, 2.0, 3.0), Face::top);
  for (double x : m.values) CHECK(x == doctest::Approx(4.0));
}

TEST_CASE("Piola identity holds to rounding on every row") {
  const Grid g(32, 17);
  CHECK(geometry::piola_residual(geometry::cofactor(geometry::deformation_gradient(identity_map(g)))) == 0.0);
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto a = geometry::cofactor(geometry::deformation_gradient(RandomSmoothMap(seed).eta(g)));
    CHECK(geometry::piola_residual(a) <= 1e-12);
    // The one-sided closure in x2 also commutes with d1, so the face rows
    // are exact too (stronger than second order).
    CHECK(geometry::piola_residual_boundary(a) <= 1e-11);
  }
}

TEST_CASE("metric decomposition identity") {
  const Grid g(8, 5);
  MatrixField F(g);
  auto set = [&](int i, double t1, double t2) {
    for (int j : {0, g.n2 - 1}) {
      F(mi(0, 0), i, j) = t1;
      F(mi(1, 0), i, j) = t2;
      F(mi(0, 1), i, j) = 0.0;
      F(mi(1, 1), i, j) = 1.0;
    }
  };
  for (int i = 0; i < g.n1; ++i) set(i, i % 2 ? 3.0 : 1.0, i % 2 ? 4.0 : 0.0);
  const auto c = geometry::cofactor(F);
  CHECK(c(mi(0, 1), 1, 0) == -4.0);
  CHECK(c(mi(1, 1), 1, 0) == 3.0);
  CHECK(geometry::metric_decomp_residual(c, F) == 0.0);

  std::mt19937_64 rng(11);
  MatrixField R(g);
  for (auto& x : R.values()) x = 4.0 * uniform01(rng) - 2.0;
  CHECK(geometry::metric_decomp_residual(geometry::cofactor(R), R) <= 1e-13);
}

TEST_CASE("geometric differentiation identity") {
  const Grid g(16, 9);
  CHECK(geometry::geo_diff_residual(identity_map(g)) == 0.0);
  CHECK(geometry::geo_diff_residual(affine(g, 2.0, 0.5)) <= 1e-13);
  std::vector<double> h, e;
  for (int n : {16, 32, 64}) {
    const Grid gg(n, n / 2 + 1);
    VectorField eta = identity_map(gg);
    for (int i = 0; i < gg.n1; ++i)
      for (int j = 0; j < gg.n2; ++j) eta(0, i, j) += 0.05 * std::sin(2 * kPi * gg.x1(i)) * gg.x2(j);
    // J = d1 eta_1 here, so the identity is exact up to rounding.
    CHECK(geometry::geo_diff_residual(eta) <= 1e-11);
    for (int i = 0; i < gg.n1; ++i)
      for (int j = 0; j < gg.n2; ++j) eta(1, i, j) += 0.05 * std::cos(2 * kPi * gg.x1(i)) * std::sin(kPi * gg.x2(j));
    h.push_back(gg.h1);
    e.push_back(geometry::geo_diff_residual(eta));
  }
  const double p = log_slope(h, e);
  CHECK(p > 1.8);
  CHECK(p < 2.3);
}

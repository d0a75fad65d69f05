#include "fbve/manufactured.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "fbve/errors.hpp"

namespace fbve {

namespace {

double space_d(Manufactured::Space s, double k, double p, double x, int order) {
  using S = Manufactured::Space;
  if (s == S::one) return order == 0 ? 1.0 : 0.0;
  const double arg = k * x + p;
  const double kn = std::pow(k, order);
  // sin -> cos -> -sin -> -cos cycle; cos starts one step later.
  const int phase = (order + (s == S::cos ? 1 : 0)) % 4;
  switch (phase) {
    case 0: return kn * std::sin(arg);
    case 1: return kn * std::cos(arg);
    case 2: return -kn * std::sin(arg);
    default: return -kn * std::cos(arg);
  }
}

double time_d(Manufactured::Time s, double w, double p, double t, int order) {
  using T = Manufactured::Time;
  switch (s) {
    case T::constant: return order == 0 ? 1.0 : 0.0;
    case T::linear: return order == 0 ? t : (order == 1 ? 1.0 : 0.0);
    case T::sin: return space_d(Manufactured::Space::sin, w, p, t, order);
    case T::cos: return space_d(Manufactured::Space::cos, w, p, t, order);
  }
  return 0.0;
}

}  // namespace

double Manufactured::u(int comp, double x1, double x2, double t, int a, int b, int c) const {
  double s = 0.0;
  for (const Term& tm : terms_) {
    if (tm.comp != comp) continue;
    s += tm.amp * space_d(tm.x1, tm.k1, tm.p1, x1, a) * space_d(tm.x2, tm.k2, tm.p2, x2, b) *
         time_d(tm.time, tm.w, tm.pt, t, c);
  }
  return s;
}

FlowState Manufactured::state(const Grid& g, double t) const {
  FlowState s(g);
  s.t = t;
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        s.u(r, i, j) = u(r, g.x1(i), g.x2(j), t);
        s.v(r, i, j) = u(r, g.x1(i), g.x2(j), t, 0, 0, 1);
      }
  return s;
}

namespace {

/// F and L with their x1/x2 partials at one point.
struct Jet {
  std::array<Dual, 4> F;
  std::array<Dual, 4> L;
};

Jet jet(const Manufactured& m, double x1, double x2, double t) {
  Jet j;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const int a = c == 0 ? 1 : 0;
      const int b = c == 1 ? 1 : 0;
      j.F[2 * r + c] = Dual((r == c ? 1.0 : 0.0) + m.u(r, x1, x2, t, a, b),
                            m.u(r, x1, x2, t, a + 1, b), m.u(r, x1, x2, t, a, b + 1));
      j.L[2 * r + c] = Dual(m.u(r, x1, x2, t, a, b, 1), m.u(r, x1, x2, t, a + 1, b, 1),
                            m.u(r, x1, x2, t, a, b + 1, 1));
    }
  return j;
}

double uniform_density(const MaterialParams& p) {
  const double r0 = p.rho0.values().front();
  for (double r : p.rho0.values())
    if (r != r0) throw ConfigError("manufactured forcing requires a constant rho0");
  return r0;
}

}  // namespace

Forcing Manufactured::continuous_forcing(const MaterialParams& params) const {
  const double rho = uniform_density(params);
  auto self = std::make_shared<Manufactured>(*this);
  auto p = std::make_shared<MaterialParams>(params);
  Forcing f;
  f.body = [self, p, rho](double t) {
    const Grid& g = p->rho0.grid();
    VectorField out(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        const double x1 = g.x1(i), x2 = g.x2(j);
        const Jet jt = jet(*self, x1, x2, t);
        const auto S = constitutive::stress_kernel(jt.F, jt.L, Dual(rho), *p);
        for (int r = 0; r < 2; ++r) {
          const double div = S[2 * r].d[0] + S[2 * r + 1].d[1];
          out(r, i, j) = self->u(r, x1, x2, t, 0, 0, 2) - div / rho;
        }
      }
    return out;
  };
  f.boundary = [self, p, rho](double t, BoundaryTrace<2>& gb, BoundaryTrace<2>& gt) {
    const Grid& g = p->rho0.grid();
    for (BoundaryTrace<2>* tr : {&gb, &gt}) {
      const double x2 = tr->face == Face::top ? 1.0 : 0.0;
      const double s = tr->sign();
      for (int i = 0; i < g.n1; ++i) {
        const double x1 = g.x1(i);
        const Jet jt = jet(*self, x1, x2, t);
        std::array<double, 4> F, L;
        for (int k = 0; k < 4; ++k) {
          F[k] = jt.F[k].v;
          L[k] = jt.L[k].v;
        }
        const auto S = constitutive::stress_kernel(F, L, rho, *p);
        const double c[2] = {F[0], F[2]};
        const double cp[2] = {jt.F[0].d[0], jt.F[2].d[0]};
        const double len = std::hypot(c[0], c[1]);
        const double tau[2] = {c[0] / len, c[1] / len};
        const double proj = tau[0] * cp[0] + tau[1] * cp[1];
        for (int r = 0; r < 2; ++r) {
          const double curv = p->sigma * (cp[r] - tau[r] * proj) / len;
          (*tr)(r, i) = s * S[2 * r + 1] - curv;
        }
      }
    }
  };
  return f;
}

Forcing Manufactured::discrete_forcing(const MaterialParams& params, const FaultInjection& fault) const {
  auto self = std::make_shared<Manufactured>(*this);
  auto p = std::make_shared<MaterialParams>(params);
  Forcing f;
  f.body = [self, p, fault](double t) {
    const Grid& g = p->rho0.grid();
    const FlowState s = self->state(g, t);
    VectorField out = dynamics::momentum_rhs(s, *p, fault);
    out *= -1.0;
    for (int r = 0; r < 2; ++r)
      for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) out(r, i, j) += self->u(r, g.x1(i), g.x2(j), t, 0, 0, 2);
    return out;
  };
  return f;
}

Manufactured Manufactured::oscillatory(double amplitude, double omega) {
  using std::numbers::pi;
  Term a{0, amplitude, Space::sin, 2 * pi, 0.0, Space::cos, pi, 0.0, Time::cos, omega, 0.0};
  Term b{1, amplitude, Space::cos, 2 * pi, 0.0, Space::sin, pi, 0.3, Time::sin, omega, 0.5};
  return Manufactured({a, b});
}

Manufactured Manufactured::translation(double c1, double c2) {
  Term a{0, c1, Space::one, 0, 0, Space::one, 0, 0, Time::linear, 0, 0};
  Term b{1, c2, Space::one, 0, 0, Space::one, 0, 0, Time::linear, 0, 0};
  return Manufactured({a, b});
}

}  // namespace fbve

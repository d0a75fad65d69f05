/// @file manufactured.hpp
/// @brief Closed-form displacement fields and the forcing that makes them
/// solutions of the forced system.
#pragma once

#include <vector>

#include "fbve/dynamics.hpp"

namespace fbve {

/// Sum of separable terms amp * X1(k1 x1 + p1) * X2(k2 x2 + p2) * T(w t + pt)
/// added to displacement component `comp`.
class Manufactured {
 public:
  enum class Space { one, sin, cos };
  enum class Time { constant, linear, sin, cos };

  struct Term {
    int comp = 0;
    double amp = 0.0;
    Space x1 = Space::one;
    double k1 = 0.0, p1 = 0.0;
    Space x2 = Space::one;
    double k2 = 0.0, p2 = 0.0;
    Time time = Time::constant;
    double w = 0.0, pt = 0.0;
  };

  Manufactured() = default;
  explicit Manufactured(std::vector<Term> terms) : terms_(std::move(terms)) {}

  /// d1^a d2^b dt^c of displacement component `comp`.
  double u(int comp, double x1, double x2, double t, int a = 0, int b = 0, int c = 0) const;

  /// Nodal (u, v = du/dt) at time t.
  FlowState state(const Grid& g, double t) const;

  /// Forcing from the continuous operator: body = u_tt - div(Sigma)/rho and
  /// boundary traction s Sigma_{.2} - sigma d1(d1 eta/|d1 eta|), all exact.
  /// Requires a spatially constant rho0.
  Forcing continuous_forcing(const MaterialParams& p) const;

  /// Forcing from the discrete operator: body = u_tt - momentum_rhs(state(t)),
  /// so the nodal field solves the forced semi-discrete system exactly.
  Forcing discrete_forcing(const MaterialParams& p, const FaultInjection& fault = {}) const;

  const std::vector<Term>& terms() const { return terms_; }

  /// Oscillatory field used by the order study.
  static Manufactured oscillatory(double amplitude = 0.01, double omega = 3.0);
  /// Zero displacement.
  static Manufactured equilibrium() { return Manufactured{}; }
  /// u = c t.
  static Manufactured translation(double c1, double c2);

 private:
  std::vector<Term> terms_;
};

}  // namespace fbve

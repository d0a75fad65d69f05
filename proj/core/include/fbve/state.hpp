/// @file state.hpp
/// @brief The unknowns (eta, v) at one instant.
#pragma once

#include "fbve/grid_ops.hpp"

namespace fbve {

/// The flow map is stored as its displacement u = eta - x so that the flat
/// state is represented exactly; eta() adds the node coordinates back.
struct FlowState {
  VectorField u;
  VectorField v;
  double t = 0.0;

  FlowState() = default;
  explicit FlowState(const Grid& g) : u(g), v(g) {}

  const Grid& grid() const { return u.grid(); }
  VectorField eta() const { return identity_map(u.grid()) + u; }
  void set_eta(const VectorField& eta) { u = eta - identity_map(eta.grid()); }
};

}  // namespace fbve

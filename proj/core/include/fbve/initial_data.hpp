/// @file initial_data.hpp
/// @brief Equilibrium and well-prepared perturbed initial states.
#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "fbve/constitutive.hpp"
#include "fbve/state.hpp"

namespace fbve {

/// Name recorded in manifests for the perturbation generator.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

/// Portable uniform draw in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct PerturbationSpec {
  /// Normal displacement amplitude of the top face; the bottom face uses half.
  double amplitude = 0.005;
  /// Interior bump amplitude relative to `amplitude`.
  double interior = 0.5;
  int mode = 1;
  std::uint64_t seed = 1;
};

namespace initial_data {

/// eta = x, v = 0.
FlowState equilibrium(const Grid& g);

/// Perturbed flat state, v = 0, whose nodal data satisfy the order-zero
/// compatibility condition on both faces exactly (up to Newton tolerance).
FlowState well_prepared(const Grid& g, const MaterialParams& p, const PerturbationSpec& spec);

}  // namespace initial_data
}  // namespace fbve

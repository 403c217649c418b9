#pragma once

#include "chemotax/grid.hpp"

namespace chemotax {

/// Simulation unknowns at one instant. u, v, w share a grid; fixed-step runs
/// keep t == step * dt.
struct SimState {
  ScalarField u;
  ScalarField v;
  ScalarField w;
  double t = 0.0;
  long step = 0;
};

}  // namespace chemotax

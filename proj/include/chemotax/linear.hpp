#pragma once

#include <functional>
#include <optional>

#include "chemotax/grid.hpp"

namespace chemotax {

/// Matrix-free operator: writes A x into `out` (same grid as x).
using LinearOperator = std::function<void(const ScalarField& x, ScalarField& out)>;

struct CgResult {
  ScalarField x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients for operators that are symmetric positive definite in
/// the trapezoid-weighted inner product (the ghost-reflection Laplacian is
/// self-adjoint there, not in the plain Euclidean one). Stops when
/// |A x - rhs| <= tol |rhs| in that norm. Non-convergence is reported through
/// `converged`, not by throwing.
CgResult cg_solve(const LinearOperator& apply_op, const ScalarField& rhs, double tol, int maxiter,
                  const ScalarField* initial_guess = nullptr);

}  // namespace chemotax

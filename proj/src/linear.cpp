#include "chemotax/linear.hpp"

#include <cmath>

#include "chemotax/error.hpp"

namespace chemotax {

CgResult cg_solve(const LinearOperator& apply_op, const ScalarField& rhs, double tol, int maxiter,
                  const ScalarField* initial_guess) {
  if (!(tol > 0.0)) throw InvalidArgument("cg tolerance must be positive");
  if (maxiter < 1) throw InvalidArgument("cg iteration cap must be >= 1");

  CgResult res;
  res.x = initial_guess ? *initial_guess : ScalarField(rhs.grid_ptr());
  const double rhs_norm = std::sqrt(inner_product(rhs, rhs));
  if (!std::isfinite(rhs_norm)) {
    res.relative_residual = rhs_norm;
    return res;
  }
  if (rhs_norm == 0.0) {
    res.x = ScalarField(rhs.grid_ptr());
    res.converged = true;
    return res;
  }

  ScalarField r = rhs;
  ScalarField ap(rhs.grid_ptr());
  if (initial_guess) {
    apply_op(res.x, ap);
    axpy(r, -1.0, ap);
  }
  double rr = inner_product(r, r);
  const double target = tol * rhs_norm;
  if (std::sqrt(rr) <= target) {
    res.relative_residual = std::sqrt(rr) / rhs_norm;
    res.converged = true;
    return res;
  }

  ScalarField p = r;
  for (int it = 1; it <= maxiter; ++it) {
    apply_op(p, ap);
    const double pap = inner_product(p, ap);
    if (!(pap > 0.0)) break;  // not SPD along p, or non-finite data
    const double alpha = rr / pap;
    axpy(res.x, alpha, p);
    axpy(r, -alpha, ap);
    const double rr_new = inner_product(r, r);
    res.iterations = it;
    res.relative_residual = std::sqrt(rr_new) / rhs_norm;
    if (std::sqrt(rr_new) <= target) {
      res.converged = true;
      return res;
    }
    xpby(p, r, rr_new / rr);
    rr = rr_new;
  }
  if (res.iterations == 0) res.relative_residual = std::sqrt(rr) / rhs_norm;
  return res;
}

}  // namespace chemotax

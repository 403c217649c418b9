#pragma once

#include <functional>

#include "chemotax/grid.hpp"
#include "chemotax/model.hpp"

namespace chemotax {

/// rho = min over the boundary of x . nu, d = max over the boundary of |x|.
struct GeometryConstants {
  double rho = 0.0;
  double dmax = 0.0;
};

/// For an axis-aligned box: rho is the smallest face distance from the
/// origin, d the largest corner norm. Throws GeometryError unless the origin
/// lies strictly inside the box.
GeometryConstants geometry_constants(const GridSpec& box);

/// Constants of the convex-domain inequality
///   int f^3 <= A1 (int f^2)^{3/2} + A2/eps^3 (int f^2)^3 + A3 eps int |grad f|^2.
struct PayneConstants {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

/// A1 = 3^{3/2} / (2 rho^{3/2}), A2 = 3^3 / 4^{15/4} (1 + d/rho)^{3/2},
/// A3 = sqrt(2) (1 + d/rho)^{3/2}.
PayneConstants payne_constants(double rho, double dmax);

struct PayneEvaluation {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // lhs <= rhs (1 + 1e-6)
};

/// Evaluates both sides with grid quadrature and central-difference gradients.
/// Throws InvalidArgument for negative f or eps <= 0.
PayneEvaluation payne_inequality(const ScalarField& f, double eps, const PayneConstants& c);
inline bool payne_inequality_check(const ScalarField& f, double eps, const PayneConstants& c) {
  return payne_inequality(f, eps, c).holds;
}

/// Coefficients of Psi' <= A Psi^3 + B Psi^{3/2} + C Psi^tau.
struct ScriptConstants {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// tau = 1:
///   A = 2^7 A2 A3^3 chi^8 max{1, 2^8/3^12 + 2^4 G^4 / (5^3 chi^8)},
///   B = 2 A1 chi^2 max{1, 4/27 + 2 G / chi^2},  C = alpha + 4 (delta M2)^2 + 2 mu,
/// with G = alpha + 4 (gamma M3)^2.
/// tau = 0 (Payne split with eps = 2/A3):
///   A = A2 A3^3 / 8,  B = A1,  C = 4 M2^3 |Omega| / (27 chi alpha).
ScriptConstants script_constants(const ModelParams& params, const MaxBounds& bounds,
                                 const PayneConstants& payne, double omega_volume);

/// Adaptive Simpson on [a, b] to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 50);

/// int_{psi0}^{inf} dPsi / (A Psi^3 + B Psi^{3/2} + C Psi^tau).
///
/// The finite part [psi0, Psi_cut] is integrated with adaptive Simpson on
/// doubling segments; Psi_cut is pushed out until the analytic tail bound
/// (1/(2 A Psi_cut^2), or 2/(B sqrt Psi_cut) when smaller) falls below
/// 1e-12 of the partial integral, and that tail bound is added.
/// Throws InvalidArgument for psi0 <= 0, negative coefficients, or A = B = 0
/// (the integral may diverge).
double lower_bound_time(double psi0, const ScriptConstants& c, int tau, double rel_tol = 1e-8);

/// Every quantity entering the blow-up time lower bound.
struct BoundConstants {
  double rho = 0.0;
  double dmax = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double script_a = 0.0;
  double script_b = 0.0;
  double script_c = 0.0;
  int tau = 1;
  double m2 = 1.0;
  double m3 = 1.0;
  double psi0 = 0.0;
  double t_lower = 0.0;
};

/// geometry -> Payne constants -> maximum-principle bounds -> script
/// constants -> Psi(0) on the data's grid -> lower bound.
BoundConstants evaluate_bound(const ModelParams& params, const InitialData& data);

}  // namespace chemotax

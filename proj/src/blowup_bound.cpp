#include "chemotax/blowup_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemotax/diagnostics.hpp"
#include "chemotax/error.hpp"

namespace chemotax {

GeometryConstants geometry_constants(const GridSpec& box) {
  GeometryConstants g;
  g.rho = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (!(box.lo[a] < 0.0 && box.hi[a] > 0.0))
      throw GeometryError("origin must lie strictly inside the box (axis " + std::to_string(a) +
                          ")");
    g.rho = std::min({g.rho, box.hi[a], -box.lo[a]});
  }
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double far = std::max(box.hi[a], -box.lo[a]);
    d2 += far * far;
  }
  g.dmax = std::sqrt(d2);
  return g;
}

PayneConstants payne_constants(double rho, double dmax) {
  if (!(rho > 0.0)) throw InvalidArgument("payne constants require rho > 0");
  if (!(dmax >= rho)) throw InvalidArgument("payne constants require d >= rho");
  const double ratio = std::pow(1.0 + dmax / rho, 1.5);
  PayneConstants c;
  c.a1 = std::pow(3.0, 1.5) / (2.0 * std::pow(rho, 1.5));
  c.a2 = 27.0 / std::pow(4.0, 3.75) * ratio;
  c.a3 = std::sqrt(2.0) * ratio;
  return c;
}

PayneEvaluation payne_inequality(const ScalarField& f, double eps, const PayneConstants& c) {
  if (!(eps > 0.0)) throw InvalidArgument("payne inequality requires eps > 0");
  if (f.min() < 0.0) throw InvalidArgument("payne inequality requires a nonnegative field");
  ScalarField sq = f, cube = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    sq[i] = f[i] * f[i];
    cube[i] = sq[i] * f[i];
  }
  const double l2 = integrate(sq);
  PayneEvaluation ev;
  ev.lhs = integrate(cube);
  ev.rhs = c.a1 * std::pow(l2, 1.5) + c.a2 / (eps * eps * eps) * l2 * l2 * l2 +
           c.a3 * eps * integrate(gradient_sq(f));
  ev.holds = ev.lhs <= ev.rhs * (1.0 + 1e-6);
  return ev;
}

ScriptConstants script_constants(const ModelParams& params, const MaxBounds& bounds,
                                 const PayneConstants& payne, double omega_volume) {
  if (!(params.chi > 0.0)) throw InvalidArgument("script constants require chi > 0");
  ScriptConstants s;
  const double chi = params.chi;
  if (params.tau == 1) {
    const double g = params.alpha + 4.0 * std::pow(params.gamma * bounds.m3, 2);
    const double chi2 = chi * chi;
    const double chi8 = std::pow(chi, 8);
    s.a = 128.0 * payne.a2 * std::pow(payne.a3, 3) * chi8 *
          std::max(1.0, 256.0 / std::pow(3.0, 12) + 16.0 * std::pow(g, 4) / (125.0 * chi8));
    s.b = 2.0 * payne.a1 * chi2 * std::max(1.0, 4.0 / 27.0 + 2.0 * g / chi2);
    s.c = params.alpha + 4.0 * std::pow(params.delta * bounds.m2, 2) + 2.0 * params.mu;
  } else {
    s.a = payne.a2 * std::pow(payne.a3, 3) / 8.0;
    s.b = payne.a1;
    s.c = 4.0 * std::pow(bounds.m2, 3) * omega_volume / (27.0 * chi * params.alpha);
  }
  return s;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double m,
                    double fm, double b, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, m, fm, b, fb, whole, abs_tol, max_depth);
}

double lower_bound_time(double psi0, const ScriptConstants& c, int tau, double rel_tol) {
  if (!(psi0 > 0.0) || !std::isfinite(psi0)) throw InvalidArgument("psi0 must be positive");
  if (c.a < 0.0 || c.b < 0.0 || c.c < 0.0)
    throw InvalidArgument("script constants must be nonnegative");
  if (!(c.a > 0.0 || c.b > 0.0))
    throw InvalidArgument("script_a and script_b both zero: the integral may diverge");
  if (tau != 0 && tau != 1) throw InvalidArgument("tau must be 0 or 1");

  const double ctau = tau == 1 ? 1.0 : 0.0;
  auto integrand = [&](double psi) {
    const double pow_tau = ctau == 1.0 ? psi : 1.0;
    return 1.0 / (c.a * psi * psi * psi + c.b * psi * std::sqrt(psi) + c.c * pow_tau);
  };
  auto tail = [&](double x) {
    double t = std::numeric_limits<double>::infinity();
    if (c.a > 0.0) t = std::min(t, 1.0 / (2.0 * c.a * x * x));
    if (c.b > 0.0) t = std::min(t, 2.0 / (c.b * std::sqrt(x)));
    return t;
  };

  const std::function<double(double)> f = integrand;
  double partial = 0.0;
  double lo = psi0;
  for (int seg = 0; seg < 1000; ++seg) {
    const double hi = 2.0 * lo;
    if (!std::isfinite(hi)) break;
    // The segment scale comes from a plain Simpson estimate.
    const double scale = (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    partial += adaptive_simpson(f, lo, hi, rel_tol * scale);
    lo = hi;
    if (tail(lo) < 1e-12 * partial) break;
  }
  return partial + tail(lo);
}

BoundConstants evaluate_bound(const ModelParams& params, const InitialData& data) {
  params.validate();
  data.validate();
  const Grid& grid = data.u0.grid();
  BoundConstants out;
  const GeometryConstants geo = geometry_constants(grid.spec());
  const PayneConstants payne = payne_constants(geo.rho, geo.dmax);
  const MaxBounds bounds = max_bounds(params, data);
  const ScriptConstants script = script_constants(params, bounds, payne, grid.volume());
  out.rho = geo.rho;
  out.dmax = geo.dmax;
  out.a1 = payne.a1;
  out.a2 = payne.a2;
  out.a3 = payne.a3;
  out.script_a = script.a;
  out.script_b = script.b;
  out.script_c = script.c;
  out.tau = params.tau;
  out.m2 = bounds.m2;
  out.m3 = bounds.m3;
  SimState initial{data.u0, data.v0, data.w0, 0.0, 0};
  out.psi0 = psi_tau(initial, params.tau);
  out.t_lower = lower_bound_time(out.psi0, script, params.tau);
  return out;
}

}  // namespace chemotax

#pragma once

#include <optional>

#include "chemotax/grid.hpp"

namespace chemotax {

/// Coefficients of the tumour-immune chemotaxis system
///
///   u_t = Lap u - chi div(u grad v)
///   tau v_t = Lap v + alpha w - beta v - gamma u v
///   tau w_t = Lap w - delta u w + mu w (1 - w)
///
/// with homogeneous Neumann conditions. tau = 1 is fully parabolic, tau = 0
/// makes the v and w equations elliptic constraints.
struct ModelParams {
  double chi = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 1.0;
  double mu = 1.0;
  int tau = 1;

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Initial lymphocyte density u0, signal v0 and tumour density w0. For tau = 0
/// v0 and w0 only seed the elliptic solves.
struct InitialData {
  ScalarField u0;
  ScalarField v0;
  ScalarField w0;

  /// Throws InvalidArgument unless the fields share a grid and are >= 0.
  void validate() const;
};

/// amplitude * exp(-rate * |x|^2) at every node.
ScalarField gaussian_data(const GridPtr& grid, double amplitude, double rate);

/// Mass of u0 and the maximum-principle ceilings for w (m2) and v (m3).
struct MaxBounds {
  double m1 = 0.0;
  double m2 = 1.0;
  double m3 = 1.0;
};

MaxBounds max_bounds(const ModelParams& params, const InitialData& data);

// ---------------------------------------------------------------------------
// Auxiliary weight phi = exp(zeta) used by the L^p estimate in the fully
// parabolic case.

struct PhiCertificate {
  double p = 0.0;
  double eps = 0.0;
  double K = 0.0;
  double k = 0.0;
  double l = 0.0;
  double m = 0.0;
  double r = 0.0;
  /// K lies strictly below phi_admissible_limit(p, eps).
  bool satisfied = false;
};

/// Largest admissible range bound:
/// (2/sqrt p) sqrt((1-eps)/(1+p eps)) (pi/2 + atan(eps sqrt(p / (1+(p-1)eps-p eps^2)))).
double phi_admissible_limit(double p, double eps);

/// Fills k, l, m, r and `satisfied`. Requires p > 1, eps in (0,1), K > 0.
PhiCertificate make_phi_certificate(double p, double eps, double K);

/// Argument of the tangent in zeta', a x + b. Stays in (-pi/2, pi/2) on [0, K]
/// for a satisfied certificate.
double phi_tangent_argument(double x, const PhiCertificate& cert);

/// zeta and its first two derivatives, in closed form. x must lie in [0, K]
/// and the certificate must be satisfied.
double zeta(double x, const PhiCertificate& cert);
double zeta_prime(double x, const PhiCertificate& cert);
double zeta_second(double x, const PhiCertificate& cert);

double phi(double x, const PhiCertificate& cert);
double phi_prime(double x, const PhiCertificate& cert);
double phi_second(double x, const PhiCertificate& cert);

/// Worst-case residuals of the phi properties over `samples` equispaced points
/// of [0, K]. Quantities are divided by phi(x) >= 1, which keeps them O(zeta'^2)
/// instead of O(phi zeta'^2).
struct PhiResiduals {
  double min_phi = 0.0;            // >= 1
  double max_phi_over_phiK = 0.0;  // <= 1
  double min_phi_prime = 0.0;      // phi'/phi, >= 0
  double min_convexity = 0.0;      // ((1/p) phi'' - phi') / phi, >= 0
  double max_identity = 0.0;       // |identity| / phi, == 0
  bool monotone = true;
};

PhiResiduals phi_residuals(const PhiCertificate& cert, int samples);

/// Outcome of the global boundedness smallness test.
struct CertificateReport {
  bool pass = false;
  int tau = 1;
  int n = 3;
  double K = 0.0;          // tau * chi * max{alpha/beta, (alpha/beta)|w0|, |v0|}
  double threshold = 0.0;  // pi sqrt(2/n)
  double margin = 0.0;     // K - threshold (negative on PASS when tau = 1)
  std::optional<double> eps;
  std::optional<PhiCertificate> certificate;
};

/// Epsilon used to close the boundedness argument:
/// (pi^2 - (n/2) K^2) / (2 (pi^2 + (n/2)^2 K^2)).
double boundedness_epsilon(double K, int n);

CertificateReport boundedness_certificate(const ModelParams& params, const InitialData& data,
                                          int n = 3);

}  // namespace chemotax

#include "chemotax/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chemotax/error.hpp"

namespace chemotax {

void ModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(name) + " must be a positive finite number");
  };
  if (!(chi >= 0.0) || !std::isfinite(chi))
    throw InvalidArgument("chi must be a nonnegative finite number");
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(gamma, "gamma");
  positive(delta, "delta");
  positive(mu, "mu");
  if (tau != 0 && tau != 1) throw InvalidArgument("tau must be 0 or 1");
}

void InitialData::validate() const {
  require_same_grid(u0, v0);
  require_same_grid(u0, w0);
  auto nonneg = [](const ScalarField& f, const char* name) {
    if (!f.all_finite() || f.min() < 0.0)
      throw InvalidArgument(std::string(name) + " must be finite and nonnegative");
  };
  nonneg(u0, "u0");
  nonneg(v0, "v0");
  nonneg(w0, "w0");
}

ScalarField gaussian_data(const GridPtr& grid, double amplitude, double rate) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("gaussian amplitude must be >= 0");
  if (!(rate > 0.0)) throw InvalidArgument("gaussian rate must be > 0");
  return sample(grid, [=](double x, double y, double z) {
    return amplitude * std::exp(-rate * (x * x + y * y + z * z));
  });
}

MaxBounds max_bounds(const ModelParams& params, const InitialData& data) {
  MaxBounds b;
  const double tau = params.tau;
  b.m1 = integrate(data.u0);
  b.m2 = std::max(1.0, tau * linf_norm(data.w0));
  b.m3 = std::max(params.alpha / params.beta * b.m2, tau * linf_norm(data.v0));
  return b;
}

// ---------------------------------------------------------------------------

namespace {

struct ZetaShape {
  double disc_sqrt;  // sqrt(4km - l^2)
  double a;          // disc_sqrt / (2r)
  double b;          // atan(l / disc_sqrt)
};

ZetaShape shape(const PhiCertificate& c) {
  const double disc = 4.0 * c.k * c.m - c.l * c.l;
  const double s = std::sqrt(disc);
  return {s, s / (2.0 * c.r), std::atan(c.l / s)};
}

void require_domain(double x, const PhiCertificate& c) {
  if (!c.satisfied) throw InvalidArgument("phi certificate does not satisfy the range condition");
  if (!(x >= 0.0 && x <= c.K)) throw InvalidArgument("phi argument outside [0, K]");
}

}  // namespace

double phi_admissible_limit(double p, double eps) {
  const double root = std::sqrt(p / (1.0 + (p - 1.0) * eps - p * eps * eps));
  return 2.0 / std::sqrt(p) * std::sqrt((1.0 - eps) / (1.0 + p * eps)) *
         (std::numbers::pi / 2.0 + std::atan(root * eps));
}

PhiCertificate make_phi_certificate(double p, double eps, double K) {
  if (!(p > 1.0)) throw InvalidArgument("phi certificate requires p > 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("phi certificate requires eps in (0,1)");
  if (!(K > 0.0) || !std::isfinite(K)) throw InvalidArgument("phi certificate requires K > 0");
  PhiCertificate c;
  c.p = p;
  c.eps = eps;
  c.K = K;
  c.k = (p - 1.0) * (p - 1.0);
  c.l = -4.0 * (p - 1.0) * eps;
  c.m = 4.0 / p * (1.0 + (p - 1.0) * eps);
  c.r = 4.0 / p * (p - 1.0) * (1.0 - eps);
  c.satisfied = K < phi_admissible_limit(p, eps);
  return c;
}

double phi_tangent_argument(double x, const PhiCertificate& cert) {
  const ZetaShape s = shape(cert);
  return s.a * x + s.b;
}

double zeta(double x, const PhiCertificate& cert) {
  require_domain(x, cert);
  const ZetaShape s = shape(cert);
  // (disc_sqrt / 2m) * int_0^x tan(a s + b) ds, with the log-cosine antiderivative;
  // the prefactor disc_sqrt / (2m a) simplifies to r / m.
  const double integral = std::log(std::cos(s.b)) - std::log(std::cos(s.a * x + s.b));
  return -cert.l / (2.0 * cert.m) * x + cert.r / cert.m * integral;
}

double zeta_prime(double x, const PhiCertificate& cert) {
  require_domain(x, cert);
  const ZetaShape s = shape(cert);
  return -cert.l / (2.0 * cert.m) + s.disc_sqrt / (2.0 * cert.m) * std::tan(s.a * x + s.b);
}

double zeta_second(double x, const PhiCertificate& cert) {
  const double zp = zeta_prime(x, cert);
  return (cert.m * zp * zp + cert.l * zp + cert.k) / cert.r;
}

double phi(double x, const PhiCertificate& cert) { return std::exp(zeta(x, cert)); }

double phi_prime(double x, const PhiCertificate& cert) {
  return phi(x, cert) * zeta_prime(x, cert);
}

double phi_second(double x, const PhiCertificate& cert) {
  const double zp = zeta_prime(x, cert);
  return phi(x, cert) * (zeta_second(x, cert) + zp * zp);
}

PhiResiduals phi_residuals(const PhiCertificate& cert, int samples) {
  if (samples < 2) throw InvalidArgument("phi_residuals needs at least 2 samples");
  PhiResiduals res;
  res.min_phi = INFINITY;
  res.min_phi_prime = INFINITY;
  res.min_convexity = INFINITY;
  const double phi_k = phi(cert.K, cert);
  const double p = cert.p, eps = cert.eps;
  double prev = -INFINITY;
  for (int s = 0; s < samples; ++s) {
    const double x = s + 1 == samples ? cert.K : cert.K * s / (samples - 1);
    const double ph = phi(x, cert);
    const double zp = zeta_prime(x, cert);
    const double zpp = zeta_second(x, cert);
    const double convexity = (zpp + zp * zp) / p - zp;
    const double identity = std::fabs((p - 1.0) - 2.0 * zp) -
                            2.0 * std::sqrt((p - 1.0) * (1.0 - eps) * std::max(0.0, convexity));
    res.min_phi = std::min(res.min_phi, ph);
    res.max_phi_over_phiK = std::max(res.max_phi_over_phiK, ph / phi_k);
    res.min_phi_prime = std::min(res.min_phi_prime, zp);
    res.min_convexity = std::min(res.min_convexity, convexity);
    res.max_identity = std::max(res.max_identity, std::fabs(identity));
    if (ph < prev) res.monotone = false;
    prev = ph;
  }
  return res;
}

double boundedness_epsilon(double K, int n) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double half_n = n / 2.0;
  return (pi2 - half_n * K * K) / (2.0 * (pi2 + half_n * half_n * K * K));
}

CertificateReport boundedness_certificate(const ModelParams& params, const InitialData& data,
                                          int n) {
  if (n < 3) throw InvalidArgument("boundedness certificate requires n >= 3");
  params.validate();
  CertificateReport rep;
  rep.tau = params.tau;
  rep.n = n;
  rep.threshold = std::numbers::pi * std::sqrt(2.0 / n);
  const double ratio = params.alpha / params.beta;
  const double branch =
      std::max({ratio, ratio * linf_norm(data.w0), linf_norm(data.v0)});
  rep.K = params.tau * params.chi * branch;
  rep.margin = rep.K - rep.threshold;
  if (params.tau == 0) {
    rep.pass = true;
    return rep;
  }
  rep.pass = rep.K < rep.threshold;
  if (!rep.pass) return rep;

  const double eps = boundedness_epsilon(rep.K, n);
  rep.eps = eps;
  // Any p slightly above n/2 closes the argument; start at n/2 + 1/10 and move
  // closer to n/2 when K sits near the threshold.
  double offset = 0.1;
  PhiCertificate cert = make_phi_certificate(n / 2.0 + offset, eps, rep.K);
  for (int i = 0; i < 60 && !cert.satisfied; ++i) {
    offset *= 0.5;
    cert = make_phi_certificate(n / 2.0 + offset, eps, rep.K);
  }
  rep.certificate = cert;
  return rep;
}

}  // namespace chemotax

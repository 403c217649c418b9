#include <cmath>

#include "row_common.hpp"

namespace chemotax::kernels {
namespace {

using detail::grad_sq_at;
using detail::lap_at;
using detail::x_hi;
using detail::x_lo;

void laplacian_row(double* out, const StencilRows& r, std::size_t nx, const StencilCoeffs& k) {
  for (std::size_t i = 0; i < nx; ++i) out[i] = lap_at(r, i, x_lo(r.c, i, nx), x_hi(r.c, i, nx), k);
}

void helmholtz_row(double* out, const StencilRows& r, const double* diag, double scale,
                   std::size_t nx, const StencilCoeffs& k) {
  for (std::size_t i = 0; i < nx; ++i) {
    const double lap = lap_at(r, i, x_lo(r.c, i, nx), x_hi(r.c, i, nx), k);
    out[i] = diag[i] * r.c[i] - scale * lap;
  }
}

void gradient_sq_row(double* out, const StencilRows& r, std::size_t nx, const StencilCoeffs& k) {
  for (std::size_t i = 0; i < nx; ++i)
    out[i] = grad_sq_at(r, i, x_lo(r.c, i, nx), x_hi(r.c, i, nx), k);
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(double* y, const double* x, double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) s[l] += (w[i + l] * a[i + l]) * b[i + l];
  double total = detail::combine_lanes(s);
  for (; i < n; ++i) total += (w[i] * a[i]) * b[i];
  return total;
}

double weighted_sum(const double* a, const double* w, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) s[l] += w[i + l] * a[i + l];
  double total = detail::combine_lanes(s);
  for (; i < n; ++i) total += w[i] * a[i];
  return total;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(a[i])) return detail::kNaN;
    m = std::fmax(m, std::fabs(a[i]));
  }
  return m;
}

}  // namespace

namespace detail {
const KernelTable scalar_table{
    Isa::scalar,     "scalar", laplacian_row, helmholtz_row, gradient_sq_row, axpy, xpby,
    weighted_dot,    weighted_sum, max_abs,
};
}  // namespace detail

}  // namespace chemotax::kernels

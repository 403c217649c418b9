#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "chemotax/kernels.hpp"

// Per-node expressions shared by every kernel variant. SIMD variants use these
// for the two x-boundary nodes and the remainder, and mirror the same operation
// order in their vector bodies.
namespace chemotax::kernels::detail {

inline double lap_at(const StencilRows& r, std::size_t i, double xm, double xp,
                     const StencilCoeffs& k) {
  const double c2 = 2.0 * r.c[i];
  const double lx = ((xp + xm) - c2) * k.ihx2;
  const double ly = ((r.yhi[i] + r.ylo[i]) - c2) * k.ihy2;
  const double lz = ((r.zhi[i] + r.zlo[i]) - c2) * k.ihz2;
  return (lx + ly) + lz;
}

inline double grad_sq_at(const StencilRows& r, std::size_t i, double xm, double xp,
                         const StencilCoeffs& k) {
  const double gx = (xp - xm) * k.i2hx;
  const double gy = (r.yhi[i] - r.ylo[i]) * k.i2hy;
  const double gz = (r.zhi[i] - r.zlo[i]) * k.i2hz;
  return (gx * gx + gy * gy) + gz * gz;
}

// Neighbour values along x with ghost reflection at both ends.
inline double x_lo(const double* c, std::size_t i, std::size_t /*nx*/) {
  return i == 0 ? c[1] : c[i - 1];
}
inline double x_hi(const double* c, std::size_t i, std::size_t nx) {
  return i + 1 == nx ? c[nx - 2] : c[i + 1];
}

// Four interleaved partial sums combined as (s0 + s1) + (s2 + s3), then the
// remainder in index order. The AVX2 reductions use the same association.
inline double combine_lanes(const double s[4]) { return (s[0] + s[1]) + (s[2] + s[3]); }

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace chemotax::kernels::detail

#include <immintrin.h>

#include <algorithm>

#include "row_common.hpp"

namespace chemotax::kernels {
namespace {

using detail::grad_sq_at;
using detail::lap_at;

struct VecCoeffs {
  __m256d ihx2, ihy2, ihz2, i2hx, i2hy, i2hz;
  explicit VecCoeffs(const StencilCoeffs& k)
      : ihx2(_mm256_set1_pd(k.ihx2)),
        ihy2(_mm256_set1_pd(k.ihy2)),
        ihz2(_mm256_set1_pd(k.ihz2)),
        i2hx(_mm256_set1_pd(k.i2hx)),
        i2hy(_mm256_set1_pd(k.i2hy)),
        i2hz(_mm256_set1_pd(k.i2hz)) {}
};

inline __m256d lap4(const StencilRows& r, std::size_t i, const VecCoeffs& k) {
  const __m256d c = _mm256_loadu_pd(r.c + i);
  const __m256d c2 = _mm256_mul_pd(_mm256_set1_pd(2.0), c);
  const __m256d xm = _mm256_loadu_pd(r.c + i - 1);
  const __m256d xp = _mm256_loadu_pd(r.c + i + 1);
  const __m256d lx = _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(xp, xm), c2), k.ihx2);
  const __m256d ly = _mm256_mul_pd(
      _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(r.yhi + i), _mm256_loadu_pd(r.ylo + i)), c2),
      k.ihy2);
  const __m256d lz = _mm256_mul_pd(
      _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(r.zhi + i), _mm256_loadu_pd(r.zlo + i)), c2),
      k.ihz2);
  return _mm256_add_pd(_mm256_add_pd(lx, ly), lz);
}

void laplacian_row(double* out, const StencilRows& r, std::size_t nx, const StencilCoeffs& k) {
  const VecCoeffs vk(k);
  out[0] = lap_at(r, 0, r.c[1], r.c[1], k);
  std::size_t i = 1;
  for (; i + 4 <= nx - 1; i += 4) _mm256_storeu_pd(out + i, lap4(r, i, vk));
  for (; i < nx - 1; ++i) out[i] = lap_at(r, i, r.c[i - 1], r.c[i + 1], k);
  out[nx - 1] = lap_at(r, nx - 1, r.c[nx - 2], r.c[nx - 2], k);
}

void helmholtz_row(double* out, const StencilRows& r, const double* diag, double scale,
                   std::size_t nx, const StencilCoeffs& k) {
  const VecCoeffs vk(k);
  const __m256d s = _mm256_set1_pd(scale);
  auto tail = [&](std::size_t j, double xm, double xp) {
    out[j] = diag[j] * r.c[j] - scale * lap_at(r, j, xm, xp, k);
  };
  tail(0, r.c[1], r.c[1]);
  std::size_t i = 1;
  for (; i + 4 <= nx - 1; i += 4) {
    const __m256d dc = _mm256_mul_pd(_mm256_loadu_pd(diag + i), _mm256_loadu_pd(r.c + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(dc, _mm256_mul_pd(s, lap4(r, i, vk))));
  }
  for (; i < nx - 1; ++i) tail(i, r.c[i - 1], r.c[i + 1]);
  tail(nx - 1, r.c[nx - 2], r.c[nx - 2]);
}

void gradient_sq_row(double* out, const StencilRows& r, std::size_t nx, const StencilCoeffs& k) {
  const VecCoeffs vk(k);
  out[0] = grad_sq_at(r, 0, r.c[1], r.c[1], k);
  std::size_t i = 1;
  for (; i + 4 <= nx - 1; i += 4) {
    const __m256d gx =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(r.c + i + 1), _mm256_loadu_pd(r.c + i - 1)),
                      vk.i2hx);
    const __m256d gy =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(r.yhi + i), _mm256_loadu_pd(r.ylo + i)),
                      vk.i2hy);
    const __m256d gz =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(r.zhi + i), _mm256_loadu_pd(r.zlo + i)),
                      vk.i2hz);
    const __m256d s =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy)),
                      _mm256_mul_pd(gz, gz));
    _mm256_storeu_pd(out + i, s);
  }
  for (; i < nx - 1; ++i) out[i] = grad_sq_at(r, i, r.c[i - 1], r.c[i + 1], k);
  out[nx - 1] = grad_sq_at(r, nx - 1, r.c[nx - 2], r.c[nx - 2], k);
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpby(double* y, const double* x, double b, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), p));
  }
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

inline double reduce_lanes(__m256d acc) {
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  return detail::combine_lanes(s);
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wa, _mm256_loadu_pd(b + i)));
  }
  double total = reduce_lanes(acc);
  for (; i < n; ++i) total += (w[i] * a[i]) * b[i];
  return total;
}

double weighted_sum(const double* a, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i)));
  double total = reduce_lanes(acc);
  for (; i < n; ++i) total += w[i] * a[i];
  return total;
}

double max_abs(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  __m256d nan_mask = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(a + i);
    nan_mask = _mm256_or_pd(nan_mask, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, x));
  }
  if (_mm256_movemask_pd(nan_mask) != 0) return detail::kNaN;
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    if (std::isnan(a[i])) return detail::kNaN;
    result = std::fmax(result, std::fabs(a[i]));
  }
  return result;
}

}  // namespace

namespace detail {
const KernelTable avx2_table{
    Isa::avx2,    "avx2",       laplacian_row, helmholtz_row, gradient_sq_row, axpy, xpby,
    weighted_dot, weighted_sum, max_abs,
};
}  // namespace detail

}  // namespace chemotax::kernels

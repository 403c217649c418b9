#pragma once

// Row kernels behind the grid operators and the CG solver.
//
// Every kernel has a portable scalar reference and, where the target allows,
// an AVX2 variant. The variants evaluate the same expressions in the same
// order (reductions use four interleaved partial sums in both), so they agree
// bit for bit; tests/test_kernels.cpp checks this.

#include <cstddef>
#include <string_view>

namespace chemotax::kernels {

/// Pointers to the centre row and its four y/z neighbours. At a y or z face
/// the caller passes the reflected interior row (ghost reflection).
struct StencilRows {
  const double* c;
  const double* ylo;
  const double* yhi;
  const double* zlo;
  const double* zhi;
};

/// Inverse squared spacings (Laplacian) and inverse doubled spacings
/// (central first differences).
struct StencilCoeffs {
  double ihx2, ihy2, ihz2;
  double i2hx, i2hy, i2hz;
};

using LaplacianRowFn = void (*)(double* out, const StencilRows& rows, std::size_t nx,
                                const StencilCoeffs& k);
// out = diag * c - scale * lap(c)
using HelmholtzRowFn = void (*)(double* out, const StencilRows& rows, const double* diag,
                                double scale, std::size_t nx, const StencilCoeffs& k);
using GradientSqRowFn = void (*)(double* out, const StencilRows& rows, std::size_t nx,
                                 const StencilCoeffs& k);
// y += a * x
using AxpyFn = void (*)(double* y, double a, const double* x, std::size_t n);
// y = x + b * y
using XpbyFn = void (*)(double* y, const double* x, double b, std::size_t n);
// sum_i w[i] * a[i] * b[i]
using WeightedDotFn = double (*)(const double* a, const double* b, const double* w,
                                 std::size_t n);
// sum_i w[i] * a[i]
using WeightedSumFn = double (*)(const double* a, const double* w, std::size_t n);
// max_i |a[i]|, NaN if any entry is NaN
using MaxAbsFn = double (*)(const double* a, std::size_t n);

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  LaplacianRowFn laplacian_row;
  HelmholtzRowFn helmholtz_row;
  GradientSqRowFn gradient_sq_row;
  AxpyFn axpy;
  XpbyFn xpby;
  WeightedDotFn weighted_dot;
  WeightedSumFn weighted_sum;
  MaxAbsFn max_abs;
};

/// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

/// Table for a specific variant; throws InvalidArgument if unavailable.
const KernelTable& table(Isa isa);

/// Active table. Defaults to the widest available variant; the environment
/// variable CHEMOTAX_ISA=scalar|avx2 overrides the initial choice.
const KernelTable& active();

void select(Isa isa);

Isa parse_isa(std::string_view name);

namespace detail {
extern const KernelTable scalar_table;
#if defined(CHEMOTAX_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace chemotax::kernels

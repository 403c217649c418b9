#include "chemotax/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chemotax/error.hpp"
#include "chemotax/parallel.hpp"

namespace chemotax {

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.n[a] < 3)
      throw InvalidArgument("grid axis " + std::to_string(a) + " needs at least 3 nodes");
    if (!(spec.hi[a] > spec.lo[a]) || !std::isfinite(spec.hi[a] - spec.lo[a]))
      throw InvalidArgument("grid axis " + std::to_string(a) + " has a degenerate extent");
    h_[a] = (spec.hi[a] - spec.lo[a]) / static_cast<double>(spec.n[a] - 1);
    weights_[a].assign(spec.n[a], 1.0);
    weights_[a].front() = 0.5;
    weights_[a].back() = 0.5;
  }
  cell_volume_ = h_[0] * h_[1] * h_[2];
  size_ = spec.n[0] * spec.n[1] * spec.n[2];
  coeffs_ = kernels::StencilCoeffs{
      1.0 / (h_[0] * h_[0]), 1.0 / (h_[1] * h_[1]), 1.0 / (h_[2] * h_[2]),
      1.0 / (2.0 * h_[0]),   1.0 / (2.0 * h_[1]),   1.0 / (2.0 * h_[2]),
  };
}

double Grid::volume() const noexcept {
  return (spec_.hi[0] - spec_.lo[0]) * (spec_.hi[1] - spec_.lo[1]) * (spec_.hi[2] - spec_.lo[2]);
}

double Grid::coord(int axis, std::size_t i) const noexcept {
  const double len = spec_.hi[axis] - spec_.lo[axis];
  return spec_.lo[axis] + len * static_cast<double>(i) / static_cast<double>(spec_.n[axis] - 1);
}

Grid::RowNeighbours Grid::row_neighbours(std::size_t r) const noexcept {
  const std::size_t n0 = spec_.n[0], n1 = spec_.n[1], n2 = spec_.n[2];
  const std::size_t j = r % n1, k = r / n1;
  const std::size_t jlo = j == 0 ? 1 : j - 1;
  const std::size_t jhi = j + 1 == n1 ? n1 - 2 : j + 1;
  const std::size_t klo = k == 0 ? 1 : k - 1;
  const std::size_t khi = k + 1 == n2 ? n2 - 2 : k + 1;
  return {n0 * (j + n1 * k), n0 * (jlo + n1 * k), n0 * (jhi + n1 * k), n0 * (j + n1 * klo),
          n0 * (j + n1 * khi)};
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw InvalidArgument("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return m;
}

double ScalarField::max() const noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::max(m, v);
  return m;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
}

namespace {

// Row-wise reduction: one partial per row, combined by a fixed pairwise tree,
// so the result does not depend on how rows were split among threads.
template <class RowFn>
double reduce_rows(const Grid& g, RowFn&& row_value) {
  const std::size_t rows = g.rows();
  std::vector<double> partial(rows);
  const auto wy = g.weights(1);
  const auto wz = g.weights(2);
  const std::size_t n1 = g.n(1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r) {
    const std::size_t ur = static_cast<std::size_t>(r);
    const double factor = (wy[ur % n1] * wz[ur / n1]) * g.cell_volume();
    partial[ur] = row_value(ur) * factor;
  }
  return pairwise_sum(partial);
}

template <class RowKernel>
void stencil_rows(const ScalarField& f, ScalarField& out, RowKernel&& kernel) {
  const Grid& g = f.grid();
  const std::size_t rows = g.rows();
  const std::size_t nx = g.n(0);
  const double* base = f.data();
  double* dst = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r) {
    const auto nb = g.row_neighbours(static_cast<std::size_t>(r));
    const kernels::StencilRows sr{base + nb.c, base + nb.ylo, base + nb.yhi, base + nb.zlo,
                                  base + nb.zhi};
    kernel(dst + nb.c, sr, nx, nb.c);
  }
}

template <class Fn>
void elementwise(std::size_t n, Fn&& fn) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    fn(begin, std::min(kChunk, n - begin));
  }
}

}  // namespace

double integrate(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto& k = kernels::active();
  const double* wx = g.weights(0).data();
  const std::size_t nx = g.n(0);
  return reduce_rows(g, [&](std::size_t r) { return k.weighted_sum(f.data() + r * nx, wx, nx); });
}

double inner_product(const ScalarField& f, const ScalarField& h) {
  require_same_grid(f, h);
  const Grid& g = f.grid();
  const auto& k = kernels::active();
  const double* wx = g.weights(0).data();
  const std::size_t nx = g.n(0);
  return reduce_rows(g, [&](std::size_t r) {
    return k.weighted_dot(f.data() + r * nx, h.data() + r * nx, wx, nx);
  });
}

double linf_norm(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto& k = kernels::active();
  const std::size_t rows = g.rows(), nx = g.n(0);
  std::vector<double> row_max(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r)
    row_max[static_cast<std::size_t>(r)] = k.max_abs(f.data() + static_cast<std::size_t>(r) * nx, nx);
  double m = 0.0;
  for (double v : row_max) {
    if (std::isnan(v)) return v;
    m = std::max(m, v);
  }
  return m;
}

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
  ScalarField powed(f.grid_ptr());
  const double* src = f.data();
  double* dst = powed.data();
  elementwise(f.size(), [&](std::size_t b, std::size_t n) {
    for (std::size_t i = b; i < b + n; ++i) dst[i] = std::pow(std::fabs(src[i]), p);
  });
  return std::pow(integrate(powed), 1.0 / p);
}

void laplacian_into(const ScalarField& f, ScalarField& out) {
  require_same_grid(f, out);
  const auto& k = kernels::active();
  const auto& coeffs = f.grid().coeffs();
  stencil_rows(f, out, [&](double* dst, const kernels::StencilRows& sr, std::size_t nx,
                           std::size_t) { k.laplacian_row(dst, sr, nx, coeffs); });
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid_ptr());
  laplacian_into(f, out);
  return out;
}

void helmholtz_apply(const ScalarField& f, const ScalarField& diag, double scale,
                     ScalarField& out) {
  require_same_grid(f, diag);
  require_same_grid(f, out);
  const auto& k = kernels::active();
  const auto& coeffs = f.grid().coeffs();
  const double* d = diag.data();
  stencil_rows(f, out, [&](double* dst, const kernels::StencilRows& sr, std::size_t nx,
                           std::size_t offset) {
    k.helmholtz_row(dst, sr, d + offset, scale, nx, coeffs);
  });
}

ScalarField gradient_sq(const ScalarField& f) {
  ScalarField out(f.grid_ptr());
  const auto& k = kernels::active();
  const auto& coeffs = f.grid().coeffs();
  stencil_rows(f, out, [&](double* dst, const kernels::StencilRows& sr, std::size_t nx,
                           std::size_t) { k.gradient_sq_row(dst, sr, nx, coeffs); });
  return out;
}

void axpy(ScalarField& y, double a, const ScalarField& x) {
  const auto& k = kernels::active();
  double* yd = y.data();
  const double* xd = x.data();
  elementwise(y.size(), [&](std::size_t b, std::size_t n) { k.axpy(yd + b, a, xd + b, n); });
}

void xpby(ScalarField& y, const ScalarField& x, double b) {
  const auto& k = kernels::active();
  double* yd = y.data();
  const double* xd = x.data();
  elementwise(y.size(), [&](std::size_t s, std::size_t n) { k.xpby(yd + s, xd + s, b, n); });
}

}  // namespace chemotax

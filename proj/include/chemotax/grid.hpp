#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "chemotax/kernels.hpp"

namespace chemotax {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<std::size_t, 3>;

/// Axis-aligned box [lo, hi] sampled by n[0] x n[1] x n[2] nodes, boundary
/// nodes included.
struct GridSpec {
  Vec3 lo{};
  Vec3 hi{};
  Index3 n{};

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Validated node lattice with precomputed spacings and trapezoid weights.
///
/// Storage is lexicographic with x fastest: index = i + n0 * (j + n1 * k).
/// Neumann conditions are realised by ghost reflection, f[-1] = f[1] and
/// f[n] = f[n-2] on every axis.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t n(int axis) const noexcept { return spec_.n[axis]; }
  double h(int axis) const noexcept { return h_[axis]; }
  double cell_volume() const noexcept { return cell_volume_; }
  double volume() const noexcept;
  std::size_t size() const noexcept { return size_; }
  std::size_t rows() const noexcept { return spec_.n[1] * spec_.n[2]; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + spec_.n[0] * (j + spec_.n[1] * k);
  }
  /// Coordinate of node `i` along `axis`.
  double coord(int axis, std::size_t i) const noexcept;

  /// Trapezoid weight (1/2 at the two end nodes, 1 elsewhere) per axis.
  std::span<const double> weights(int axis) const noexcept { return weights_[axis]; }
  /// Trapezoid weight of node (i, j, k) times the cell volume.
  double node_weight(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return weights_[0][i] * weights_[1][j] * weights_[2][k] * cell_volume_;
  }

  const kernels::StencilCoeffs& coeffs() const noexcept { return coeffs_; }

  /// Offset of the first node of row r (r = j + n1 * k) and of the rows used
  /// as y/z neighbours of that row, with reflection at the faces.
  struct RowNeighbours {
    std::size_t c, ylo, yhi, zlo, zhi;
  };
  RowNeighbours row_neighbours(std::size_t r) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) { return a.spec_ == b.spec_; }

 private:
  GridSpec spec_;
  Vec3 h_{};
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
  std::array<std::vector<double>, 3> weights_;
  kernels::StencilCoeffs coeffs_{};
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates `spec` and builds the lattice. Throws InvalidArgument for
/// n[i] < 3 or hi[i] <= lo[i].
GridPtr make_grid(const GridSpec& spec);

/// Node-valued real field on a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& at(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return values_[grid_->index(i, j, k)];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return values_[grid_->index(i, j, k)];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  bool all_finite() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Builds a field from a function of the node coordinates.
template <class F>
ScalarField sample(const GridPtr& grid, F&& f) {
  ScalarField out(grid);
  for (std::size_t k = 0; k < grid->n(2); ++k)
    for (std::size_t j = 0; j < grid->n(1); ++j)
      for (std::size_t i = 0; i < grid->n(0); ++i)
        out.at(i, j, k) = f(grid->coord(0, i), grid->coord(1, j), grid->coord(2, k));
  return out;
}

/// Throws InvalidArgument unless both fields live on equal grids.
void require_same_grid(const ScalarField& a, const ScalarField& b);

/// Composite trapezoid rule. A non-finite input gives a non-finite result.
double integrate(const ScalarField& f);

/// Trapezoid-weighted inner product sum_i w_i f_i g_i (discrete L2).
double inner_product(const ScalarField& f, const ScalarField& g);

/// max |f|; NaN when any node is NaN.
double linf_norm(const ScalarField& f);

/// (integrate |f|^p)^(1/p); throws InvalidArgument for p < 1.
double lp_norm(const ScalarField& f, double p);

/// 7-point Laplacian with ghost reflection.
ScalarField laplacian(const ScalarField& f);
void laplacian_into(const ScalarField& f, ScalarField& out);

/// out = diag * f - scale * laplacian(f), without forming the Laplacian.
void helmholtz_apply(const ScalarField& f, const ScalarField& diag, double scale,
                     ScalarField& out);

/// Squared central-difference gradient; the normal component vanishes on
/// boundary nodes.
ScalarField gradient_sq(const ScalarField& f);

/// y += a * x
void axpy(ScalarField& y, double a, const ScalarField& x);
/// y = x + b * y
void xpby(ScalarField& y, const ScalarField& x, double b);

}  // namespace chemotax

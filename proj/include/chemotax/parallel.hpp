#pragma once

#include <cstddef>
#include <span>

namespace chemotax {

/// Number of worker threads used by stencil and reduction loops.
/// Results never depend on this value.
void set_num_threads(int n);
int num_threads();

/// Sums `values` with a fixed pairwise tree. The order depends only on the
/// length, so the result is reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

}  // namespace chemotax

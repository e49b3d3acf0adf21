#pragma once

#include <cstddef>

namespace lutbench::detail {

/// out[j] = exp(-0.5 * |q - x_j|^2) for the n columns of xt, which holds the
/// points transposed (dims rows of length n). Built with vector math so that
/// the exponentials run on SIMD lanes; every caller uses this one routine.
void se_kernel_row(const double* q, const double* xt, std::size_t dims, std::size_t n, double* out);

}  // namespace lutbench::detail

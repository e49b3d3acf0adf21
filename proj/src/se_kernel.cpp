#include "se_kernel.hpp"

#include <cmath>

namespace lutbench::detail {

void se_kernel_row(const double* q, const double* xt, std::size_t dims, std::size_t n, double* out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
        const double qd = q[d];
        const double* col = xt + d * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double e = qd - col[j];
            out[j] += e * e;
        }
    }
#pragma omp simd
    for (std::size_t j = 0; j < n; ++j) out[j] = std::exp(-0.5 * out[j]);
}

}  // namespace lutbench::detail

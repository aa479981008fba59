#include "vintage/kernels.hpp"

#include <algorithm>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vintage::kernels {

namespace {

using Index = std::ptrdiff_t;

// Minimum number of characteristic lines before a parallel region pays off.
constexpr Index kParallelLines = 512;
// Characteristic lines per work item of the parallel kernels.
constexpr Index kBlockLines = 256;

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void forward_serial(std::span<const double> controls, const StepCoefficients& c,
                    std::size_t n_cells, std::size_t steps, std::span<double> states) {
    const std::size_t stride = n_cells + 1;
    for (std::size_t k = 0; k < steps; ++k) {
        const double* row = controls.data() + k * stride;
        mild_step(states.subspan(k * n_cells, n_cells), row[0], {row + 1, n_cells}, c,
                  states.subspan((k + 1) * n_cells, n_cells));
    }
}

void forward_parallel(std::span<const double> controls, const StepCoefficients& c,
                      std::size_t n_cells, std::size_t steps, std::span<double> states) {
    const Index n = static_cast<Index>(n_cells);
    const Index big_n = static_cast<Index>(steps);
    const Index stride = n + 1;
    const Index first = -(n - 1);
    const Index blocks = (big_n - first + kBlockLines) / kBlockLines;
    const double* u = controls.data();
    double* y = states.data();

    // line d holds cells (k, k - d); a block of adjacent lines is swept row by row so that
    // every row segment is contiguous in memory
#pragma omp parallel for schedule(dynamic, 1) if (big_n + n > kParallelLines)
    for (Index b = 0; b < blocks; ++b) {
        const Index d_lo = first + b * kBlockLines;
        const Index d_hi = std::min(d_lo + kBlockLines, big_n + 1);
        const Index k_end = std::min(big_n, d_hi - 1 + n - 1);
        for (Index k = std::max<Index>(1, d_lo); k <= k_end; ++k) {
            const Index j_lo = std::max<Index>(0, k - (d_hi - 1));
            const Index j_hi = std::min(n - 1, k - d_lo);
            const double* prev = y + (k - 1) * n;
            const double* row = u + (k - 1) * stride;
            double* cur = y + k * n;
            Index j = j_lo;
            if (j == 0) {
                cur[0] = c.inflow * row[0] + c.kappa_half * row[1];
                ++j;
            }
            for (; j <= j_hi; ++j) cur[j] = c.decay * prev[j - 1] + c.kappa * row[j];
        }
    }
}

void adjoint_serial(std::span<const double> weight, std::span<const double> alpha, double decay,
                    std::size_t n_cells, std::size_t steps, std::span<double> duals) {
    const std::size_t n = n_cells;
    for (std::size_t k = steps; k-- > 0;) {
        const double* next = duals.data() + (k + 1) * n;
        double* cur = duals.data() + k * n;
        const double w = weight[k];
        for (std::size_t j = 0; j + 1 < n; ++j) cur[j] = decay * next[j + 1] + w * alpha[j];
        cur[n - 1] = w * alpha[n - 1];
    }
}

void adjoint_parallel(std::span<const double> weight, std::span<const double> alpha,
                      double decay, std::size_t n_cells, std::size_t steps,
                      std::span<double> duals) {
    const Index n = static_cast<Index>(n_cells);
    const Index big_n = static_cast<Index>(steps);
    const Index first = -big_n;
    const Index blocks = (n - 1 - first + kBlockLines) / kBlockLines;
    double* p = duals.data();
    const double* w = weight.data();
    const double* a = alpha.data();

    // line e holds cells (k, k + e), swept from late to early times in blocks of lines
#pragma omp parallel for schedule(dynamic, 1) if (big_n + n > kParallelLines)
    for (Index b = 0; b < blocks; ++b) {
        const Index e_lo = first + b * kBlockLines;
        const Index e_hi = std::min(e_lo + kBlockLines, n);
        for (Index k = std::min(big_n - 1, n - 1 - e_lo); k >= std::max<Index>(0, -(e_hi - 1)); --k) {
            const Index j_lo = std::max<Index>(0, k + e_lo);
            const Index j_hi = std::min(n - 1, k + e_hi - 1);
            const double* next = p + (k + 1) * n;
            double* cur = p + k * n;
            const double wk = w[k];
            Index j = j_lo;
            for (; j <= j_hi && j < n - 1; ++j) cur[j] = decay * next[j + 1] + wk * a[j];
            if (j == n - 1 && j <= j_hi) cur[n - 1] = wk * a[n - 1];
        }
    }
}

void output_series(std::span<const double> states, std::span<const double> alpha, double ds,
                   std::size_t n_cells, std::span<double> q) {
    const Index count = static_cast<Index>(q.size());
#pragma omp parallel for schedule(static) if (count > kParallelLines)
    for (Index k = 0; k < count; ++k)
        q[k] = output_Q(states.subspan(static_cast<std::size_t>(k) * n_cells, n_cells), alpha, ds);
}

}  // namespace vintage::kernels

#pragma once

// Whole-trajectory propagation kernels.
//
// With dt = ds every age cell moves exactly one cell per step, so the state at
// (k, j) depends only on cells of the same characteristic line k - j. Lines are
// independent recurrences; the parallel kernels distribute lines over OpenMP
// threads while the serial kernels step through time. Both evaluate the same
// floating-point expressions in the same order per cell, so results agree
// bit for bit regardless of thread count.

#include <span>

#include "vintage/transport.hpp"

namespace vintage::kernels {

/// Fills states 1..N of out from state 0 (already set) and the path rows
/// [u0, u1_0, ..., u1_{n-1}] laid out with stride n + 1.
void forward_serial(std::span<const double> controls, const StepCoefficients& c,
                    std::size_t n_cells, std::size_t steps, std::span<double> states);
void forward_parallel(std::span<const double> controls, const StepCoefficients& c,
                      std::size_t n_cells, std::size_t steps, std::span<double> states);

/// Backward recursion p_k = decay * shift_left(p_{k+1}) + weight_k * alpha, with
/// p_N (row N of duals) already set. weight has length N.
void adjoint_serial(std::span<const double> weight, std::span<const double> alpha, double decay,
                    std::size_t n_cells, std::size_t steps, std::span<double> duals);
void adjoint_parallel(std::span<const double> weight, std::span<const double> alpha,
                      double decay, std::size_t n_cells, std::size_t steps,
                      std::span<double> duals);

/// Q_k = ds * sum_j alpha_j y_{k,j} for every stored state.
void output_series(std::span<const double> states, std::span<const double> alpha, double ds,
                   std::size_t n_cells, std::span<double> q);

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

}  // namespace vintage::kernels

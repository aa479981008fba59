#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vintage/costs.hpp"

namespace vintage {

/// Quadratic value function 1/2 <P x, x>_H + <r, x>_H + c of an LQ instance, with
/// P and r acting in the ds-weighted inner product (the gradient is P x + r).
struct RiccatiSolution {
    Eigen::MatrixXd P;
    Eigen::VectorXd r;
    double c = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    double ds = 0.0;

    double value(std::span<const double> x) const;
    VElement gradient(std::span<const double> x) const;
};

/// Solves A^T P + P A - lambda P - P G P + Q = 0 for the age-discretized LQ problem with
/// Newton-Kleinman iterations from P = 0.
/// Throws NotLQ for non-quadratic data and NewtonDivergence when the iteration stalls.
RiccatiSolution riccati_solve(const VintageModel& model);

/// Frobenius norm of the Riccati residual at an H-form P.
double riccati_residual(const VintageModel& model, const Eigen::MatrixXd& P);

/// P + delta * E with E = G G^T / n for a seeded standard normal G.
RiccatiSolution perturb_riccati(const RiccatiSolution& sol, double delta, std::uint64_t seed);

using ValueFn = std::function<double(std::span<const double>)>;
using GradFn = std::function<VElement(std::span<const double>)>;

/// Upwind generator: -(x_j - x_{j-1}) / ds - mu x_j, with x(0) = 0 at the inflow face.
std::vector<double> upwind_generator(std::span<const double> x, double mu, double ds);

/// -lambda psi(x) + <psi'(x), A x> - h0*(-B* psi'(x)) + g0(x).
/// Throws NotInDomain if the extrapolated boundary value of x is not ~0.
double hjb_residual(std::span<const double> x, const ValueFn& value_fn, const GradFn& grad_fn,
                    const VintageModel& model);

/// s sin(k pi s / s_max), k = 1..4, and two smoothed bumps, each adjusted in the first
/// cell so that its linear extrapolation to s = 0 vanishes.
std::vector<CapitalState> hjb_test_states(const AgeGrid& grid);

/// JSON dump of P, r, c with an FNV-1a checksum over the raw doubles.
void write_riccati_json(std::ostream& os, const RiccatiSolution& sol);
std::string riccati_checksum(const RiccatiSolution& sol);

}  // namespace vintage

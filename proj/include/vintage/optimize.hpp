#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vintage/costs.hpp"
#include "vintage/transport.hpp"

namespace vintage {

/// Discrete costate p(tau_k) = dJ/dy_k as H-representers, discount included.
/// Row k has the same time as state k of the trajectory it was built from.
class Costate {
public:
    Costate() = default;
    Costate(AgeGrid grid, double t_start, double dt, std::size_t steps);

    const AgeGrid& grid() const { return grid_; }
    double t_start() const { return t_start_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    double time(std::size_t k) const { return t_start_ + static_cast<double>(k) * dt_; }

    std::span<double> dual(std::size_t k) { return {data_.data() + k * grid_.size(), grid_.size()}; }
    std::span<const double> dual(std::size_t k) const {
        return {data_.data() + k * grid_.size(), grid_.size()};
    }
    /// Dual at step k with its boundary trace attached.
    VElement at(std::size_t k) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    AgeGrid grid_;
    double t_start_ = 0.0;
    double dt_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<double> data_;
};

struct SolveReport {
    double value = 0.0;
    std::size_t iterations = 0;
    double prox_grad_norm = 0.0;
    double epsilon = 0.0;
    double wall_time = 0.0;
    bool converged = false;  // false signals MaxIterExceeded: best iterate returned
    double step = 0.0;
};

struct IterateRecord {
    std::size_t iteration;
    double objective;
    double prox_grad_norm;
};

struct SolverOptions {
    double tol = 1e-8;
    std::size_t max_iter = 5000;
    double t_start = 0.0;
    std::optional<ControlPath> warm_start;
    /// Initial step; 0 requests a power-iteration estimate of the curvature.
    double initial_step = 0.0;
    bool record_history = false;
};

struct FiniteHorizonSolution {
    ControlPath control;
    Trajectory trajectory;
    Costate costate;
    SolveReport report;
    std::vector<IterateRecord> history;
};

/// Number of steps of a grid-aligned duration; throws GridError otherwise.
std::size_t aligned_steps(double duration, double dt);

/// Discrete discounted cost sum_k e^{-lambda tau_k} dt [g0(y_k) + h0(u_k)] + e^{-lambda T} phi0(y_N).
/// Throws InfeasibleControl when some h0(u_k) is +inf.
double evaluate_objective(const ControlPath& u, const Trajectory& traj, const VintageModel& model);

/// Running part of evaluate_objective over the first `steps` steps (no terminal term).
double running_cost(const ControlPath& u, const Trajectory& traj, const VintageModel& model,
                    std::size_t steps);

/// Backward recursion dual to the forward step, terminal p(T) = e^{-lambda T} phi0'(y(T)).
Costate solve_adjoint(const Trajectory& traj, const VintageModel& model, double T);

/// U-representer of dJ/du_k per step:
/// dt e^{-lambda tau_k} h0'(u_k) + (transposed control injection applied to p(tau_{k+1})).
ControlPath objective_gradient(const ControlPath& u, const Trajectory& traj, const Costate& costate,
                               const VintageModel& model);

/// sum_k <a_k, b_k>_U ; the pairing under which objective_gradient is the derivative.
double path_pairing(const ControlPath& a, const ControlPath& b, double ds);

/// Accelerated projected gradient on [t_start, t_start + T] in the discount-weighted metric.
/// Throws NonFiniteObjective on breakdown.
FiniteHorizonSolution solve_finite_horizon(const CapitalState& x, double T,
                                           const VintageModel& model,
                                           const SolverOptions& options = {});

/// Psi(t, x) = optimal discounted cost on [0, t] with terminal weight e^{-lambda t} phi0.
double value_finite(const CapitalState& x, double t, const VintageModel& model, double tol = 1e-9);

/// |Psi_{T1}(t, x) - Psi_{T2}(t, x)| for T1 = t and T2 = 2t, the second solved on [t, 2t]
/// and rescaled by e^{lambda t}.
double t_independence_residual(const CapitalState& x, double t, const VintageModel& model,
                               double tol = 1e-10);

/// ||u||_{L^p_lambda} / (1 + |x|^2) under 8.a, / (1 + |x|) otherwise.
double control_growth_ratio(const ControlPath& u, const CapitalState& x, const VintageModel& model);
double growth_denominator(double x_norm, const VintageModel& model);

void write_history_csv(std::ostream& os, const std::vector<IterateRecord>& history);

}  // namespace vintage

#include "vintage/optimize.hpp"

#include <algorithm>
#include <utility>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "vintage/kernels.hpp"

namespace vintage {

Costate::Costate(AgeGrid grid, double t_start, double dt, std::size_t steps)
    : grid_(grid), t_start_(t_start), dt_(dt), steps_(steps),
      data_((steps + 1) * grid.size(), 0.0) {}

VElement Costate::at(std::size_t k) const {
    auto d = dual(k);
    return VElement::with_trace(std::vector<double>(d.begin(), d.end()));
}

std::size_t aligned_steps(double duration, double dt) {
    const double cells = duration / dt;
    const double whole = std::round(cells);
    if (duration < 0.0 || std::abs(cells - whole) > 1e-9 * std::max(1.0, cells))
        throw GridError("duration is not a multiple of the time step");
    return static_cast<std::size_t>(whole);
}

namespace {

std::vector<double> output_path(const Trajectory& traj, const VintageModel& model) {
    std::vector<double> q(traj.steps() + 1);
    kernels::output_series(traj.data(), model.alpha(), model.ds(), model.n_cells(), q);
    return q;
}

double discount(const VintageModel& model, double tau) { return std::exp(-model.lambda() * tau); }

// Adds the transposed control injection of p(tau_{k+1}) into row k of grad.
void add_injection_adjoint(const Costate& costate, const StepCoefficients& c, double ds,
                           ControlPath& grad) {
    const std::size_t n = grad.n_cells();
    for (std::size_t k = 0; k < grad.steps(); ++k) {
        auto p = costate.dual(k + 1);
        auto row = grad.row(k);
        row[0] += ds * c.inflow * p[0];
        row[1] += c.kappa_half * p[0];
        for (std::size_t j = 0; j + 1 < n; ++j) row[1 + j] += c.kappa * p[j + 1];
    }
}

// Costate driven by per-step source weights along alpha and a terminal dual.
void run_adjoint(const Trajectory& traj, const VintageModel& model, std::span<const double> weights,
                 std::span<const double> terminal, Costate& costate) {
    if (!(costate.grid() == traj.grid()) || costate.steps() != traj.steps() ||
        costate.t_start() != traj.t_start())
        costate = Costate(traj.grid(), traj.t_start(), traj.dt(), traj.steps());
    std::copy(terminal.begin(), terminal.end(), costate.dual(traj.steps()).begin());
    kernels::adjoint_parallel(weights, model.alpha(), StepCoefficients::make(model).decay,
                              model.n_cells(), traj.steps(), costate.data());
}

Costate run_adjoint(const Trajectory& traj, const VintageModel& model,
                    std::span<const double> weights, std::span<const double> terminal) {
    Costate costate;
    run_adjoint(traj, model, weights, terminal, costate);
    return costate;
}

void fill_adjoint(const Trajectory& traj, const VintageModel& model, Costate& costate) {
    const auto q = output_path(traj, model);
    std::vector<double> weights(traj.steps());
    for (std::size_t k = 0; k < traj.steps(); ++k)
        weights[k] = traj.dt() * discount(model, traj.time(k)) * -model.revenue().slope(q[k]);
    auto terminal = phi0_grad(traj.state(traj.steps()), model);
    for (double& v : terminal) v *= discount(model, traj.time(traj.steps()));
    run_adjoint(traj, model, weights, terminal, costate);
}

// e^{-lambda tau_k} dt for every step of a path.
std::vector<double> step_weights(const VintageModel& model, double t_start, std::size_t steps) {
    std::vector<double> w(steps);
    for (std::size_t k = 0; k < steps; ++k)
        w[k] = discount(model, t_start + static_cast<double>(k) * model.dt()) * model.dt();
    return w;
}

// h0' part plus the transposed injection of p(tau_{k+1}), in one pass per row.
void gradient_into(const ControlPath& u, const Costate& costate, std::span<const double> weights,
                   const VintageModel& model, ControlPath& grad) {
    const auto& cost = model.cost();
    const auto c = StepCoefficients::make(model);
    const std::size_t n = u.n_cells();
    for (std::size_t k = 0; k < u.steps(); ++k) {
        auto in = u.row(k);
        auto out = grad.row(k);
        auto p = costate.dual(k + 1);
        const double w1 = weights[k] * cost.c1.w;
        out[0] = weights[k] * cost.c0.w * in[0] + model.ds() * c.inflow * p[0];
        out[1] = w1 * in[1] + c.kappa_half * p[0] + c.kappa * p[1];
        for (std::size_t j = 1; j + 1 < n; ++j) out[1 + j] = w1 * in[1 + j] + c.kappa * p[j + 1];
        out[n] = w1 * in[n];
    }
}

struct StepMeasures {
    double pairing = 0.0;  // <grad, z - y>
    double dist2 = 0.0;    // |z - y|^2 in the metric
};

// z = proj(y - step * metric gradient), fused with the measures of z - y.
StepMeasures proximal_step(const ControlPath& y, const ControlPath& grad, std::span<const double> weights,
                           double step, const CostSpec& cost, double ds, ControlPath& z) {
    StepMeasures out;
    for (std::size_t k = 0; k < y.steps(); ++k) {
        auto yr = y.row(k);
        auto gr = grad.row(k);
        auto zr = z.row(k);
        const double scale = step / weights[k];
        zr[0] = cost.c0.project(yr[0] - scale * gr[0]);
        const double d0 = zr[0] - yr[0];
        double pair = 0.0, sq = 0.0;
        for (std::size_t j = 1; j < yr.size(); ++j) {
            zr[j] = cost.c1.project(yr[j] - scale * gr[j]);
            const double d = zr[j] - yr[j];
            pair += gr[j] * d;
            sq += d * d;
        }
        out.pairing += gr[0] * d0 + ds * pair;
        out.dist2 += weights[k] * (d0 * d0 + ds * sq);
    }
    return out;
}

// y = proj(u + beta (u - u_prev))
void extrapolate(const ControlPath& u, const ControlPath& u_prev, double beta, const CostSpec& cost,
                 ControlPath& y) {
    const std::size_t stride = u.stride();
    const auto& a = u.data();
    const auto& b = u_prev.data();
    auto& out = y.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double v = a[i] + beta * (a[i] - b[i]);
        out[i] = i % stride == 0 ? cost.c0.project(v) : cost.c1.project(v);
    }
}

// Squared norm in the discount-weighted metric sum_k e^{-lambda tau_k} dt |v_k|_U^2.
double metric_norm2(const ControlPath& v, const VintageModel& model) {
    double acc = 0.0;
    for (std::size_t k = 0; k < v.steps(); ++k) {
        auto row = v.row(k);
        double sq = row[0] * row[0];
        double cells = 0.0;
        for (std::size_t j = 1; j < row.size(); ++j) cells += row[j] * row[j];
        sq += model.ds() * cells;
        acc += discount(model, v.time(k)) * v.dt() * sq;
    }
    return acc;
}

// Converts a U-representer gradient to the metric gradient: rows scaled by e^{lambda tau_k} / dt.
void precondition(ControlPath& g, const VintageModel& model) {
    for (std::size_t k = 0; k < g.steps(); ++k) {
        const double scale = 1.0 / (discount(model, g.time(k)) * g.dt());
        for (double& v : g.row(k)) v *= scale;
    }
}

void project(ControlPath& u, const CostSpec& cost) {
    if (!cost.boxed()) return;
    for (std::size_t k = 0; k < u.steps(); ++k) {
        auto row = u.row(k);
        row[0] = cost.c0.project(row[0]);
        for (std::size_t j = 1; j < row.size(); ++j) row[j] = cost.c1.project(row[j]);
    }
}

// Largest eigenvalue of the state-cost curvature in the metric, by power iteration on
// Gauss-Newton products with R'' replaced by its bound.
double curvature_estimate(const VintageModel& model, double t_start, std::size_t steps) {
    const double beta = model.revenue().max_curvature();
    const double term_w =
        model.terminal().kind == TerminalSpec::Kind::OutputQuadratic ? model.terminal().weight : 0.0;
    if (beta == 0.0 && term_w == 0.0) return 0.0;
    const auto c = StepCoefficients::make(model);
    const CapitalState zero = CapitalState::zeros(model.grid());
    ControlPath d(t_start, model.dt(), steps, model.n_cells());
    std::fill(d.data().begin(), d.data().end(), 1.0);
    double estimate = 0.0;
    for (int it = 0; it < 12; ++it) {
        const double nrm = std::sqrt(metric_norm2(d, model));
        if (nrm == 0.0) break;
        for (double& v : d.data()) v /= nrm;
        Trajectory dy = solve_forward(zero, d, model);
        const auto dq = output_path(dy, model);
        std::vector<double> weights(steps);
        for (std::size_t k = 0; k < steps; ++k)
            weights[k] = model.dt() * discount(model, dy.time(k)) * beta * dq[k];
        std::vector<double> terminal(model.n_cells());
        for (std::size_t j = 0; j < terminal.size(); ++j)
            terminal[j] = discount(model, dy.time(steps)) * term_w * dq[steps] * model.alpha()[j];
        Costate costate = run_adjoint(dy, model, weights, terminal);
        ControlPath hd(t_start, model.dt(), steps, model.n_cells());
        add_injection_adjoint(costate, c, model.ds(), hd);
        estimate = path_pairing(hd, d, model.ds());
        precondition(hd, model);
        d = std::move(hd);
    }
    return estimate;
}

}  // namespace

double running_cost(const ControlPath& u, const Trajectory& traj, const VintageModel& model,
                    std::size_t steps) {
    const auto pair = make_conjugate(model);
    const auto q = output_path(traj, model);
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const auto h = pair.h0(u.row(k));
        if (!h.feasible) throw InfeasibleControl("control leaves the domain of h0");
        acc += discount(model, traj.time(k)) * traj.dt() * (-model.revenue().value(q[k]) + h.value);
    }
    return acc;
}

double evaluate_objective(const ControlPath& u, const Trajectory& traj, const VintageModel& model) {
    const std::size_t n_steps = traj.steps();
    return running_cost(u, traj, model, n_steps) +
           discount(model, traj.time(n_steps)) * phi0_eval(traj.state(n_steps), model);
}

Costate solve_adjoint(const Trajectory& traj, const VintageModel& model, double T) {
    if (!(traj.grid() == model.grid())) throw GridError("trajectory is not on the model grid");
    if (std::abs(traj.time(traj.steps()) - T) > 1e-9 * std::max(1.0, std::abs(T)))
        throw GridError("terminal time does not match the trajectory");
    Costate costate;
    fill_adjoint(traj, model, costate);
    return costate;
}

ControlPath objective_gradient(const ControlPath& u, const Trajectory& traj, const Costate& costate,
                               const VintageModel& model) {
    if (costate.steps() != u.steps() || traj.steps() != u.steps())
        throw GridError("control, trajectory and costate lengths differ");
    ControlPath grad(u.t_start(), u.dt(), u.steps(), u.n_cells());
    gradient_into(u, costate, step_weights(model, u.t_start(), u.steps()), model, grad);
    return grad;
}

double path_pairing(const ControlPath& a, const ControlPath& b, double ds) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.steps(); ++k) {
        auto ra = a.row(k);
        auto rb = b.row(k);
        double cells = 0.0;
        for (std::size_t j = 1; j < ra.size(); ++j) cells += ra[j] * rb[j];
        acc += ra[0] * rb[0] + ds * cells;
    }
    return acc;
}

FiniteHorizonSolution solve_finite_horizon(const CapitalState& x, double T,
                                           const VintageModel& model,
                                           const SolverOptions& options) {
    if (!(options.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t steps = aligned_steps(T, model.dt());
    const double t0 = options.t_start;
    const double t_end = t0 + static_cast<double>(steps) * model.dt();
    const double m = make_conjugate(model).strong_convexity();

    FiniteHorizonSolution sol;
    sol.control = ControlPath(t0, model.dt(), steps, model.n_cells());
    if (options.warm_start && options.warm_start->steps() == steps)
        sol.control.data() = options.warm_start->data();
    project(sol.control, model.cost());

    auto objective_at = [&](const ControlPath& u, Trajectory& traj) {
        solve_forward_into(x, u, model, traj);
        const double f = evaluate_objective(u, traj, model);
        if (!std::isfinite(f)) throw NonFiniteObjective("objective is not finite");
        return f;
    };

    double f_u = objective_at(sol.control, sol.trajectory);
    double step = options.initial_step;
    if (!(step > 0.0)) {
        const double w_max = std::max(model.cost().c0.w, model.cost().c1.w);
        step = 1.0 / (w_max + 1.1 * curvature_estimate(model, t0, steps));
    }

    if (steps == 0) {
        sol.costate = solve_adjoint(sol.trajectory, model, t_end);
        sol.report = SolveReport{f_u, 0, 0.0, 0.0, 0.0, true, step};
        return sol;
    }

    const auto weights = step_weights(model, t0, steps);
    const auto& cost = model.cost();
    ControlPath y = sol.control;
    ControlPath u_prev = sol.control;
    ControlPath z = sol.control;
    ControlPath grad = sol.control;
    Trajectory traj_y = sol.trajectory;
    Trajectory traj_z = sol.trajectory;
    Costate costate;
    double f_y = f_u;
    double momentum = 1.0;
    double g_norm = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool at_iterate = true;  // y equals the current iterate
    std::size_t it = 0;

    for (; it < options.max_iter; ++it) {
        fill_adjoint(traj_y, model, costate);
        gradient_into(y, costate, weights, model, grad);

        StepMeasures measures;
        double f_z = 0.0;
        bool accepted_step = false;
        for (int bt = 0; bt < 60; ++bt) {
            measures = proximal_step(y, grad, weights, step, cost, model.ds(), z);
            f_z = objective_at(z, traj_z);
            const double model_f = f_y + measures.pairing + measures.dist2 / (2.0 * step);
            // below this slack the comparison is rounding noise
            if (f_z <= model_f + 1e-13 * (1.0 + std::abs(f_y))) {
                accepted_step = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted_step) break;
        g_norm = std::sqrt(measures.dist2) / step;

        // monotone variant: a momentum step that raises the objective restarts from the
        // last iterate; the plain projected step taken next is always accepted
        if (!at_iterate && f_z > f_u + 1e-13 * (1.0 + std::abs(f_u))) {
            momentum = 1.0;
            y = sol.control;
            traj_y = sol.trajectory;
            f_y = f_u;
            at_iterate = true;
            continue;
        }
        std::swap(u_prev, sol.control);
        std::swap(sol.control, z);
        std::swap(sol.trajectory, traj_z);
        f_u = f_z;
        if (options.record_history) sol.history.push_back({it, f_u, g_norm});
        if (g_norm <= options.tol * (1.0 + std::abs(f_u))) {
            converged = true;
            ++it;
            break;
        }
        const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next;
        momentum = next;
        at_iterate = beta == 0.0;
        if (at_iterate) {
            y = sol.control;
            traj_y = sol.trajectory;
            f_y = f_u;
        } else {
            extrapolate(sol.control, u_prev, beta, cost, y);
            f_y = objective_at(y, traj_y);
        }
    }

    sol.costate = solve_adjoint(sol.trajectory, model, t_end);
    sol.report.value = f_u;
    sol.report.iterations = it;
    sol.report.prox_grad_norm = g_norm;
    sol.report.epsilon = std::isfinite(g_norm) ? g_norm * g_norm / (2.0 * m) : 0.0;
    sol.report.converged = converged;
    sol.report.step = step;
    sol.report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

double value_finite(const CapitalState& x, double t, const VintageModel& model, double tol) {
    if (aligned_steps(t, model.dt()) == 0) return phi0_eval(x.values, model);
    SolverOptions opts;
    opts.tol = tol;
    return solve_finite_horizon(x, t, model, opts).report.value;
}

double t_independence_residual(const CapitalState& x, double t, const VintageModel& model,
                               double tol) {
    SolverOptions opts;
    opts.tol = tol;
    const double direct = solve_finite_horizon(x, t, model, opts).report.value;
    opts.t_start = t;
    const double embedded =
        std::exp(model.lambda() * t) * solve_finite_horizon(x, t, model, opts).report.value;
    return std::abs(direct - embedded);
}

double growth_denominator(double x_norm, const VintageModel& model) {
    return model.regime() == Regime::SublinearRevenue ? 1.0 + x_norm : 1.0 + x_norm * x_norm;
}

double control_growth_ratio(const ControlPath& u, const CapitalState& x, const VintageModel& model) {
    return u.weighted_norm(model.lambda(), model.p(), model.ds()) /
           growth_denominator(x.h_norm(), model);
}

void write_history_csv(std::ostream& os, const std::vector<IterateRecord>& history) {
    os << "iteration,objective,prox_grad_norm\n" << std::setprecision(17);
    for (const auto& r : history) os << r.iteration << ',' << r.objective << ',' << r.prox_grad_norm << '\n';
}

}  // namespace vintage

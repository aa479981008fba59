#include "vintage/value.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace vintage {

namespace {

double snap(double t, double dt) { return std::max(1.0, std::round(t / dt)) * dt; }

}  // namespace

ValueProbe psi_infinity(const CapitalState& x, const VintageModel& model, const ValueOptions& opts) {
    if (!(opts.tol > 0.0) || !(opts.growth > 1.0) || opts.t0 < 0.0)
        throw ConfigError("psi_infinity needs tol > 0, t0 > 0 and growth > 1");
    const double dt = model.dt();
    const double t_max = 100.0 / model.lambda();
    ValueProbe probe;
    probe.x = x;

    SolverOptions solver;
    solver.tol = opts.solver_tol;
    solver.t_start = opts.t_start;

    double t = snap(opts.t0 > 0.0 ? opts.t0 : 2.0 / model.lambda(), dt);
    double step = 0.0;
    while (true) {
        if (t > t_max + 0.5 * dt) {
            std::ostringstream msg;
            msg << "no convergence up to horizon " << t_max << " (last delta "
                << (probe.deltas.empty() ? std::numeric_limits<double>::infinity() : probe.deltas.back())
                << ")";
            throw NoConvergence(msg.str());
        }
        solver.initial_step = step;
        FiniteHorizonSolution sol = solve_finite_horizon(x, t, model, solver);
        step = sol.report.step;
        probe.solver_iterations += sol.report.iterations;
        probe.horizons.push_back(t);
        probe.values.push_back(sol.report.value);
        const std::size_t m = probe.values.size();
        if (m >= 2) {
            probe.deltas.push_back(std::abs(probe.values[m - 1] - probe.values[m - 2]));
            if (probe.deltas.back() < opts.tol) {
                probe.limit = sol.report.value;
                probe.t_used = t;
                auto g = sol.costate.dual(0);
                probe.gradient.assign(g.begin(), g.end());
                // the costate carries the factor e^{-lambda t_start}
                const double undo = std::exp(model.lambda() * opts.t_start);
                for (double& v : probe.gradient) v *= undo;
                return probe;
            }
        }
        const double next = snap(t * opts.growth, dt);
        t = next > t ? next : t + dt;
    }
}

std::vector<ValueProbe> psi_infinity_batch(const std::vector<CapitalState>& xs,
                                           const VintageModel& model, const ValueOptions& opts) {
    std::vector<ValueProbe> out(xs.size());
    std::vector<std::string> errors(xs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(xs.size()); ++i) {
        try {
            out[i] = psi_infinity(xs[i], model, opts);
        } catch (const NoConvergence& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NoConvergence(e);
    return out;
}

VElement grad_psi_infinity(const CapitalState& x, const VintageModel& model, const ValueOptions& opts) {
    return VElement::with_trace(psi_infinity(x, model, opts).gradient);
}

double fitted_decay_rate(const ValueProbe& probe) {
    double n = 0.0, st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < probe.deltas.size(); ++i) {
        if (!(probe.deltas[i] > 0.0)) continue;
        const double t = probe.horizons[i];
        const double l = std::log(probe.deltas[i]);
        n += 1.0;
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    if (n < 2.0) return std::numeric_limits<double>::quiet_NaN();
    return -(n * stl - st * sl) / (n * stt - st * st);
}

double scaling_law_check(const CapitalState& x, double t, const VintageModel& model,
                         const ValueOptions& opts) {
    if (aligned_steps(t, model.dt()) == 0) return 0.0;
    ValueOptions base = opts;
    base.t_start = 0.0;
    const double psi = psi_infinity(x, model, base).limit;
    const double factor = std::exp(-model.lambda() * t);
    ValueOptions shifted = opts;
    shifted.t_start = t;
    shifted.tol = opts.tol * factor;
    const double z = psi_infinity(x, model, shifted).limit;
    return std::abs(z - factor * psi) / (1.0 + std::abs(psi));
}

double dpp_residual(const CapitalState& x, double s, double t, const VintageModel& model, double tol) {
    const std::size_t k = aligned_steps(s, model.dt());
    const std::size_t total = aligned_steps(t, model.dt());
    if (k == 0 || k > total) throw ConfigError("dpp_residual needs 0 < s <= t");
    SolverOptions opts;
    opts.tol = tol;
    const FiniteHorizonSolution full = solve_finite_horizon(x, t, model, opts);
    const double head = running_cost(full.control, full.trajectory, model, k);
    const CapitalState ys = full.trajectory.state_copy(k);
    const double tail = value_finite(ys, t - s, model, tol);
    return std::abs(full.report.value - (head + std::exp(-model.lambda() * s) * tail));
}

nlohmann::json probe_to_json(const ValueProbe& probe) {
    nlohmann::json j;
    j["horizons"] = probe.horizons;
    j["values"] = probe.values;
    j["deltas"] = probe.deltas;
    j["limit"] = probe.limit;
    j["t_used"] = probe.t_used;
    j["x_norm"] = probe.x.h_norm();
    const double kappa = fitted_decay_rate(probe);
    j["decay_rate"] = std::isfinite(kappa) ? nlohmann::json(kappa) : nlohmann::json(nullptr);
    j["solver_iterations"] = probe.solver_iterations;
    return j;
}

void write_probe_csv(std::ostream& os, const ValueProbe& probe) {
    os << "horizon,value,delta\n" << std::setprecision(17);
    for (std::size_t i = 0; i < probe.values.size(); ++i) {
        os << probe.horizons[i] << ',' << probe.values[i] << ',';
        if (i + 1 < probe.values.size()) os << probe.deltas[i];
        os << '\n';
    }
}

}  // namespace vintage

#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "vintage/optimize.hpp"

namespace vintage {

struct ValueOptions {
    double tol = 1e-6;          // stop once successive horizon values differ by less
    double t0 = 0.0;            // first horizon; 0 selects 2 / lambda
    double growth = 1.5;
    double t_start = 0.0;       // initial time of every solve
    double solver_tol = 1e-8;
};

/// Horizon sweep towards Psi_inf(x).
struct ValueProbe {
    CapitalState x;
    std::vector<double> horizons;
    std::vector<double> values;
    std::vector<double> deltas;     // deltas[i] = |values[i+1] - values[i]|
    double limit = 0.0;
    double t_used = 0.0;
    std::vector<double> gradient;   // time-0 costate of the t_used solve
    std::size_t solver_iterations = 0;
};

/// Throws ConfigError on bad options and NoConvergence past 100 / lambda.
ValueProbe psi_infinity(const CapitalState& x, const VintageModel& model, const ValueOptions& opts = {});

/// Probes for many states, evaluated in parallel and returned in input order.
std::vector<ValueProbe> psi_infinity_batch(const std::vector<CapitalState>& xs,
                                           const VintageModel& model, const ValueOptions& opts = {});

/// Psi_inf'(x) with its trace, from the same sweep as psi_infinity.
VElement grad_psi_infinity(const CapitalState& x, const VintageModel& model, const ValueOptions& opts = {});

/// Log-linear least-squares rate kappa of deltas ~ C e^{-kappa t}; NaN with fewer than two
/// positive deltas.
double fitted_decay_rate(const ValueProbe& probe);

/// |Z(t, x) - e^{-lambda t} Psi_inf(x)| / (1 + |Psi_inf(x)|), Z being the value of the problem
/// started at time t.
double scaling_law_check(const CapitalState& x, double t, const VintageModel& model,
                         const ValueOptions& opts = {});

/// |Psi(t, x) - (running cost on [0, s] of the optimal control + e^{-lambda s} Psi(t - s, y(s)))|.
double dpp_residual(const CapitalState& x, double s, double t, const VintageModel& model,
                    double tol = 1e-8);

nlohmann::json probe_to_json(const ValueProbe& probe);
/// Columns horizon,value,delta; the last row has an empty delta.
void write_probe_csv(std::ostream& os, const ValueProbe& probe);

}  // namespace vintage

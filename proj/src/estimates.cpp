#include "vintage/estimates.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace vintage {

double theta(double t, double s, const ThetaParams& params) {
    const double gap = params.lambda - params.p * params.omega;
    if (gap == 0.0) return std::abs(t - s);
    const double c = gap / (params.p - 1.0);
    // e^{ct} - e^{cs} = e^{cs} expm1(c (t - s)) stays accurate as gap -> 0
    return (params.p - 1.0) / std::abs(gap) * std::exp(c * s) * std::abs(std::expm1(c * (t - s)));
}

namespace {

double row_norm(std::span<const double> row, double ds) {
    double sq = row[0] * row[0];
    for (std::size_t j = 1; j < row.size(); ++j) sq += ds * row[j] * row[j];
    return std::sqrt(sq);
}

// int_a^{a+h} e^{-rate tau} d tau
double exp_integral(double rate, double a, double h) {
    if (rate == 0.0) return h;
    return std::exp(-rate * a) * -std::expm1(-rate * h) / rate;
}

}  // namespace

BoundCheck check_holder_bound(const ControlPath& u, const ThetaParams& params, double ds) {
    const double dt = u.dt();
    double lhs = 0.0;
    double norm_p = 0.0;
    for (std::size_t k = 0; k < u.steps(); ++k) {
        const double mid = u.time(k) + 0.5 * dt;
        const double a = row_norm(u.row(k), ds);
        lhs += dt * std::exp(-params.omega * mid) * a;
        norm_p += dt * std::exp(-params.lambda * mid) * std::pow(a, params.p);
    }
    const double rhs = std::pow(theta(u.t_start(), u.t_end(), params), 1.0 / params.q()) *
                       std::pow(norm_p, 1.0 / params.p);
    return BoundCheck{rhs - lhs, lhs, rhs};
}

ControlPath holder_extremal(double t_start, double dt, std::size_t steps, std::size_t n_cells,
                            const ThetaParams& params) {
    ControlPath u(t_start, dt, steps, n_cells);
    const double rate = (params.lambda - params.omega) / (params.p - 1.0);
    for (std::size_t k = 0; k < steps; ++k) u.u0(k) = std::exp(rate * (u.time(k) + 0.5 * dt));
    return u;
}

double injection_norm(const VintageModel& model) {
    const auto c = StepCoefficients::make(model);
    const double ds = model.ds();
    const double boundary_block = ds * c.inflow * c.inflow + c.kappa_half * c.kappa_half;
    return std::sqrt(std::max(boundary_block, c.kappa * c.kappa)) / model.dt();
}

double state_bound_constant(const VintageModel& model, double t) {
    const double w = std::abs(model.omega());
    return std::max(injection_norm(model) * std::exp(w * model.dt()), std::exp(w * t));
}

BoundCheck check_state_bound(const CapitalState& x, const ControlPath& u, const Trajectory& traj,
                             const VintageModel& model) {
    if (traj.steps() != u.steps()) throw GridError("trajectory and control lengths differ");
    const ThetaParams params = ThetaParams::from(model);
    const double t = u.t_start();
    const double C = state_bound_constant(model, t);
    const double x_norm = x.h_norm();
    BoundCheck worst{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    double norm_p = 0.0;
    for (std::size_t k = 0; k <= u.steps(); ++k) {
        const double tau = traj.time(k);
        const double lhs = h_norm(traj.state(k), model.ds());
        const double rhs = C * std::exp(model.omega() * tau) *
                           (x_norm + std::pow(theta(t, tau, params), 1.0 / params.q()) *
                                         std::pow(norm_p, 1.0 / params.p));
        if (rhs - lhs < worst.margin) worst = BoundCheck{rhs - lhs, lhs, rhs};
        if (k < u.steps())
            norm_p += std::pow(row_norm(u.row(k), model.ds()), params.p) *
                      exp_integral(model.lambda(), u.time(k), u.dt());
    }
    return worst;
}

double discounted_state_ratio(const CapitalState& x, const ControlPath& u, const Trajectory& traj,
                              const VintageModel& model) {
    double acc = 0.0;
    for (std::size_t k = 0; k < traj.steps(); ++k)
        acc += traj.dt() * std::exp(-model.lambda() * traj.time(k)) * h_norm(traj.state(k), model.ds());
    return acc / (x.h_norm() + u.weighted_norm(model.lambda(), model.p(), model.ds()) + 1.0);
}

void write_margin_csv(std::ostream& os, const std::vector<MarginRecord>& records) {
    os << "check,case,margin,lhs,rhs\n" << std::setprecision(17);
    for (const auto& r : records)
        os << r.check << ',' << r.case_index << ',' << r.margin << ',' << r.lhs << ',' << r.rhs << '\n';
}

}  // namespace vintage

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vintage/transport.hpp"

namespace vintage {

struct ThetaParams {
    double lambda = 1.0;
    double omega = 0.0;
    double p = 2.0;

    double q() const { return p / (p - 1.0); }
    static ThetaParams from(const VintageModel& m) { return {m.lambda(), m.omega(), m.p()}; }
};

/// (p-1)/|lambda - p omega| |e^{c t} - e^{c s}| with c = (lambda - p omega)/(p-1), or |t - s|
/// when lambda = p omega.
double theta(double t, double s, const ThetaParams& params);

struct BoundCheck {
    double margin = 0.0;  // rhs - lhs, minimized over the checked times
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass() const { return margin >= -1e-12; }
};

/// int_t^s e^{-omega tau} |u|_U <= theta(t, s)^{1/q} ||u||_{L^p_lambda(t, s)} on the path's
/// window, both sides by midpoint quadrature.
BoundCheck check_holder_bound(const ControlPath& u, const ThetaParams& params, double ds);

/// Control of Holder equality: |u(tau)| proportional to e^{(lambda - omega) tau / (p - 1)},
/// placed in the boundary component.
ControlPath holder_extremal(double t_start, double dt, std::size_t steps, std::size_t n_cells,
                            const ThetaParams& params);

/// ||B||_{L(U,H)} of the discrete injection per unit time.
double injection_norm(const VintageModel& model);

/// Constant of the state estimate: max(||B|| e^{|omega| dt}, e^{|omega| t}).
double state_bound_constant(const VintageModel& model, double t);

/// |y(tau_k)|_H <= C e^{omega tau_k} (|x|_H + theta(t, tau_k)^{1/q} ||u||_{L^p_lambda(t, tau_k)})
/// at every grid time, with exact integrals of the piecewise-constant control.
BoundCheck check_state_bound(const CapitalState& x, const ControlPath& u, const Trajectory& traj,
                             const VintageModel& model);

/// sum_k dt e^{-lambda tau_k} |y_k|_H / (|x|_H + ||u||_{L^p_lambda} + 1)
double discounted_state_ratio(const CapitalState& x, const ControlPath& u, const Trajectory& traj,
                              const VintageModel& model);

struct MarginRecord {
    std::string check;
    std::size_t case_index;
    double margin;
    double lhs;
    double rhs;
};

void write_margin_csv(std::ostream& os, const std::vector<MarginRecord>& records);

}  // namespace vintage

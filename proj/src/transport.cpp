#include "vintage/transport.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "vintage/kernels.hpp"

namespace vintage {

double kappa(double mu, double h) {
    if (mu == 0.0) return h;
    return -std::expm1(-mu * h) / mu;
}

StepCoefficients StepCoefficients::make(double mu, double ds) {
    return StepCoefficients{std::exp(-mu * ds), std::exp(-0.5 * mu * ds), vintage::kappa(mu, ds),
                            vintage::kappa(mu, 0.5 * ds)};
}

Trajectory::Trajectory(AgeGrid grid, double t_start, double dt, std::size_t steps)
    : grid_(grid), t_start_(t_start), dt_(dt), steps_(steps),
      data_((steps + 1) * grid.size(), 0.0) {}

CapitalState Trajectory::state_copy(std::size_t k) const {
    auto s = state(k);
    return CapitalState(grid_, std::vector<double>(s.begin(), s.end()));
}

CapitalState apply_semigroup(const CapitalState& x, double tau, double mu) {
    const double ds = x.grid.cell_width();
    const double cells = tau / ds;
    const double whole = std::round(cells);
    if (tau < 0.0 || std::abs(cells - whole) > 1e-12 * std::max(1.0, std::abs(cells)))
        throw MisalignedTau("tau must be a non-negative multiple of the cell width");
    const std::size_t shift = static_cast<std::size_t>(whole);
    CapitalState out = CapitalState::zeros(x.grid);
    if (shift == 0) return x;
    const double factor = std::exp(-mu * tau);
    for (std::size_t j = shift; j < x.size(); ++j) out.values[j] = factor * x.values[j - shift];
    return out;
}

void mild_step(std::span<const double> y, double u0, std::span<const double> u1,
               const StepCoefficients& c, std::span<double> out) {
    const std::size_t n = y.size();
    out[0] = c.inflow * u0 + c.kappa_half * u1[0];
    for (std::size_t j = 1; j < n; ++j) out[j] = c.decay * y[j - 1] + c.kappa * u1[j - 1];
}

CapitalState mild_step(const CapitalState& y, const Control& u, const VintageModel& model) {
    if (!(y.grid == model.grid()) || u.u1.size() != model.n_cells())
        throw GridError("state or control does not live on the model grid");
    CapitalState out = CapitalState::zeros(model.grid());
    mild_step(y.values, u.u0, u.u1, StepCoefficients::make(model), out.values);
    return out;
}

void check_alignment(const ControlPath& u, const VintageModel& model) {
    if (u.n_cells() != model.n_cells()) throw GridError("control path has the wrong cell count");
    if (std::abs(u.dt() - model.ds()) > 1e-12 * model.ds())
        throw GridError("control time step must equal the age cell width");
}

namespace {

void forward_impl(const CapitalState& x, const ControlPath& u, const VintageModel& model, bool parallel,
                  Trajectory& traj) {
    check_alignment(u, model);
    if (!(x.grid == model.grid())) throw GridError("initial state is not on the model grid");
    if (!(traj.grid() == model.grid()) || traj.steps() != u.steps() || traj.t_start() != u.t_start() ||
        traj.dt() != model.dt())
        traj = Trajectory(model.grid(), u.t_start(), model.dt(), u.steps());
    std::copy(x.values.begin(), x.values.end(), traj.state(0).begin());
    const auto c = StepCoefficients::make(model);
    if (parallel)
        kernels::forward_parallel(u.data(), c, model.n_cells(), u.steps(), traj.data());
    else
        kernels::forward_serial(u.data(), c, model.n_cells(), u.steps(), traj.data());
    for (double v : traj.data())
        if (!std::isfinite(v)) throw NonFiniteState("forward solve produced a non-finite value");
}

}  // namespace

Trajectory solve_forward(const CapitalState& x, const ControlPath& u, const VintageModel& model) {
    Trajectory traj;
    forward_impl(x, u, model, true, traj);
    return traj;
}

void solve_forward_into(const CapitalState& x, const ControlPath& u, const VintageModel& model,
                        Trajectory& out) {
    forward_impl(x, u, model, true, out);
}

Trajectory solve_forward_serial(const CapitalState& x, const ControlPath& u,
                                const VintageModel& model) {
    Trajectory traj;
    forward_impl(x, u, model, false, traj);
    return traj;
}

double output_Q(std::span<const double> y, std::span<const double> alpha, double ds) {
    return h_inner(alpha, y, ds);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "time,age,value\n" << std::setprecision(17);
    for (std::size_t k = 0; k <= traj.steps(); ++k) {
        auto y = traj.state(k);
        for (int j = 0; j < traj.grid().n_cells(); ++j)
            os << traj.time(k) << ',' << traj.grid().center(j) << ',' << y[j] << '\n';
    }
}

}  // namespace vintage

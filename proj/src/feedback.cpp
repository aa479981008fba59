#include "vintage/feedback.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <ostream>

namespace vintage {

RiccatiAffineProvider::RiccatiAffineProvider(RiccatiSolution sol) : sol_(std::move(sol)) {
    if (!(sol_.residual_norm <= 1e-10 * (1.0 + sol_.P.norm())))
        throw NoConvergence("Riccati solution is not converged");
}

VElement RiccatiAffineProvider::gradient(std::span<const double> y) const {
    if (static_cast<Eigen::Index>(y.size()) != sol_.P.rows())
        throw GridError("state size does not match the Riccati solution");
    return sol_.gradient(y);
}

OnDemandProvider::OnDemandProvider(VintageModel model, ValueOptions opts, double horizon,
                                   std::size_t memo_capacity)
    : model_(std::move(model)), opts_(opts), capacity_(memo_capacity), horizon_(horizon) {
    if (horizon_ > 0.0) aligned_steps(horizon_, model_.dt());
}

std::uint64_t OnDemandProvider::state_key(std::span<const double> y) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : y) {
        const auto q = static_cast<std::int64_t>(std::llround(v * 1e12));
        unsigned char bytes[sizeof(q)];
        std::memcpy(bytes, &q, sizeof(q));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

VElement OnDemandProvider::gradient(std::span<const double> y) const {
    if (y.size() != model_.n_cells()) throw GridError("state size does not match the model grid");
    const std::uint64_t key = state_key(y);
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) {
        ++hits_;
        return it->second;
    }
    const CapitalState x(model_.grid(), std::vector<double>(y.begin(), y.end()));
    auto remember = [this, key](const VElement& g) {
        memo_.emplace(key, g);
        order_.push_back(key);
        if (order_.size() > capacity_) {
            memo_.erase(order_.front());
            order_.pop_front();
        }
    };
    if (!(horizon_ > 0.0)) {
        // the sweep's last solve is already the answer at the chosen horizon
        ValueProbe probe = psi_infinity(x, model_, opts_);
        horizon_ = probe.t_used;
        ++solves_;
        VElement g = VElement::with_trace(std::move(probe.gradient));
        remember(g);
        return g;
    }
    const std::size_t steps = aligned_steps(horizon_, model_.dt());
    SolverOptions solver;
    solver.tol = opts_.solver_tol;
    solver.initial_step = step_;
    if (last_control_ && last_control_->steps() == steps) {
        // the previous query is usually the preceding closed-loop state: shift by one step
        ControlPath shifted(0.0, model_.dt(), steps, model_.n_cells());
        const std::size_t stride = shifted.stride();
        auto& src = last_control_->data();
        std::copy(src.begin() + static_cast<std::ptrdiff_t>(stride), src.end(), shifted.data().begin());
        std::copy(src.end() - static_cast<std::ptrdiff_t>(stride), src.end(),
                  shifted.data().end() - static_cast<std::ptrdiff_t>(stride));
        solver.warm_start = std::move(shifted);
    }
    FiniteHorizonSolution sol = solve_finite_horizon(x, horizon_, model_, solver);
    ++solves_;
    step_ = sol.report.step;
    auto d = sol.costate.dual(0);
    VElement g = VElement::with_trace(std::vector<double>(d.begin(), d.end()));
    last_control_ = std::move(sol.control);
    remember(g);
    return g;
}

double OnDemandProvider::horizon() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return horizon_;
}

std::size_t OnDemandProvider::solves() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return solves_;
}

std::size_t OnDemandProvider::memo_hits() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return hits_;
}

Control feedback_control(std::span<const double> y, const GradientProvider& provider,
                         const ConjugatePair& pair) {
    Control b = adjoint_control(provider.gradient(y));
    b.u0 = -b.u0;
    for (double& v : b.u1) v = -v;
    return pair.h0_star_prime(b);
}

ClosedLoopResult closed_loop_solve(const CapitalState& x, double T_sim, const GradientProvider& provider,
                                   const VintageModel& model) {
    if (!(x.grid == model.grid())) throw GridError("initial state is not on the model grid");
    const std::size_t steps = aligned_steps(T_sim, model.dt());
    const auto pair = make_conjugate(model);
    const auto c = StepCoefficients::make(model);
    ClosedLoopResult out{Trajectory(model.grid(), 0.0, model.dt(), steps),
                         ControlPath(0.0, model.dt(), steps, model.n_cells())};
    std::copy(x.values.begin(), x.values.end(), out.trajectory.state(0).begin());
    for (std::size_t k = 0; k < steps; ++k) {
        const Control u = feedback_control(out.trajectory.state(k), provider, pair);
        out.control.set_control(k, u);
        mild_step(out.trajectory.state(k), u.u0, u.u1, c, out.trajectory.state(k + 1));
        for (double v : out.trajectory.state(k + 1))
            if (!std::isfinite(v)) throw NonFiniteState("closed-loop state is not finite");
    }
    return out;
}

std::vector<double> verification_gap(const Trajectory& traj, const ControlPath& u,
                                     const GradientProvider& provider, const VintageModel& model) {
    if (traj.steps() != u.steps()) throw GridError("trajectory and control lengths differ");
    const auto pair = make_conjugate(model);
    std::vector<double> gaps(u.steps());
    for (std::size_t k = 0; k < u.steps(); ++k) {
        const Control uk = u.control(k);
        const ExtendedValue h = pair.h0(uk);
        if (!h.feasible) throw InfeasibleControl("control leaves the domain of h0");
        Control b = adjoint_control(provider.gradient(traj.state(k)));
        const double pairing = u_inner(b, uk, model.ds());
        b.u0 = -b.u0;
        for (double& v : b.u1) v = -v;
        gaps[k] = std::exp(-model.lambda() * u.time(k)) * (pair.h0_star(b) + pairing + h.value);
    }
    return gaps;
}

double total_gap(const std::vector<double>& gaps, double dt) {
    double acc = 0.0;
    for (double g : gaps) acc += g;
    return acc * dt;
}

double control_distance(const ControlPath& a, const ControlPath& b, std::size_t steps,
                        const VintageModel& model) {
    if (steps > a.steps() || steps > b.steps()) throw GridError("control paths are too short");
    ControlPath diff(a.t_start(), a.dt(), steps, a.n_cells());
    for (std::size_t i = 0; i < diff.data().size(); ++i) diff.data()[i] = a.data()[i] - b.data()[i];
    return diff.weighted_norm(model.lambda(), model.p(), model.ds());
}

void write_closed_loop_csv(std::ostream& os, const ClosedLoopResult& result,
                           const std::vector<double>& gaps, const VintageModel& model) {
    const auto pair = make_conjugate(model);
    const auto& u = result.control;
    os << "time,u0,Q,cost_rate,gap\n" << std::setprecision(17);
    for (std::size_t k = 0; k < u.steps(); ++k) {
        auto y = result.trajectory.state(k);
        const double q = output_Q(y, model.alpha(), model.ds());
        const double rate = std::exp(-model.lambda() * u.time(k)) * (g0_eval(y, model) + pair.h0(u.row(k)).value);
        os << u.time(k) << ',' << u.u0(k) << ',' << q << ',' << rate << ',';
        if (k < gaps.size()) os << gaps[k];
        os << '\n';
    }
}

}  // namespace vintage

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <deque>
#include <string>

#include "vintage/hjb.hpp"
#include "vintage/value.hpp"

namespace vintage {

/// Source of Psi_inf'(y) as a V-element with its trace attached.
class GradientProvider {
public:
    virtual ~GradientProvider() = default;
    virtual VElement gradient(std::span<const double> y) const = 0;
    virtual std::string kind() const = 0;
};

/// y -> P y + r from a converged Riccati solution.
class RiccatiAffineProvider final : public GradientProvider {
public:
    /// Throws NoConvergence when the solution's residual is above the solver contract.
    explicit RiccatiAffineProvider(RiccatiSolution sol);
    VElement gradient(std::span<const double> y) const override;
    std::string kind() const override { return "riccati_affine"; }
    const RiccatiSolution& solution() const { return sol_; }

private:
    RiccatiSolution sol_;
};

/// Gradient of the horizon-t value at y: the time-0 costate of a warm-started finite-horizon
/// solve. The horizon is fixed by a psi_infinity sweep at the first query unless given.
/// Recent answers are memoized by state, quantized at 1e-12.
class OnDemandProvider final : public GradientProvider {
public:
    OnDemandProvider(VintageModel model, ValueOptions opts = {}, double horizon = 0.0,
                     std::size_t memo_capacity = 4096);
    VElement gradient(std::span<const double> y) const override;
    std::string kind() const override { return "on_demand"; }

    double horizon() const;
    std::size_t solves() const;
    std::size_t memo_hits() const;

private:
    static std::uint64_t state_key(std::span<const double> y);

    VintageModel model_;
    ValueOptions opts_;
    std::size_t capacity_;
    mutable std::mutex mutex_;
    mutable double horizon_;
    mutable std::optional<ControlPath> last_control_;
    mutable double step_ = 0.0;
    mutable std::unordered_map<std::uint64_t, VElement> memo_;
    mutable std::deque<std::uint64_t> order_;
    mutable std::size_t solves_ = 0;
    mutable std::size_t hits_ = 0;
};

/// G(y) = (h0*)'(-B* Psi_inf'(y)).
Control feedback_control(std::span<const double> y, const GradientProvider& provider,
                         const ConjugatePair& pair);

struct ClosedLoopResult {
    Trajectory trajectory;
    ControlPath control;
};

/// Explicit feedback stepping: u_k = G(y_k), y_{k+1} = mild_step(y_k, u_k).
ClosedLoopResult closed_loop_solve(const CapitalState& x, double T_sim, const GradientProvider& provider,
                                   const VintageModel& model);

/// Per-step Fenchel gap e^{-lambda tau_k} [h0*(-B*p_k) + <B*p_k, u_k>_U + h0(u_k)] with
/// p_k = provider gradient at y_k. Throws InfeasibleControl when h0(u_k) = +inf.
std::vector<double> verification_gap(const Trajectory& traj, const ControlPath& u,
                                     const GradientProvider& provider, const VintageModel& model);

/// dt * sum of the per-step gaps.
double total_gap(const std::vector<double>& gaps, double dt);

/// ||a - b||_{L^p_lambda} over the first `steps` steps.
double control_distance(const ControlPath& a, const ControlPath& b, std::size_t steps,
                        const VintageModel& model);

/// Columns time,u0,Q,cost_rate,gap where cost_rate = e^{-lambda tau}[g0(y) + h0(u)].
void write_closed_loop_csv(std::ostream& os, const ClosedLoopResult& result,
                           const std::vector<double>& gaps, const VintageModel& model);

}  // namespace vintage

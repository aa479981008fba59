#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vintage/optimize.hpp"
#include "vintage/sampling.hpp"

using namespace vintage;

TEST(AlignedSteps, AcceptsMultiplesOnly) {
    EXPECT_EQ(aligned_steps(2.0, 0.005), 400u);
    EXPECT_EQ(aligned_steps(0.0, 0.005), 0u);
    EXPECT_THROW(aligned_steps(0.0123, 0.005), GridError);
    EXPECT_THROW(aligned_steps(-1.0, 0.005), GridError);
}

TEST(Objective, InfeasibleControlIsReported) {
    const auto m = canonical_instance("box-1", 20);
    ControlPath u(0.0, m.dt(), 5, 20);
    u.u0(2) = 1.5;
    const auto traj = solve_forward(CapitalState::zeros(m.grid()), u, m);
    EXPECT_THROW(evaluate_objective(u, traj, m), InfeasibleControl);
}

TEST(Objective, AdjointGradientMatchesCentralDifferences) {
    std::mt19937_64 rng(101);
    for (const char* name : {"lq-1", "box-1", "sat-1"}) {
        ModelConfig c = canonical_config(name, 60);
        if (std::string(name) == "box-1") c.terminal = TerminalSpec{TerminalSpec::Kind::OutputQuadratic, 0.5};
        const auto m = build_model(c);
        const double T = 1.0;
        const auto x = random_state(m.grid(), rng, 1.0);
        auto u = random_control_path(0.0, m.dt(), aligned_steps(T, m.dt()), m.grid(), rng, 1.0);
        // keep box controls strictly inside the bounds so the difference stencil stays feasible
        for (double& v : u.data()) v = std::clamp(v, -0.5, 0.5);
        const auto traj = solve_forward(x, u, m);
        const auto grad = objective_gradient(u, traj, solve_adjoint(traj, m, T), m);
        for (int i = 0; i < 10; ++i) {
            const auto d = random_direction(u, m.ds(), rng);
            auto cost = [&](const std::vector<double>& data) {
                ControlPath v = u;
                v.data() = data;
                return evaluate_objective(v, solve_forward(x, v, m), m);
            };
            const double fd = oracle::central_difference(cost, u.data(), d.data(), 1e-4);
            const double an = path_pairing(grad, d, m.ds());
            EXPECT_NEAR(an, fd, 1e-7 * (1.0 + std::abs(fd))) << name;
        }
    }
}

TEST(FiniteHorizon, MatchesBackwardDynamicProgramming) {
    const auto m = canonical_instance("lq-1", 40);
    std::mt19937_64 rng(3);
    const std::size_t steps = aligned_steps(2.0, m.dt());
    const auto oracle = oracle::lq_finite_horizon(m, steps);
    for (int i = 0; i < 3; ++i) {
        const auto x = random_state(m.grid(), rng, 1.0);
        const double v = value_finite(x, 2.0, m, 1e-10);
        EXPECT_NEAR(v, oracle(x.values), 1e-7 * (1.0 + std::abs(v)));
    }
}

TEST(FiniteHorizon, ZeroRevenueHasZeroValueAndControl) {
    const auto m = canonical_instance("null-1", 50);
    const auto sol = solve_finite_horizon(CapitalState::constant(m.grid(), 1.0), 2.0, m);
    EXPECT_EQ(sol.report.value, 0.0);
    for (double v : sol.control.data()) EXPECT_EQ(v, 0.0);
}

TEST(FiniteHorizon, BoxConstraintsHoldForLargeStates) {
    const auto m = canonical_instance("box-1", 100);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 3; ++i) {
        const auto x = random_state(m.grid(), rng, 10.0);
        const auto sol = solve_finite_horizon(x, 1.0, m);
        for (double v : sol.control.data()) {
            EXPECT_LE(v, 1.0);
            EXPECT_GE(v, -1.0);
        }
    }
}

TEST(FiniteHorizon, HistoryIsMonotoneAndConverged) {
    const auto m = canonical_instance("sat-1", 100);
    SolverOptions opts;
    opts.record_history = true;
    const auto sol = solve_finite_horizon(CapitalState::constant(m.grid(), 1.0), 2.0, m, opts);
    ASSERT_TRUE(sol.report.converged);
    ASSERT_FALSE(sol.history.empty());
    for (std::size_t i = 1; i < sol.history.size(); ++i)
        EXPECT_LE(sol.history[i].objective, sol.history[i - 1].objective + 1e-13 * (1.0 + std::abs(sol.history[i - 1].objective)));
    EXPECT_LE(sol.report.prox_grad_norm, 1e-8 * (1.0 + std::abs(sol.report.value)));
    EXPECT_GE(sol.report.epsilon, 0.0);
    std::ostringstream os;
    write_history_csv(os, sol.history);
    EXPECT_EQ(os.str().substr(0, 37), "iteration,objective,prox_grad_norm\n0,");
}

TEST(FiniteHorizon, OptimalControlSatisfiesFirstOrderCondition) {
    // at the optimum of an unconstrained quadratic problem the gradient vanishes
    const auto m = canonical_instance("lq-1", 50);
    const auto x = CapitalState::constant(m.grid(), 1.0);
    const auto sol = solve_finite_horizon(x, 1.0, m, SolverOptions{1e-11});
    const auto grad = objective_gradient(sol.control, sol.trajectory, sol.costate, m);
    double worst = 0.0;
    for (double v : grad.data()) worst = std::max(worst, std::abs(v));
    EXPECT_LT(worst, 1e-8);
}

TEST(FiniteHorizon, WarmStartReachesSameValue) {
    const auto m = canonical_instance("lq-1", 50);
    const auto x = CapitalState::constant(m.grid(), 1.0);
    const auto cold = solve_finite_horizon(x, 2.0, m);
    SolverOptions opts;
    opts.warm_start = cold.control;
    const auto warm = solve_finite_horizon(x, 2.0, m, opts);
    EXPECT_NEAR(warm.report.value, cold.report.value, 1e-9);
    EXPECT_LE(warm.report.iterations, 2u);
}

TEST(TIndependence, ShiftedProblemAgreesAfterRescaling) {
    const auto m = canonical_instance("lq-1", 100);
    EXPECT_LE(t_independence_residual(CapitalState::constant(m.grid(), 1.0), 1.0, m), 1e-8);
}

TEST(Growth, DenominatorFollowsRegime) {
    EXPECT_DOUBLE_EQ(growth_denominator(2.0, canonical_instance("box-1", 10)), 5.0);
    EXPECT_DOUBLE_EQ(growth_denominator(2.0, canonical_instance("sat-1", 10)), 3.0);
}

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vintage/sampling.hpp"
#include "vintage/value.hpp"

using namespace vintage;

TEST(PsiInfinity, MatchesDiscreteInfiniteHorizonProgram) {
    const auto m = canonical_instance("lq-1", 40);
    const auto oracle = oracle::lq_infinite_horizon(m);
    std::mt19937_64 rng(77);
    ValueOptions opts;
    opts.tol = 1e-9;
    opts.solver_tol = 1e-11;
    for (int i = 0; i < 3; ++i) {
        const auto x = random_state_in_ball(m.grid(), rng, 1.0);
        const auto probe = psi_infinity(x, m, opts);
        EXPECT_NEAR(probe.limit, oracle(x.values), 1e-7) << i;
    }
}

TEST(PsiInfinity, HorizonsAreGridAlignedAndGrowing) {
    const auto m = canonical_instance("lq-1", 50);
    const auto probe = psi_infinity(CapitalState::constant(m.grid(), 1.0), m);
    ASSERT_GE(probe.horizons.size(), 2u);
    EXPECT_EQ(probe.deltas.size() + 1, probe.values.size());
    for (std::size_t i = 0; i < probe.horizons.size(); ++i) {
        const double steps = probe.horizons[i] / m.dt();
        EXPECT_NEAR(steps, std::round(steps), 1e-9);
        if (i > 0) EXPECT_GT(probe.horizons[i], probe.horizons[i - 1]);
    }
    EXPECT_LT(probe.deltas.back(), 1e-6);
    EXPECT_EQ(probe.t_used, probe.horizons.back());
    EXPECT_EQ(probe.limit, probe.values.back());
    EXPECT_EQ(probe.gradient.size(), m.n_cells());
}

TEST(PsiInfinity, ZeroRevenueHasZeroValue) {
    const auto m = canonical_instance("null-1", 50);
    const auto probe = psi_infinity(CapitalState::constant(m.grid(), 1.0), m);
    EXPECT_EQ(probe.limit, 0.0);
}

TEST(PsiInfinity, ZeroStateOfSublinearInstanceIsNotZero) {
    // positive marginal revenue at Q = 0 makes investing profitable from an empty stock
    const auto m = canonical_instance("sat-1", 50);
    EXPECT_LT(psi_infinity(CapitalState::zeros(m.grid()), m).limit, -1e-3);
}

TEST(PsiInfinity, RejectsBadOptions) {
    const auto m = canonical_instance("lq-1", 20);
    const auto x = CapitalState::constant(m.grid(), 1.0);
    ValueOptions opts;
    opts.tol = 0.0;
    EXPECT_THROW(psi_infinity(x, m, opts), ConfigError);
    opts = {};
    opts.growth = 1.0;
    EXPECT_THROW(psi_infinity(x, m, opts), ConfigError);
}

TEST(PsiInfinity, DeltasDecayFasterThanHalfTheDiscount) {
    const auto m = canonical_instance("lq-1", 100);
    const auto probe = psi_infinity(CapitalState::constant(m.grid(), 1.0), m);
    EXPECT_GE(fitted_decay_rate(probe), 0.5 * m.lambda());
}

TEST(PsiInfinity, BatchMatchesSequentialProbes) {
    const auto m = canonical_instance("sat-1", 40);
    std::mt19937_64 rng(9);
    std::vector<CapitalState> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(random_state_in_ball(m.grid(), rng, 1.0));
    const auto batch = psi_infinity_batch(xs, m);
    ASSERT_EQ(batch.size(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(batch[i].limit, psi_infinity(xs[i], m).limit);
}

TEST(FittedDecayRate, RecoversExactExponential) {
    ValueProbe probe;
    for (int i = 0; i < 5; ++i) {
        probe.horizons.push_back(1.0 + i);
        probe.deltas.push_back(3.0 * std::exp(-0.7 * (1.0 + i)));
    }
    EXPECT_NEAR(fitted_decay_rate(probe), 0.7, 1e-12);
    probe.deltas.assign(5, 0.0);
    EXPECT_TRUE(std::isnan(fitted_decay_rate(probe)));
}

TEST(ScalingLaw, ShiftedStartRescalesTheValue) {
    for (const char* name : {"lq-1", "box-1"}) {
        const auto m = canonical_instance(name, 50);
        EXPECT_LE(scaling_law_check(CapitalState::constant(m.grid(), 1.0), 0.5, m), 1e-6) << name;
    }
}

TEST(DynamicProgramming, ValueSplitsAtIntermediateTime) {
    const auto m = canonical_instance("sat-1", 50);
    EXPECT_LE(dpp_residual(CapitalState::constant(m.grid(), 1.0), 0.5, 2.0, m, 1e-10), 1e-7);
}

TEST(ProbeOutput, JsonAndCsv) {
    const auto m = canonical_instance("lq-1", 20);
    const auto probe = psi_infinity(CapitalState::constant(m.grid(), 1.0), m);
    const auto j = probe_to_json(probe);
    EXPECT_EQ(j.at("limit").get<double>(), probe.limit);
    EXPECT_EQ(j.at("horizons").size(), probe.horizons.size());
    std::ostringstream os;
    write_probe_csv(os, probe);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "horizon,value,delta");
    EXPECT_EQ(s.back(), '\n');
    EXPECT_EQ(s[s.size() - 2], ',');
}

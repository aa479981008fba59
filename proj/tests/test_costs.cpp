#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vintage/costs.hpp"

using namespace vintage;

TEST(ScalarConjugate, QuadraticClosedForm) {
    const auto c = ScalarConvexSpec::quadratic(2.0);
    for (double q : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
        EXPECT_DOUBLE_EQ(c.conjugate(q), q * q / 4.0);
        EXPECT_DOUBLE_EQ(c.conjugate_prime(q), q / 2.0);
    }
}

TEST(ScalarConjugate, BoxBeyondTheBound) {
    const auto c = ScalarConvexSpec::box(1.0, 1.0);
    EXPECT_DOUBLE_EQ(c.conjugate(2.0), 1.5);
    EXPECT_DOUBLE_EQ(c.conjugate_prime(2.0), 1.0);
    EXPECT_DOUBLE_EQ(c.conjugate(-2.0), 1.5);
    EXPECT_DOUBLE_EQ(c.conjugate_prime(-2.0), -1.0);
    EXPECT_DOUBLE_EQ(c.conjugate(0.5), 0.125);
    EXPECT_DOUBLE_EQ(c.conjugate_prime(0.5), 0.5);
}

TEST(ScalarConjugate, AgreesWithDenseSupremum) {
    for (const auto& c : {ScalarConvexSpec::quadratic(1.0), ScalarConvexSpec::quadratic(0.3),
                          ScalarConvexSpec::box(1.0, 1.0), ScalarConvexSpec::box(2.0, 0.4)}) {
        const double lo = c.kind == ScalarConvexSpec::Kind::QuadraticBox ? -c.bound : -20.0;
        const double hi = -lo;
        auto f = [&c](double v) { return c.value(v); };
        for (double q = -3.0; q <= 3.0; q += 0.25) {
            EXPECT_NEAR(c.conjugate(q), oracle::dense_conjugate(f, q, lo, hi), 1e-7) << q;
            // the conjugate is only C^1 at q = +-w M, so the difference quotient is O(h) there
            const double h = 1e-6;
            EXPECT_NEAR(c.conjugate_prime(q), (c.conjugate(q + h) - c.conjugate(q - h)) / (2 * h), 1e-6) << q;
        }
    }
}

TEST(ScalarConjugate, ProjectionClamps) {
    const auto c = ScalarConvexSpec::box(1.0, 1.0);
    EXPECT_EQ(c.project(3.0), 1.0);
    EXPECT_EQ(c.project(-3.0), -1.0);
    EXPECT_EQ(c.project(0.25), 0.25);
    EXPECT_EQ(ScalarConvexSpec::quadratic(1.0).project(3.0), 3.0);
}

TEST(ConjugatePair, InfeasibleControlIsInfinite) {
    const auto m = canonical_instance("box-1", 10);
    const auto pair = make_conjugate(m);
    Control u = Control::zeros(10);
    u.u1[3] = 1.5;
    EXPECT_FALSE(pair.h0(u).feasible);
    u.u1[3] = 1.0;
    EXPECT_TRUE(pair.h0(u).feasible);
}

TEST(ConjugatePair, FenchelYoungInequalityAndEquality) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal;
    for (const auto& m : canonical_instances(30)) {
        const auto pair = make_conjugate(m);
        for (int i = 0; i < 200; ++i) {
            Control q = Control::zeros(30);
            q.u0 = 2.0 * normal(rng);
            for (double& v : q.u1) v = 2.0 * normal(rng);
            Control u = Control::zeros(30);
            u.u0 = pair.cost().c0.project(normal(rng));
            for (double& v : u.u1) v = pair.cost().c1.project(normal(rng));
            const double gap = pair.h0(u).value + pair.h0_star(q) - u_inner(u, q, m.ds());
            EXPECT_GE(gap, -1e-12);
            const Control opt = pair.h0_star_prime(q);
            ASSERT_TRUE(pair.h0(opt).feasible);
            EXPECT_NEAR(pair.h0(opt).value + pair.h0_star(q), u_inner(opt, q, m.ds()), 1e-12);
        }
    }
}

TEST(Hamiltonian, UnitCostateOnUnitWeights) {
    const auto m = canonical_instance("lq-1");
    const auto p = VElement::with_trace(std::vector<double>(m.n_cells(), 1.0));
    EXPECT_DOUBLE_EQ(*p.trace, 1.0);
    EXPECT_NEAR(hamiltonian(p, make_conjugate(m)), 1.0, 1e-14);
}

TEST(Hamiltonian, MissingTraceIsRejected) {
    const auto m = canonical_instance("lq-1", 10);
    VElement p{std::vector<double>(10, 1.0), std::nullopt};
    EXPECT_THROW(hamiltonian(p, make_conjugate(m)), MissingTrace);
}

TEST(TraceExtrapolation, LinearProfilesAreExact) {
    const AgeGrid g(1.0, 20);
    std::vector<double> v(20);
    for (int j = 0; j < 20; ++j) v[j] = 3.0 - 2.0 * g.center(j);
    EXPECT_NEAR(VElement::extrapolate_trace(v), 3.0, 1e-14);
}

TEST(RunningCost, GradientsMatchFiniteDifferences) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (const char* name : {"box-1", "sat-1"}) {
        ModelConfig c = canonical_config(name, 40);
        if (std::string(name) == "box-1") c.terminal = TerminalSpec{TerminalSpec::Kind::OutputQuadratic, 0.7};
        const auto m = build_model(c);
        std::vector<double> y(40), d(40);
        for (double& v : y) v = normal(rng);
        for (double& v : d) v = normal(rng);
        const auto g = g0_grad(y, m);
        const auto ph = phi0_grad(y, m);
        auto fg = [&m](const std::vector<double>& z) { return g0_eval(z, m); };
        auto fp = [&m](const std::vector<double>& z) { return phi0_eval(z, m); };
        EXPECT_NEAR(h_inner(g, d, m.ds()), oracle::central_difference(fg, y, d, 1e-5), 1e-8) << name;
        EXPECT_NEAR(h_inner(ph, d, m.ds()), oracle::central_difference(fp, y, d, 1e-5), 1e-8) << name;
    }
}

TEST(RunningCost, ZeroRevenueGivesZeroCost) {
    const auto m = canonical_instance("null-1", 20);
    std::vector<double> y(20, 3.0);
    EXPECT_EQ(g0_eval(y, m), 0.0);
    for (double v : g0_grad(y, m)) EXPECT_EQ(v, 0.0);
}

#include <random>

#include <gtest/gtest.h>
#include <omp.h>

#include "vintage/kernels.hpp"
#include "vintage/sampling.hpp"

using namespace vintage;

namespace {

struct Fixture {
    std::size_t n;
    std::size_t steps;
    std::vector<double> controls;
    std::vector<double> states;
};

Fixture make_fixture(std::size_t n, std::size_t steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Fixture f{n, steps, std::vector<double>(steps * (n + 1)), std::vector<double>((steps + 1) * n)};
    for (double& v : f.controls) v = normal(rng);
    for (std::size_t j = 0; j < n; ++j) f.states[j] = normal(rng);
    return f;
}

}  // namespace

class KernelThreads : public ::testing::TestWithParam<int> {};

TEST_P(KernelThreads, ForwardParallelMatchesSerialBitForBit) {
    omp_set_num_threads(GetParam());
    const auto c = StepCoefficients::make(0.5, 0.01);
    for (auto [n, steps] : {std::pair<std::size_t, std::size_t>{100, 37}, {100, 250}, {7, 3}, {64, 64}, {200, 1500}}) {
        Fixture a = make_fixture(n, steps, 1);
        Fixture b = a;
        kernels::forward_serial(a.controls, c, n, steps, a.states);
        kernels::forward_parallel(b.controls, c, n, steps, b.states);
        EXPECT_EQ(a.states, b.states) << n << " cells, " << steps << " steps";
    }
}

TEST_P(KernelThreads, AdjointParallelMatchesSerialBitForBit) {
    omp_set_num_threads(GetParam());
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    for (auto [n, steps] : {std::pair<std::size_t, std::size_t>{100, 37}, {100, 250}, {5, 9}, {200, 1500}}) {
        std::vector<double> weight(steps), alpha(n), a((steps + 1) * n), b;
        for (double& v : weight) v = normal(rng);
        for (double& v : alpha) v = normal(rng);
        for (std::size_t j = 0; j < n; ++j) a[steps * n + j] = normal(rng);
        b = a;
        kernels::adjoint_serial(weight, alpha, 0.995, n, steps, a);
        kernels::adjoint_parallel(weight, alpha, 0.995, n, steps, b);
        EXPECT_EQ(a, b);
    }
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelThreads, ::testing::Values(1, 2, 4));

TEST(Kernels, AdjointIsTransposeOfForwardInState) {
    // <p_0, y_0> + sum_k w_k <alpha, y_k> ... reduces to duality of one shift step
    const std::size_t n = 30;
    const double decay = std::exp(-0.5 * 0.01);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    std::vector<double> y(n), p(n);
    for (double& v : y) v = normal(rng);
    for (double& v : p) v = normal(rng);
    std::vector<double> fwd(2 * n, 0.0), bwd(2 * n, 0.0), zero_controls(n + 1, 0.0);
    std::copy(y.begin(), y.end(), fwd.begin());
    kernels::forward_serial(zero_controls, StepCoefficients::make(0.5, 0.01), n, 1, fwd);
    std::copy(p.begin(), p.end(), bwd.begin() + n);
    std::vector<double> weight(1, 0.0), alpha(n, 0.0);
    kernels::adjoint_serial(weight, alpha, decay, n, 1, bwd);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        lhs += p[j] * fwd[n + j];
        rhs += bwd[j] * y[j];
    }
    EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(Kernels, OutputSeriesMatchesPerStateOutput) {
    const auto m = canonical_instance("lq-1", 50);
    std::mt19937_64 rng(8);
    const auto x = random_state(m.grid(), rng, 1.0);
    const auto u = random_control_path(0.0, m.dt(), 20, m.grid(), rng, 1.0);
    const auto traj = solve_forward(x, u, m);
    std::vector<double> q(21);
    kernels::output_series(traj.data(), m.alpha(), m.ds(), 50, q);
    for (std::size_t k = 0; k <= 20; ++k) EXPECT_DOUBLE_EQ(q[k], output_Q(traj.state(k), m.alpha(), m.ds()));
}

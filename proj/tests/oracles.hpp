#pragma once
// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "vintage/model.hpp"

namespace vintage::oracle {

// Euclidean matrices of the one-step map y' = A y + B u built directly from the
// characteristics formulas, independent of the library's step coefficients.
struct StepMatrices {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
};

inline StepMatrices step_matrices(const VintageModel& m) {
    const int n = static_cast<int>(m.n_cells());
    const double h = m.ds();
    const double mu = m.mu();
    auto kap = [mu](double len) { return mu == 0.0 ? len : (1.0 - std::exp(-mu * len)) / mu; };
    StepMatrices s{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n + 1)};
    for (int j = 1; j < n; ++j) s.A(j, j - 1) = std::exp(-mu * h);
    s.B(0, 0) = std::exp(-mu * h / 2.0);
    s.B(0, 1) = kap(h / 2.0);
    for (int j = 0; j + 1 < n; ++j) s.B(j + 1, j + 1) = kap(h);
    return s;
}

// Quadratic-affine value 1/2 y'Py + r'y + c in Euclidean coordinates.
struct QuadraticValue {
    Eigen::MatrixXd P;
    Eigen::VectorXd r;
    double c = 0.0;

    double operator()(const std::vector<double>& y) const {
        Eigen::Map<const Eigen::VectorXd> v(y.data(), static_cast<Eigen::Index>(y.size()));
        return 0.5 * v.dot(P * v) + r.dot(v) + c;
    }
};

// One backward step of the discounted discrete LQ dynamic program with zero terminal cost,
// in units where the current step carries discount 1 and the next one gamma.
inline QuadraticValue lq_backward_step(const VintageModel& m, const StepMatrices& s,
                                       const QuadraticValue& next) {
    const int n = static_cast<int>(m.n_cells());
    const double dt = m.dt();
    const double h = m.ds();
    const double gamma = std::exp(-m.lambda() * dt);
    Eigen::VectorXd a(n);
    for (int j = 0; j < n; ++j) a(j) = h * m.alpha()[j];
    Eigen::VectorXd rdiag = Eigen::VectorXd::Constant(n + 1, h * m.cost().c1.w);
    rdiag(0) = m.cost().c0.w;
    const Eigen::MatrixXd S = dt * Eigen::MatrixXd(rdiag.asDiagonal()) + gamma * s.B.transpose() * next.P * s.B;
    const Eigen::LDLT<Eigen::MatrixXd> Sf(S);
    const Eigen::MatrixXd BtPA = s.B.transpose() * next.P * s.A;
    const Eigen::VectorXd Btr = s.B.transpose() * next.r;
    QuadraticValue out;
    out.P = dt * m.revenue().beta * a * a.transpose() + gamma * s.A.transpose() * next.P * s.A -
            gamma * gamma * BtPA.transpose() * Sf.solve(BtPA);
    out.P = 0.5 * (out.P + out.P.transpose()).eval();
    out.r = -dt * m.revenue().eta * a + gamma * s.A.transpose() * next.r -
            gamma * gamma * BtPA.transpose() * Sf.solve(Btr);
    out.c = gamma * next.c - 0.5 * gamma * gamma * Btr.dot(Sf.solve(Btr));
    return out;
}

// Optimal discrete cost over `steps` steps from time 0 for an unconstrained LQ model.
inline QuadraticValue lq_finite_horizon(const VintageModel& m, std::size_t steps) {
    const int n = static_cast<int>(m.n_cells());
    const StepMatrices s = step_matrices(m);
    QuadraticValue v{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
    for (std::size_t k = 0; k < steps; ++k) v = lq_backward_step(m, s, v);
    return v;
}

// Fixed point of the backward recursion: the discrete infinite-horizon value.
inline QuadraticValue lq_infinite_horizon(const VintageModel& m, double rel_tol = 1e-13) {
    const int n = static_cast<int>(m.n_cells());
    const StepMatrices s = step_matrices(m);
    QuadraticValue v{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
    for (int k = 0; k < 200000; ++k) {
        QuadraticValue next = lq_backward_step(m, s, v);
        const double change = (next.P - v.P).norm() + (next.r - v.r).norm() + std::abs(next.c - v.c);
        v = std::move(next);
        if (change <= rel_tol * (1.0 + v.P.norm() + v.r.norm() + std::abs(v.c))) break;
    }
    return v;
}

// sup_v { q v - c(v) } over a dense grid of v in [lo, hi].
inline double dense_conjugate(const std::function<double(double)>& c, double q, double lo, double hi,
                              int points = 100001) {
    double best = -INFINITY;
    for (int i = 0; i < points; ++i) {
        const double v = lo + (hi - lo) * i / (points - 1);
        best = std::max(best, q * v - c(v));
    }
    return best;
}

// Central difference of f along a direction.
template <class F, class V>
double central_difference(F&& f, const V& x, const V& d, double h) {
    V up = x, dn = x;
    for (std::size_t i = 0; i < up.size(); ++i) {
        up[i] += h * d[i];
        dn[i] -= h * d[i];
    }
    return (f(up) - f(dn)) / (2.0 * h);
}

}  // namespace vintage::oracle

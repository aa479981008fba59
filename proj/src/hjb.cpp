#include "vintage/hjb.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>


namespace vintage {

namespace {

// Semi-discrete LQ data in H form: A_d is the finite-volume upwind generator with the
// inflow flux as control, G = B_d R^{-1} B_d^* / ds, Q = beta ds alpha alpha^T.
struct SemiDiscreteLq {
    Eigen::MatrixXd A;
    Eigen::MatrixXd G;
    Eigen::MatrixXd Q;
    Eigen::VectorXd alpha;
};

SemiDiscreteLq semi_discretize(const VintageModel& model) {
    const int n = static_cast<int>(model.n_cells());
    const double ds = model.ds();
    SemiDiscreteLq d;
    d.A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        d.A(j, j) = -1.0 / ds - model.mu();
        if (j > 0) d.A(j, j - 1) = 1.0 / ds;
    }
    d.G = Eigen::MatrixXd::Identity(n, n) / model.cost().c1.w;
    d.G(0, 0) += 1.0 / (model.cost().c0.w * ds);
    d.alpha = Eigen::Map<const Eigen::VectorXd>(model.alpha().data(), n);
    d.Q = model.revenue().beta * ds * d.alpha * d.alpha.transpose();
    return d;
}

// A^T X + X A + Q = 0 for Hurwitz A: Cayley transform with shift sigma, then Smith doubling.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q, double sigma) {
    const auto n = A.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd M = (sigma * I - A).partialPivLu().inverse();
    Eigen::MatrixXd F = (sigma * I + A) * M;
    Eigen::MatrixXd X = 2.0 * sigma * M.transpose() * Q * M;
    for (int it = 0; it < 80; ++it) {
        Eigen::MatrixXd inc = F.transpose() * X * F;
        X += inc;
        const double change = inc.norm();
        if (!std::isfinite(change)) throw NewtonDivergence("Lyapunov doubling diverged");
        if (change <= 1e-17 * X.norm()) return X;
        F = F * F;
    }
    throw NewtonDivergence("Lyapunov doubling did not converge");
}

Eigen::MatrixXd care_residual(const SemiDiscreteLq& d, double lambda, const Eigen::MatrixXd& P) {
    return d.A.transpose() * P + P * d.A - lambda * P - P * d.G * P + d.Q;
}

}  // namespace

double RiccatiSolution::value(std::span<const double> x) const {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return 0.5 * ds * v.dot(P * v) + ds * r.dot(v) + c;
}

VElement RiccatiSolution::gradient(std::span<const double> x) const {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd g = P * v + r;
    return VElement::with_trace(std::vector<double>(g.data(), g.data() + g.size()));
}

double riccati_residual(const VintageModel& model, const Eigen::MatrixXd& P) {
    return care_residual(semi_discretize(model), model.lambda(), P).norm();
}

RiccatiSolution riccati_solve(const VintageModel& model) {
    if (!model.is_lq()) throw NotLQ("Riccati oracle needs quadratic revenue, quadratic costs and zero terminal cost");
    const SemiDiscreteLq d = semi_discretize(model);
    const auto n = d.A.rows();
    const double lambda = model.lambda();
    const double sigma = 1.0 / model.ds() + model.mu() + lambda;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd A_shift = d.A - 0.5 * lambda * I;

    RiccatiSolution sol;
    sol.ds = model.ds();
    sol.P = Eigen::MatrixXd::Zero(n, n);
    bool done = false;
    for (int it = 1; it <= 40 && !done; ++it) {
        const Eigen::MatrixXd gain = d.G * sol.P;
        Eigen::MatrixXd next = solve_lyapunov(A_shift - gain, d.Q + sol.P * gain, sigma);
        sol.P = 0.5 * (next + next.transpose());
        sol.iterations = it;
        sol.residual_norm = care_residual(d, lambda, sol.P).norm();
        if (!std::isfinite(sol.residual_norm)) throw NewtonDivergence("Riccati iterate is not finite");
        done = sol.residual_norm <= 1e-10 * (1.0 + sol.P.norm());
    }
    if (!done) {
        std::ostringstream msg;
        msg << "residual " << sol.residual_norm << " after " << sol.iterations << " iterations";
        throw NewtonDivergence(msg.str());
    }
    const Eigen::MatrixXd closed = d.A - d.G * sol.P;
    sol.r = (closed.transpose() - lambda * I).partialPivLu().solve(model.revenue().eta * d.alpha);
    sol.c = -model.ds() * sol.r.dot(d.G * sol.r) / (2.0 * lambda);
    return sol;
}

RiccatiSolution perturb_riccati(const RiccatiSolution& sol, double delta, std::uint64_t seed) {
    const auto n = sol.P.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) G(i, j) = normal(rng);
    RiccatiSolution out = sol;
    out.P += delta * (G * G.transpose()) / static_cast<double>(n);
    return out;
}

std::vector<double> upwind_generator(std::span<const double> x, double mu, double ds) {
    std::vector<double> out(x.size());
    // ghost value -x_0 puts the zero boundary value on the inflow face
    out[0] = -(x[0] + x[0]) / ds - mu * x[0];
    for (std::size_t j = 1; j < x.size(); ++j) out[j] = -(x[j] - x[j - 1]) / ds - mu * x[j];
    return out;
}

double hjb_residual(std::span<const double> x, const ValueFn& value_fn, const GradFn& grad_fn,
                    const VintageModel& model) {
    if (x.size() != model.n_cells()) throw GridError("test state is not on the model grid");
    const double boundary = VElement::extrapolate_trace(x);
    if (std::abs(boundary) > 1e-8 * h_norm(x, model.ds()))
        throw NotInDomain("test state does not vanish at age zero");
    const VElement grad = grad_fn(x);
    const auto ax = upwind_generator(x, model.mu(), model.ds());
    return -model.lambda() * value_fn(x) + h_inner(grad.values, ax, model.ds()) -
           hamiltonian(grad, make_conjugate(model)) + g0_eval(x, model);
}

std::vector<CapitalState> hjb_test_states(const AgeGrid& grid) {
    std::vector<CapitalState> out;
    const double smax = grid.s_max();
    auto finish = [&](std::vector<double> v) {
        v[0] = v[1] / 3.0;
        out.emplace_back(grid, std::move(v));
    };
    for (int k = 1; k <= 4; ++k) {
        std::vector<double> v(grid.size());
        for (int j = 0; j < grid.n_cells(); ++j) {
            const double s = grid.center(j);
            v[j] = s * std::sin(k * std::numbers::pi * s / smax);
        }
        finish(std::move(v));
    }
    for (double centre : {0.3, 0.65}) {
        std::vector<double> v(grid.size());
        for (int j = 0; j < grid.n_cells(); ++j) {
            const double s = grid.center(j) / smax;
            const double z = (s - centre) / 0.12;
            v[j] = std::exp(-z * z) * s * s / (s * s + 0.01);
        }
        finish(std::move(v));
    }
    return out;
}

std::string riccati_checksum(const RiccatiSolution& sol) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    };
    for (Eigen::Index i = 0; i < sol.P.rows(); ++i)
        for (Eigen::Index j = 0; j < sol.P.cols(); ++j) feed(sol.P(i, j));
    for (Eigen::Index i = 0; i < sol.r.size(); ++i) feed(sol.r(i));
    feed(sol.c);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void write_riccati_json(std::ostream& os, const RiccatiSolution& sol) {
    nlohmann::json j;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < sol.P.rows(); ++i) {
        std::vector<double> row(sol.P.cols());
        for (Eigen::Index k = 0; k < sol.P.cols(); ++k) row[k] = sol.P(i, k);
        rows.push_back(row);
    }
    j["P"] = rows;
    j["r"] = std::vector<double>(sol.r.data(), sol.r.data() + sol.r.size());
    j["c"] = sol.c;
    j["ds"] = sol.ds;
    j["residual_norm"] = sol.residual_norm;
    j["iterations"] = sol.iterations;
    j["checksum"] = riccati_checksum(sol);
    os << j.dump(2) << '\n';
}

}  // namespace vintage

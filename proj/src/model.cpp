#include "vintage/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vintage {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

AgeGrid::AgeGrid(double s_max, int n_cells) : s_max_(s_max), n_cells_(n_cells) {
    if (!(std::isfinite(s_max) && s_max > 0.0))
        throw GridError("maximal age must be finite and positive");
    if (n_cells < 2) throw GridError("at least two age cells are required");
    cell_width_ = s_max / n_cells;
}

CapitalState::CapitalState(AgeGrid g, std::vector<double> v) : values(std::move(v)), grid(g) {
    if (values.size() != grid.size()) throw GridError("state length does not match the age grid");
}

CapitalState CapitalState::zeros(const AgeGrid& g) { return constant(g, 0.0); }

CapitalState CapitalState::constant(const AgeGrid& g, double c) {
    return CapitalState(g, std::vector<double>(g.size(), c));
}

double CapitalState::h_norm() const { return vintage::h_norm(values, grid.cell_width()); }

bool CapitalState::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double h_inner(std::span<const double> a, std::span<const double> b, double ds) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
    return ds * acc;
}

double h_norm(std::span<const double> a, double ds) { return std::sqrt(h_inner(a, a, ds)); }

double Control::u_norm(double ds) const { return std::sqrt(u_inner(*this, *this, ds)); }

double u_inner(const Control& a, const Control& b, double ds) {
    return a.u0 * b.u0 + h_inner(a.u1, b.u1, ds);
}

ControlPath::ControlPath(double t_start, double dt, std::size_t steps, std::size_t n_cells)
    : t_start_(t_start), dt_(dt), steps_(steps), n_cells_(n_cells),
      data_(steps * (n_cells + 1), 0.0) {
    if (!(dt > 0.0)) throw GridError("control time step must be positive");
}

Control ControlPath::control(std::size_t k) const {
    auto u = u1(k);
    return Control{u0(k), std::vector<double>(u.begin(), u.end())};
}

void ControlPath::set_control(std::size_t k, const Control& c) {
    if (c.u1.size() != n_cells_) throw GridError("control length does not match the path");
    u0(k) = c.u0;
    std::copy(c.u1.begin(), c.u1.end(), u1(k).begin());
}

double ControlPath::weighted_norm(double lambda, double p, double ds) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < steps_; ++k) {
        const double a = u0(k);
        double sq = a * a;
        for (double v : u1(k)) sq += ds * v * v;
        acc += std::exp(-lambda * time(k)) * std::pow(std::sqrt(sq), p) * dt_;
    }
    return std::pow(acc, 1.0 / p);
}

double RevenueSpec::value(double q) const {
    if (kind == Kind::SaturatedQuadratic) {
        if (q < 0.0) return eta * q;
        if (q > q_hat) return eta * q_hat - 0.5 * beta * q_hat * q_hat + (eta - beta * q_hat) * (q - q_hat);
    }
    return eta * q - 0.5 * beta * q * q;
}

double RevenueSpec::slope(double q) const {
    if (kind == Kind::SaturatedQuadratic) {
        if (q < 0.0) return eta;
        if (q > q_hat) return eta - beta * q_hat;
    }
    return eta - beta * q;
}

double ScalarConvexSpec::conjugate(double q) const {
    if (kind == Kind::QuadraticBox && std::abs(q) > w * bound)
        return bound * std::abs(q) - 0.5 * w * bound * bound;
    return 0.5 * q * q / w;
}

double ScalarConvexSpec::conjugate_prime(double q) const {
    const double v = q / w;
    return kind == Kind::QuadraticBox ? std::clamp(v, -bound, bound) : v;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::ConstrainedControl: return "8.a";
        case Regime::SublinearRevenue: return "8.b";
        case Regime::LinearQuadratic: return "lq";
    }
    return "?";
}

std::vector<double> sample_alpha(const AlphaSpec& spec, const AgeGrid& grid) {
    if (spec.kind == AlphaSpec::Kind::Explicit) {
        if (spec.values.size() != grid.size())
            throw GridError("explicit alpha has the wrong number of cells");
        return spec.values;
    }
    std::vector<double> out(grid.size());
    for (int j = 0; j < grid.n_cells(); ++j)
        out[j] = spec.scale * (1.0 - grid.center(j) / grid.s_max());
    out.back() = 0.0;
    return out;
}

namespace {

// Witnesses (a, b) with h0(u) >= a |u|_U^p + b. Returns false when none exist.
bool coercivity_witnesses(const CostSpec& cost, double p, double s_max, double& a, double& b) {
    const double w_min = std::min(cost.c0.w, cost.c1.w);
    const bool bounded = cost.c0.kind == ScalarConvexSpec::Kind::QuadraticBox &&
                         cost.c1.kind == ScalarConvexSpec::Kind::QuadraticBox;
    if (p < 2.0) {
        // 0.5 w r^2 >= 0.5 w (r^p - m) with m = max_r (r^p - r^2)
        const double r_star = std::pow(p / 2.0, 1.0 / (2.0 - p));
        const double m = std::pow(r_star, p) - r_star * r_star;
        a = 0.5 * w_min;
        b = -0.5 * w_min * m;
        return true;
    }
    if (p == 2.0) {
        a = 0.5 * w_min;
        b = 0.0;
        return true;
    }
    if (!bounded) return false;
    // feasible set has |u|_U <= rho, and r^p <= rho^{p-2} r^2 there
    const double rho = std::sqrt(cost.c0.bound * cost.c0.bound + s_max * cost.c1.bound * cost.c1.bound);
    a = 0.5 * w_min * std::pow(rho, 2.0 - p);
    b = 0.0;
    return true;
}

void validate_scalar_cost(const ScalarConvexSpec& c, const char* name) {
    if (!(std::isfinite(c.w) && c.w > 0.0))
        throw ConfigError(std::string(name) + ": weight must be positive");
    if (c.kind == ScalarConvexSpec::Kind::QuadraticBox && !(std::isfinite(c.bound) && c.bound > 0.0))
        throw ConfigError(std::string(name) + ": box bound must be positive");
}

}  // namespace

VintageModel::VintageModel(const ModelConfig& config, std::string name)
    : name_(std::move(name)), config_(config) {
    for (auto [v, what] : {std::pair{config.s_max, "s_max"}, {config.mu, "mu"},
                           {config.lambda, "lambda"}, {config.p, "p"}, {config.omega, "omega"},
                           {config.revenue.eta, "revenue.eta"}, {config.revenue.beta, "revenue.beta"},
                           {config.terminal.weight, "terminal.weight"}})
        require_finite(v, what);

    grid_ = AgeGrid(config.s_max, config.n_cells);

    if (config.mu < 0.0) throw ConfigError("depreciation rate must be non-negative");
    if (!(config.p > 1.0)) throw RegimeViolation("coercivity exponent p must exceed 1");
    if (!(config.lambda > 0.0)) throw RegimeViolation("discount rate must be positive");
    if (config.omega < -config.mu)
        throw RegimeViolation("omega must bound the semigroup type -mu from above");
    if (!(config.lambda > config.omega * std::max(2.0, q())))
        throw RegimeViolation("lambda must exceed omega * max(2, q)");

    validate_scalar_cost(config.cost.c0, "c0");
    validate_scalar_cost(config.cost.c1, "c1");
    const auto& rev = config.revenue;
    if (rev.beta < 0.0) throw ConfigError("revenue curvature beta must be non-negative");
    if (rev.kind == RevenueSpec::Kind::SaturatedQuadratic) {
        if (!(rev.q_hat > 0.0)) throw ConfigError("saturation level must be positive");
        if (rev.beta * rev.q_hat > 2.0 * rev.eta)
            throw ConfigError("saturated revenue must be Lipschitz with constant eta");
    }
    if (config.terminal.kind == TerminalSpec::Kind::OutputQuadratic && config.terminal.weight < 0.0)
        throw ConfigError("terminal weight must be non-negative");

    alpha_ = sample_alpha(config.alpha, grid_);
    for (double a : alpha_) require_finite(a, "alpha");
    if (std::abs(alpha_.back()) > 1e-14) throw AlphaBoundary("alpha must vanish in the last age cell");

    if (!coercivity_witnesses(config.cost, config.p, config.s_max, coercivity_a_, coercivity_b_))
        throw RegimeViolation("unbounded quadratic costs cannot be coercive with p > 2");

    const bool a_holds = config.p > 2.0 && config.lambda > std::max(2.0 * config.omega, config.omega);
    const bool b_holds = config.lambda > config.omega && rev.sublinear() &&
                         config.terminal.kind == TerminalSpec::Kind::Zero;
    if (a_holds) {
        regime_ = Regime::ConstrainedControl;
    } else if (b_holds) {
        regime_ = Regime::SublinearRevenue;
    } else if (is_lq() && config.p == 2.0) {
        regime_ = Regime::LinearQuadratic;
    } else {
        throw RegimeViolation("instance satisfies neither the constrained-control nor the "
                              "sublinear-revenue hypotheses");
    }
}

bool VintageModel::is_lq() const {
    return config_.revenue.kind == RevenueSpec::Kind::Quadratic &&
           config_.cost.c0.kind == ScalarConvexSpec::Kind::Quadratic &&
           config_.cost.c1.kind == ScalarConvexSpec::Kind::Quadratic &&
           config_.terminal.kind == TerminalSpec::Kind::Zero;
}

VintageModel VintageModel::refined(int n_cells) const {
    if (config_.alpha.kind == AlphaSpec::Kind::Explicit)
        throw GridError("explicit alpha cannot be resampled");
    ModelConfig c = config_;
    c.n_cells = n_cells;
    return VintageModel(c, name_);
}

VintageModel build_model(const ModelConfig& config, std::string name) {
    return VintageModel(config, std::move(name));
}

ModelConfig canonical_config(const std::string& name, int n_cells) {
    ModelConfig c;
    c.s_max = 1.0;
    c.n_cells = n_cells;
    c.mu = 0.5;
    c.lambda = 1.0;
    c.p = 2.0;
    c.omega = 0.0;
    c.alpha = AlphaSpec{AlphaSpec::Kind::LinearDecay, 2.0, {}};
    c.revenue = RevenueSpec::quadratic(1.0, 1.0);
    c.cost = CostSpec{ScalarConvexSpec::quadratic(1.0), ScalarConvexSpec::quadratic(1.0)};
    c.terminal = TerminalSpec{};
    if (name == "lq-1") return c;
    if (name == "box-1") {
        c.p = 3.0;
        c.cost = CostSpec{ScalarConvexSpec::box(1.0, 1.0), ScalarConvexSpec::box(1.0, 1.0)};
        return c;
    }
    if (name == "null-1") {
        c.revenue = RevenueSpec::zero();
        return c;
    }
    if (name == "sat-1") {
        c.revenue = RevenueSpec::saturated(1.0, 1.0, 0.5);
        return c;
    }
    throw ConfigError("unknown canonical instance '" + name + "'");
}

VintageModel canonical_instance(const std::string& name, int n_cells) {
    return VintageModel(canonical_config(name, n_cells), name);
}

std::vector<VintageModel> canonical_instances(int n_cells) {
    std::vector<VintageModel> out;
    for (const char* name : {"lq-1", "box-1", "null-1", "sat-1"})
        out.push_back(canonical_instance(name, n_cells));
    return out;
}

}  // namespace vintage

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vintage/errors.hpp"

namespace vintage {

/// Uniform cell-centered grid on the age interval [0, s_max].
class AgeGrid {
public:
    AgeGrid() = default;
    /// Throws GridError unless s_max > 0 is finite and n_cells >= 2.
    AgeGrid(double s_max, int n_cells);

    double s_max() const { return s_max_; }
    int n_cells() const { return n_cells_; }
    std::size_t size() const { return static_cast<std::size_t>(n_cells_); }
    double cell_width() const { return cell_width_; }
    double center(int j) const { return (j + 0.5) * cell_width_; }

    bool operator==(const AgeGrid& other) const {
        return s_max_ == other.s_max_ && n_cells_ == other.n_cells_;
    }

private:
    double s_max_ = 1.0;
    int n_cells_ = 2;
    double cell_width_ = 0.5;
};

/// Capital density per age cell, y(tau, .) in L2(0, s_max).
struct CapitalState {
    std::vector<double> values;
    AgeGrid grid;

    CapitalState() = default;
    CapitalState(AgeGrid g, std::vector<double> v);
    static CapitalState zeros(const AgeGrid& g);
    static CapitalState constant(const AgeGrid& g, double c);

    std::size_t size() const { return values.size(); }
    /// sqrt(ds * sum y_j^2)
    double h_norm() const;
    bool all_finite() const;
};

/// H inner product ds * sum a_j b_j.
double h_inner(std::span<const double> a, std::span<const double> b, double ds);
double h_norm(std::span<const double> a, double ds);

/// Investment pair u = (u0, u1): boundary rate plus distributed rate per cell.
struct Control {
    double u0 = 0.0;
    std::vector<double> u1;

    static Control zeros(std::size_t n) { return Control{0.0, std::vector<double>(n, 0.0)}; }
    /// sqrt(u0^2 + ds * sum u1_j^2)
    double u_norm(double ds) const;
};

/// <u, v>_U = u0 v0 + ds sum u1_j v1_j
double u_inner(const Control& a, const Control& b, double ds);

/// Piecewise-constant controls on [t_start, t_start + steps * dt). Row k is stored
/// contiguously as [u0, u1_0, ..., u1_{n-1}].
class ControlPath {
public:
    ControlPath() = default;
    ControlPath(double t_start, double dt, std::size_t steps, std::size_t n_cells);

    double t_start() const { return t_start_; }
    double dt() const { return dt_; }
    double t_end() const { return t_start_ + static_cast<double>(steps_) * dt_; }
    double time(std::size_t k) const { return t_start_ + static_cast<double>(k) * dt_; }
    std::size_t steps() const { return steps_; }
    std::size_t n_cells() const { return n_cells_; }
    std::size_t stride() const { return n_cells_ + 1; }

    double& u0(std::size_t k) { return data_[k * stride()]; }
    double u0(std::size_t k) const { return data_[k * stride()]; }
    std::span<double> u1(std::size_t k) { return {data_.data() + k * stride() + 1, n_cells_}; }
    std::span<const double> u1(std::size_t k) const {
        return {data_.data() + k * stride() + 1, n_cells_};
    }
    std::span<double> row(std::size_t k) { return {data_.data() + k * stride(), stride()}; }
    std::span<const double> row(std::size_t k) const {
        return {data_.data() + k * stride(), stride()};
    }

    Control control(std::size_t k) const;
    void set_control(std::size_t k, const Control& c);

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    /// ( sum_k e^{-lambda tau_k} |u_k|_U^p dt )^{1/p}
    double weighted_norm(double lambda, double p, double ds) const;

private:
    double t_start_ = 0.0;
    double dt_ = 0.0;
    std::size_t steps_ = 0;
    std::size_t n_cells_ = 0;
    std::vector<double> data_;
};

/// Revenue R(Q) of the output rate Q.
struct RevenueSpec {
    enum class Kind { Quadratic, SaturatedQuadratic };
    Kind kind = Kind::Quadratic;
    double eta = 0.0;
    double beta = 0.0;
    double q_hat = 0.0;  // SaturatedQuadratic only

    static RevenueSpec quadratic(double eta, double beta) {
        return {Kind::Quadratic, eta, beta, 0.0};
    }
    static RevenueSpec saturated(double eta, double beta, double q_hat) {
        return {Kind::SaturatedQuadratic, eta, beta, q_hat};
    }
    static RevenueSpec zero() { return quadratic(0.0, 0.0); }

    double value(double q) const;
    double slope(double q) const;
    /// sup |R''|, used for curvature bounds of g0.
    double max_curvature() const { return beta; }
    /// |R(Q)| <= C (1 + |Q|)
    bool sublinear() const { return kind == Kind::SaturatedQuadratic || beta == 0.0; }
    bool is_zero() const { return eta == 0.0 && beta == 0.0; }
};

/// Scalar convex cost c(v): Quadratic 0.5 w v^2, or QuadraticBox which is +inf outside [-M, M].
struct ScalarConvexSpec {
    enum class Kind { Quadratic, QuadraticBox };
    Kind kind = Kind::Quadratic;
    double w = 1.0;
    double bound = 0.0;  // M, QuadraticBox only

    static ScalarConvexSpec quadratic(double w) { return {Kind::Quadratic, w, 0.0}; }
    static ScalarConvexSpec box(double w, double m) { return {Kind::QuadraticBox, w, m}; }

    bool feasible(double v) const { return kind == Kind::Quadratic || (v >= -bound && v <= bound); }
    /// Finite part 0.5 w v^2; callers check feasible() separately.
    double value(double v) const { return 0.5 * w * v * v; }
    double conjugate(double q) const;
    double conjugate_prime(double q) const;
    double project(double v) const { return kind == Kind::QuadraticBox ? std::clamp(v, -bound, bound) : v; }
};

struct CostSpec {
    ScalarConvexSpec c0;
    ScalarConvexSpec c1;
    bool boxed() const {
        return c0.kind == ScalarConvexSpec::Kind::QuadraticBox ||
               c1.kind == ScalarConvexSpec::Kind::QuadraticBox;
    }
};

/// Terminal cost phi0. OutputQuadratic is 0.5 * weight * Q(y)^2.
struct TerminalSpec {
    enum class Kind { Zero, OutputQuadratic };
    Kind kind = Kind::Zero;
    double weight = 0.0;
};

/// Which standing hypothesis set the instance satisfies.
enum class Regime {
    ConstrainedControl,  // 8.a: p > 2, lambda > max(2 omega, omega)
    SublinearRevenue,    // 8.b: lambda > omega, g0 and phi0 of linear growth
    LinearQuadratic,     // quadratic revenue and costs, p = 2 (Riccati theory)
};

std::string to_string(Regime r);

struct AlphaSpec {
    enum class Kind { LinearDecay, Explicit };
    Kind kind = Kind::LinearDecay;
    double scale = 2.0;          // LinearDecay: alpha(s) = scale * (1 - s / s_max)
    std::vector<double> values;  // Explicit
};

struct ModelConfig {
    double s_max = 1.0;
    int n_cells = 200;
    double mu = 0.5;
    double lambda = 1.0;
    double p = 2.0;
    double omega = 0.0;
    AlphaSpec alpha;
    RevenueSpec revenue;
    CostSpec cost{ScalarConvexSpec::quadratic(1.0), ScalarConvexSpec::quadratic(1.0)};
    TerminalSpec terminal;
};

/// Validated problem data. Immutable after construction.
class VintageModel {
public:
    /// Validates the config; throws RegimeViolation, GridError or AlphaBoundary.
    explicit VintageModel(const ModelConfig& config, std::string name = {});

    const std::string& name() const { return name_; }
    const ModelConfig& config() const { return config_; }
    const AgeGrid& grid() const { return grid_; }
    double ds() const { return grid_.cell_width(); }
    double dt() const { return grid_.cell_width(); }
    std::size_t n_cells() const { return grid_.size(); }

    double mu() const { return config_.mu; }
    double lambda() const { return config_.lambda; }
    double p() const { return config_.p; }
    double q() const { return config_.p / (config_.p - 1.0); }
    double omega() const { return config_.omega; }
    const std::vector<double>& alpha() const { return alpha_; }
    const RevenueSpec& revenue() const { return config_.revenue; }
    const CostSpec& cost() const { return config_.cost; }
    const TerminalSpec& terminal() const { return config_.terminal; }
    Regime regime() const { return regime_; }

    /// Witnesses for h0(u) >= a |u|_U^p + b.
    double coercivity_a() const { return coercivity_a_; }
    double coercivity_b() const { return coercivity_b_; }

    /// Quadratic revenue and costs with zero terminal cost.
    bool is_lq() const;

    /// Same problem data on a grid with a different cell count (alpha resampled for LinearDecay).
    VintageModel refined(int n_cells) const;

private:
    std::string name_;
    ModelConfig config_;
    AgeGrid grid_;
    std::vector<double> alpha_;
    Regime regime_ = Regime::LinearQuadratic;
    double coercivity_a_ = 0.0;
    double coercivity_b_ = 0.0;
};

VintageModel build_model(const ModelConfig& config, std::string name = {});

/// Named fixtures: "lq-1", "box-1", "null-1", "sat-1".
std::vector<VintageModel> canonical_instances(int n_cells = 200);
VintageModel canonical_instance(const std::string& name, int n_cells = 200);
ModelConfig canonical_config(const std::string& name, int n_cells = 200);

/// Linear-decay alpha sampled at cell centers with the last cell zeroed.
std::vector<double> sample_alpha(const AlphaSpec& spec, const AgeGrid& grid);

}  // namespace vintage

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "vintage/model.hpp"

namespace vintage {

/// Per-step weights of the exact-characteristics propagator with dt = ds.
struct StepCoefficients {
    double decay = 1.0;       // e^{-mu ds}
    double inflow = 1.0;      // e^{-mu ds / 2}
    double kappa = 0.0;       // (1 - e^{-mu ds}) / mu
    double kappa_half = 0.0;  // (1 - e^{-mu ds / 2}) / mu

    static StepCoefficients make(double mu, double ds);
    static StepCoefficients make(const VintageModel& m) { return make(m.mu(), m.ds()); }
};

/// kappa(mu, h) = (1 - e^{-mu h}) / mu, with limit h at mu = 0.
double kappa(double mu, double h);

/// States y_0..y_N at times t_start + k dt, stored row-major.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(AgeGrid grid, double t_start, double dt, std::size_t steps);

    const AgeGrid& grid() const { return grid_; }
    double t_start() const { return t_start_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    std::size_t n_cells() const { return grid_.size(); }
    double time(std::size_t k) const { return t_start_ + static_cast<double>(k) * dt_; }

    std::span<double> state(std::size_t k) { return {data_.data() + k * n_cells(), n_cells()}; }
    std::span<const double> state(std::size_t k) const {
        return {data_.data() + k * n_cells(), n_cells()};
    }
    CapitalState state_copy(std::size_t k) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    AgeGrid grid_;
    double t_start_ = 0.0;
    double dt_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<double> data_;
};

/// Uncontrolled semigroup e^{tau A}: shift by tau with decay e^{-mu tau}, zero inflow.
/// Throws MisalignedTau unless tau is a non-negative multiple of the cell width.
CapitalState apply_semigroup(const CapitalState& x, double tau, double mu);

/// One exact-characteristics step of length ds.
CapitalState mild_step(const CapitalState& y, const Control& u, const VintageModel& model);

/// Span form of mild_step; out must not alias y.
void mild_step(std::span<const double> y, double u0, std::span<const double> u1,
               const StepCoefficients& c, std::span<double> out);

/// Controlled mild solution from x under u. Throws NonFiniteState on blow-up.
Trajectory solve_forward(const CapitalState& x, const ControlPath& u, const VintageModel& model);
/// solve_forward into an existing trajectory, reusing its storage when the shape matches.
void solve_forward_into(const CapitalState& x, const ControlPath& u, const VintageModel& model,
                        Trajectory& out);

/// Time-stepping reference of solve_forward (calls mild_step once per step).
Trajectory solve_forward_serial(const CapitalState& x, const ControlPath& u,
                                const VintageModel& model);

/// Q = ds * sum alpha_j y_j
double output_Q(std::span<const double> y, std::span<const double> alpha, double ds);

/// CSV with header "time,age,value", row-major by time.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Throws GridError when the path does not match the model grid.
void check_alignment(const ControlPath& u, const VintageModel& model);

}  // namespace vintage

#include "vintage/sampling.hpp"

#include <cmath>
#include <numbers>

namespace vintage {

CapitalState random_state(const AgeGrid& grid, std::mt19937_64& rng, double norm) {
    std::normal_distribution<double> normal;
    std::vector<double> coef(6);
    for (std::size_t m = 0; m < coef.size(); ++m) coef[m] = normal(rng) / (1.0 + static_cast<double>(m));
    std::vector<double> v(grid.size());
    for (int j = 0; j < grid.n_cells(); ++j) {
        const double s = grid.center(j) / grid.s_max();
        double acc = 0.0;
        for (std::size_t m = 0; m < coef.size(); ++m)
            acc += coef[m] * std::cos(static_cast<double>(m) * std::numbers::pi * s);
        v[j] = acc;
    }
    CapitalState x(grid, std::move(v));
    const double current = x.h_norm();
    if (current > 0.0)
        for (double& val : x.values) val *= norm / current;
    return x;
}

CapitalState random_state_in_ball(const AgeGrid& grid, std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double norm = radius * unit(rng);
    return random_state(grid, rng, norm);
}

ControlPath random_control_path(double t_start, double dt, std::size_t steps, const AgeGrid& grid,
                                std::mt19937_64& rng, double scale) {
    const std::size_t n_cells = grid.size();
    std::normal_distribution<double> normal;
    ControlPath u(t_start, dt, steps, n_cells);
    const double f0 = normal(rng), f1 = normal(rng), a = normal(rng), b = normal(rng);
    const double horizon = std::max(1.0, static_cast<double>(steps) * dt);
    for (std::size_t k = 0; k < steps; ++k) {
        const double tau = static_cast<double>(k) * dt / horizon;
        auto row = u.row(k);
        row[0] = std::sin(3.0 * tau * f0 + a);
        for (std::size_t j = 0; j < n_cells; ++j) {
            const double s = grid.center(static_cast<int>(j)) / grid.s_max();
            row[1 + j] = 0.5 * std::cos(2.0 * s * f1 + b + 2.0 * tau);
        }
        double sq = row[0] * row[0];
        for (std::size_t j = 0; j < n_cells; ++j) sq += grid.cell_width() * row[1 + j] * row[1 + j];
        const double amp = scale / std::max(1.0, std::sqrt(sq));
        for (double& v : row) v *= amp;
    }
    return u;
}

ControlPath random_direction(const ControlPath& like, double ds, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    ControlPath d(like.t_start(), like.dt(), like.steps(), like.n_cells());
    for (double& v : d.data()) v = normal(rng);
    const double nrm = d.weighted_norm(0.0, 2.0, ds);
    for (double& v : d.data()) v /= nrm;
    return d;
}

}  // namespace vintage

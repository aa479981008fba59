#pragma once

#include <random>

#include "vintage/model.hpp"

namespace vintage {

/// Smooth random state: a few random cosine modes scaled to |x|_H = norm.
CapitalState random_state(const AgeGrid& grid, std::mt19937_64& rng, double norm);

/// Random state with |x|_H uniform in [0, radius].
CapitalState random_state_in_ball(const AgeGrid& grid, std::mt19937_64& rng, double radius);

/// Control path with slowly varying random rows of U-norm at most `scale`.
ControlPath random_control_path(double t_start, double dt, std::size_t steps, const AgeGrid& grid,
                                std::mt19937_64& rng, double scale);

/// Gaussian direction with unit undiscounted L^2(U) norm, for finite-difference checks.
ControlPath random_direction(const ControlPath& like, double ds, std::mt19937_64& rng);

}  // namespace vintage

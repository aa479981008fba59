#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "vintage/model.hpp"

namespace vintage {

/// Element of V on the grid: cell values plus the boundary trace at age zero.
struct VElement {
    std::vector<double> values;
    std::optional<double> trace;

    /// Attaches the trace by linear extrapolation p(0) = p_0 - (p_1 - p_0) / 2.
    static VElement with_trace(std::vector<double> values);
    static double extrapolate_trace(std::span<const double> values);
};

/// Extended-real value: +inf is represented by feasible == false.
struct ExtendedValue {
    double value = 0.0;
    bool feasible = true;
};

/// Control cost h0 together with its conjugate h0* and (h0*)'. Dual controls share
/// Control's shape and pair with controls through <., .>_U.
class ConjugatePair {
public:
    ConjugatePair(CostSpec cost, double ds) : cost_(cost), ds_(ds) {}

    ExtendedValue h0(const Control& u) const;
    double h0_star(const Control& q) const;
    Control h0_star_prime(const Control& q) const;

    /// Row form [u0, u1...] used by the optimizer; infeasible rows report feasible == false.
    ExtendedValue h0(std::span<const double> row) const;

    const CostSpec& cost() const { return cost_; }
    double ds() const { return ds_; }
    /// Strong convexity modulus of h0 on its domain, in the U metric.
    double strong_convexity() const { return std::min(cost_.c0.w, cost_.c1.w); }

private:
    CostSpec cost_;
    double ds_;
};

ConjugatePair make_conjugate(const CostSpec& cost, double ds);
inline ConjugatePair make_conjugate(const VintageModel& m) { return make_conjugate(m.cost(), m.ds()); }

/// B*p = (p(0), p). Throws MissingTrace when the trace is absent.
Control adjoint_control(const VElement& p);

/// h0*(-B*p)
double hamiltonian(const VElement& p, const ConjugatePair& pair);

/// g0(y) = -R(Q(y))
double g0_eval(std::span<const double> y, const VintageModel& model);
/// H-representer of the derivative of g0: -R'(Q(y)) alpha
std::vector<double> g0_grad(std::span<const double> y, const VintageModel& model);

/// Terminal cost phi0 and its H-representer gradient.
double phi0_eval(std::span<const double> y, const VintageModel& model);
std::vector<double> phi0_grad(std::span<const double> y, const VintageModel& model);

}  // namespace vintage

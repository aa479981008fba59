#include "vintage/costs.hpp"

#include "vintage/transport.hpp"

namespace vintage {

double VElement::extrapolate_trace(std::span<const double> values) {
    if (values.size() < 2) throw GridError("trace extrapolation needs two cells");
    return values[0] - 0.5 * (values[1] - values[0]);
}

VElement VElement::with_trace(std::vector<double> values) {
    const double t = extrapolate_trace(values);
    return VElement{std::move(values), t};
}

ExtendedValue ConjugatePair::h0(std::span<const double> row) const {
    ExtendedValue out;
    if (!cost_.c0.feasible(row[0])) return {0.0, false};
    double acc = 0.0;
    for (std::size_t j = 1; j < row.size(); ++j) {
        if (!cost_.c1.feasible(row[j])) return {0.0, false};
        acc += cost_.c1.value(row[j]);
    }
    out.value = cost_.c0.value(row[0]) + ds_ * acc;
    return out;
}

ExtendedValue ConjugatePair::h0(const Control& u) const {
    std::vector<double> row(u.u1.size() + 1);
    row[0] = u.u0;
    std::copy(u.u1.begin(), u.u1.end(), row.begin() + 1);
    return h0(row);
}

double ConjugatePair::h0_star(const Control& q) const {
    double acc = 0.0;
    for (double v : q.u1) acc += cost_.c1.conjugate(v);
    return cost_.c0.conjugate(q.u0) + ds_ * acc;
}

Control ConjugatePair::h0_star_prime(const Control& q) const {
    Control out{cost_.c0.conjugate_prime(q.u0), std::vector<double>(q.u1.size())};
    for (std::size_t j = 0; j < q.u1.size(); ++j) out.u1[j] = cost_.c1.conjugate_prime(q.u1[j]);
    return out;
}

ConjugatePair make_conjugate(const CostSpec& cost, double ds) { return ConjugatePair(cost, ds); }

Control adjoint_control(const VElement& p) {
    if (!p.trace) throw MissingTrace("V-element carries no boundary trace");
    return Control{*p.trace, p.values};
}

double hamiltonian(const VElement& p, const ConjugatePair& pair) {
    Control q = adjoint_control(p);
    q.u0 = -q.u0;
    for (double& v : q.u1) v = -v;
    return pair.h0_star(q);
}

double g0_eval(std::span<const double> y, const VintageModel& model) {
    return -model.revenue().value(output_Q(y, model.alpha(), model.ds()));
}

std::vector<double> g0_grad(std::span<const double> y, const VintageModel& model) {
    const double slope = model.revenue().slope(output_Q(y, model.alpha(), model.ds()));
    std::vector<double> out(model.alpha());
    for (double& v : out) v *= -slope;
    return out;
}

double phi0_eval(std::span<const double> y, const VintageModel& model) {
    if (model.terminal().kind == TerminalSpec::Kind::Zero) return 0.0;
    const double q = output_Q(y, model.alpha(), model.ds());
    return 0.5 * model.terminal().weight * q * q;
}

std::vector<double> phi0_grad(std::span<const double> y, const VintageModel& model) {
    std::vector<double> out(model.n_cells(), 0.0);
    if (model.terminal().kind == TerminalSpec::Kind::Zero) return out;
    const double q = output_Q(y, model.alpha(), model.ds());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = model.terminal().weight * q * model.alpha()[j];
    return out;
}

}  // namespace vintage

#include "vintage/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace vintage {

namespace {

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos)
                throw ConfigError("trailing characters in CSV cell '" + cell + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("malformed CSV cell '" + cell + "'");
        }
    }
    return out;
}

}  // namespace

nlohmann::json report_to_json(const SolveReport& r, bool include_timing) {
    nlohmann::json j;
    j["value"] = r.value;
    j["iterations"] = r.iterations;
    j["prox_grad_norm"] = r.prox_grad_norm;
    j["epsilon"] = r.epsilon;
    j["converged"] = r.converged;
    j["step"] = r.step;
    if (include_timing) j["wall_time"] = r.wall_time;
    return j;
}

void write_json(std::ostream& os, const nlohmann::json& j) { os << j.dump(2) << '\n'; }

void write_control_csv(std::ostream& os, const ControlPath& u) {
    os << "time,u0";
    for (std::size_t j = 0; j < u.n_cells(); ++j) os << ",u1_" << j;
    os << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < u.steps(); ++k) {
        os << u.time(k);
        for (double v : u.row(k)) os << ',' << v;
        os << '\n';
    }
}

ControlPath read_control_csv(std::istream& is, const VintageModel& model) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("time,u0", 0) != 0)
        throw ConfigError("control CSV must start with a time,u0,... header");
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto row = parse_row(line);
        if (row.size() != model.n_cells() + 2) throw ConfigError("control CSV row has the wrong width");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("control CSV has no rows");
    const double t0 = rows.front()[0];
    ControlPath u(t0, model.dt(), rows.size(), model.n_cells());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (std::abs(rows[k][0] - u.time(k)) > 1e-9 * std::max(1.0, std::abs(u.time(k))))
            throw MisalignedTau("control CSV times are not spaced by the cell width");
        std::copy(rows[k].begin() + 1, rows[k].end(), u.row(k).begin());
    }
    return u;
}

void write_state_csv(std::ostream& os, const CapitalState& x) {
    os << "age,value\n" << std::setprecision(17);
    for (int j = 0; j < x.grid.n_cells(); ++j) os << x.grid.center(j) << ',' << x.values[j] << '\n';
}

CapitalState read_state_csv(std::istream& is, const AgeGrid& grid) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("age,value", 0) != 0)
        throw ConfigError("state CSV must start with an age,value header");
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto row = parse_row(line);
        if (row.size() != 2) throw ConfigError("state CSV rows need two columns");
        values.push_back(row[1]);
    }
    if (values.size() != grid.size()) throw GridError("state CSV does not match the model grid");
    return CapitalState(grid, std::move(values));
}

}  // namespace vintage

#include "vintage/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace vintage {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) throw ConfigError("unknown field '" + key + "' in " + where);
    }
}

double number(const json& j, const char* key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

std::string kind_of(const json& j, const std::string& where) {
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(where + ".kind must be a string");
    return j.at("kind").get<std::string>();
}

ScalarConvexSpec parse_scalar_cost(const json& j, const std::string& where) {
    require_object(j, where);
    reject_unknown(j, where, {"kind", "w", "M"});
    const std::string kind = kind_of(j, where);
    const double w = number(j, "w", where, 1.0);
    if (kind == "quadratic") {
        if (j.contains("M")) throw ConfigError(where + ".M only applies to quadratic_box");
        return ScalarConvexSpec::quadratic(w);
    }
    if (kind == "quadratic_box") {
        if (!j.contains("M")) throw ConfigError(where + ".M is required for quadratic_box");
        return ScalarConvexSpec::box(w, number(j, "M", where, 0.0));
    }
    throw ConfigError("unknown cost kind '" + kind + "' in " + where);
}

json scalar_cost_json(const ScalarConvexSpec& c) {
    if (c.kind == ScalarConvexSpec::Kind::Quadratic) return {{"kind", "quadratic"}, {"w", c.w}};
    return {{"kind", "quadratic_box"}, {"w", c.w}, {"M", c.bound}};
}

}  // namespace

ModelConfig parse_config(const json& j) {
    require_object(j, "config");
    reject_unknown(j, "config", {"s_max", "n_cells", "mu", "lambda", "p", "omega", "alpha",
                                 "revenue", "cost", "terminal"});
    ModelConfig c;
    c.s_max = number(j, "s_max", "config", c.s_max);
    if (j.contains("n_cells")) {
        if (!j.at("n_cells").is_number_integer()) throw ConfigError("config.n_cells must be an integer");
        c.n_cells = j.at("n_cells").get<int>();
    }
    c.mu = number(j, "mu", "config", c.mu);
    c.lambda = number(j, "lambda", "config", c.lambda);
    c.p = number(j, "p", "config", c.p);
    c.omega = number(j, "omega", "config", c.omega);

    if (j.contains("alpha")) {
        const json& a = j.at("alpha");
        require_object(a, "alpha");
        reject_unknown(a, "alpha", {"kind", "scale", "values"});
        const std::string kind = kind_of(a, "alpha");
        if (kind == "linear_decay") {
            c.alpha.kind = AlphaSpec::Kind::LinearDecay;
            c.alpha.scale = number(a, "scale", "alpha", 2.0);
        } else if (kind == "explicit") {
            c.alpha.kind = AlphaSpec::Kind::Explicit;
            if (!a.contains("values") || !a.at("values").is_array())
                throw ConfigError("alpha.values must be an array");
            for (const auto& v : a.at("values")) {
                if (!v.is_number()) throw ConfigError("alpha.values must hold numbers");
                c.alpha.values.push_back(v.get<double>());
            }
        } else {
            throw ConfigError("unknown alpha kind '" + kind + "'");
        }
    }

    if (j.contains("revenue")) {
        const json& r = j.at("revenue");
        require_object(r, "revenue");
        reject_unknown(r, "revenue", {"kind", "eta", "beta", "q_hat"});
        const std::string kind = kind_of(r, "revenue");
        const double eta = number(r, "eta", "revenue", 0.0);
        const double beta = number(r, "beta", "revenue", 0.0);
        if (kind == "quadratic") {
            c.revenue = RevenueSpec::quadratic(eta, beta);
        } else if (kind == "saturated_quadratic") {
            if (!r.contains("q_hat")) throw ConfigError("revenue.q_hat is required for saturated_quadratic");
            c.revenue = RevenueSpec::saturated(eta, beta, number(r, "q_hat", "revenue", 0.0));
        } else if (kind == "zero") {
            c.revenue = RevenueSpec::zero();
        } else {
            throw ConfigError("unknown revenue kind '" + kind + "'");
        }
    }

    if (j.contains("cost")) {
        const json& k = j.at("cost");
        require_object(k, "cost");
        reject_unknown(k, "cost", {"c0", "c1"});
        if (k.contains("c0")) c.cost.c0 = parse_scalar_cost(k.at("c0"), "cost.c0");
        if (k.contains("c1")) c.cost.c1 = parse_scalar_cost(k.at("c1"), "cost.c1");
    }

    if (j.contains("terminal")) {
        const json& t = j.at("terminal");
        require_object(t, "terminal");
        reject_unknown(t, "terminal", {"kind", "weight"});
        const std::string kind = kind_of(t, "terminal");
        if (kind == "zero") {
            c.terminal = TerminalSpec{};
        } else if (kind == "output_quadratic") {
            c.terminal = TerminalSpec{TerminalSpec::Kind::OutputQuadratic, number(t, "weight", "terminal", 0.0)};
        } else {
            throw ConfigError("unknown terminal kind '" + kind + "'");
        }
    }
    return c;
}

ModelConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

ModelConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

json config_to_json(const ModelConfig& c) {
    json j;
    j["s_max"] = c.s_max;
    j["n_cells"] = c.n_cells;
    j["mu"] = c.mu;
    j["lambda"] = c.lambda;
    j["p"] = c.p;
    j["omega"] = c.omega;
    if (c.alpha.kind == AlphaSpec::Kind::LinearDecay)
        j["alpha"] = {{"kind", "linear_decay"}, {"scale", c.alpha.scale}};
    else
        j["alpha"] = {{"kind", "explicit"}, {"values", c.alpha.values}};
    if (c.revenue.kind == RevenueSpec::Kind::Quadratic)
        j["revenue"] = {{"kind", "quadratic"}, {"eta", c.revenue.eta}, {"beta", c.revenue.beta}};
    else
        j["revenue"] = {{"kind", "saturated_quadratic"}, {"eta", c.revenue.eta},
                        {"beta", c.revenue.beta}, {"q_hat", c.revenue.q_hat}};
    j["cost"] = {{"c0", scalar_cost_json(c.cost.c0)}, {"c1", scalar_cost_json(c.cost.c1)}};
    if (c.terminal.kind == TerminalSpec::Kind::Zero)
        j["terminal"] = {{"kind", "zero"}};
    else
        j["terminal"] = {{"kind", "output_quadratic"}, {"weight", c.terminal.weight}};
    return j;
}

VintageModel load_model(const std::string& name_or_path, int n_cells) {
    for (const char* name : {"lq-1", "box-1", "null-1", "sat-1"})
        if (name_or_path == name) return canonical_instance(name_or_path, n_cells);
    if (!std::filesystem::exists(name_or_path))
        throw ConfigError("'" + name_or_path + "' is neither a canonical instance nor a file");
    const std::string stem = std::filesystem::path(name_or_path).stem().string();
    return build_model(load_config_file(name_or_path), stem);
}

}  // namespace vintage

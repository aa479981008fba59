#include "vintage/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vintage/config.hpp"
#include "vintage/estimates.hpp"
#include "vintage/feedback.hpp"
#include "vintage/hjb.hpp"
#include "vintage/sampling.hpp"
#include "vintage/serialize.hpp"
#include "vintage/value.hpp"

namespace vintage::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

AuditResult verdict(std::string name, double margin, std::string detail = {}) {
    return AuditResult{std::move(name), margin, margin >= 0.0, std::move(detail)};
}

ValueOptions value_options(const AuditContext& ctx) {
    ValueOptions opts;
    opts.tol = ctx.tol;
    return opts;
}

std::unique_ptr<GradientProvider> make_provider(const VintageModel& model, const ValueOptions& opts) {
    if (model.is_lq()) return std::make_unique<RiccatiAffineProvider>(riccati_solve(model));
    return std::make_unique<OnDemandProvider>(model, opts);
}

double closed_loop_window(const AuditContext& ctx) {
    const double t = ctx.horizon > 0.0 ? ctx.horizon : 10.0 / ctx.model.lambda();
    return std::max(1.0, std::round(t / ctx.model.dt())) * ctx.model.dt();
}

AuditResult audit_riccati(const AuditContext& ctx) {
    const auto& m = ctx.model;
    if (!m.is_lq()) return verdict("riccati_equivalence", 0.0, "not an LQ instance");
    const RiccatiSolution sol = riccati_solve(m);
    std::mt19937_64 rng(ctx.seed);
    std::vector<CapitalState> xs{CapitalState::constant(m.grid(), 1.0)};
    for (int i = 0; i < 3; ++i) xs.push_back(random_state_in_ball(m.grid(), rng, 1.0));
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& x : xs) {
        const double psi = psi_infinity(x, m, value_options(ctx)).limit;
        const double nx = x.h_norm();
        margin = std::min(margin, 1e-3 * (1.0 + nx * nx) - std::abs(psi - sol.value(x.values)));
    }
    return verdict("riccati_equivalence", margin);
}

AuditResult audit_t_independence(const AuditContext& ctx) {
    const auto x = CapitalState::constant(ctx.model.grid(), 1.0);
    return verdict("t_independence", 1e-8 - t_independence_residual(x, 2.0, ctx.model));
}

AuditResult audit_scaling(const AuditContext& ctx) {
    const auto x = CapitalState::constant(ctx.model.grid(), 1.0);
    double worst = 0.0;
    for (double t : {0.5, 1.0}) worst = std::max(worst, scaling_law_check(x, t, ctx.model, value_options(ctx)));
    return verdict("scaling_law", 1e-6 - worst);
}

AuditResult audit_convergence(const AuditContext& ctx) {
    const auto x = CapitalState::constant(ctx.model.grid(), 1.0);
    const ValueProbe probe = psi_infinity(x, ctx.model, value_options(ctx));
    const double kappa = fitted_decay_rate(probe);
    if (!std::isfinite(kappa)) return verdict("value_convergence", 0.0, "deltas vanish");
    return verdict("value_convergence", kappa - 0.5 * ctx.model.lambda());
}

AuditResult audit_dpp(const AuditContext& ctx) {
    const auto x = CapitalState::constant(ctx.model.grid(), 1.0);
    return verdict("dpp", 1e-4 - dpp_residual(x, 1.0, 4.0, ctx.model, 1e-8));
}

AuditResult audit_hjb(const AuditContext& ctx) {
    const auto& m = ctx.model;
    ValueFn value;
    GradFn grad;
    std::optional<RiccatiSolution> sol;
    if (m.is_lq()) {
        sol = riccati_solve(m);
        value = [&](std::span<const double> v) { return sol->value(v); };
        grad = [&](std::span<const double> v) { return sol->gradient(v); };
    } else {
        const ValueOptions opts = value_options(ctx);
        value = [&m, opts](std::span<const double> v) {
            return psi_infinity(CapitalState(m.grid(), {v.begin(), v.end()}), m, opts).limit;
        };
        grad = [&m, opts](std::span<const double> v) {
            return grad_psi_infinity(CapitalState(m.grid(), {v.begin(), v.end()}), m, opts);
        };
    }
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& x : hjb_test_states(m.grid())) {
        const double nx = x.h_norm();
        margin = std::min(margin, 5e-3 * (1.0 + nx * nx) - std::abs(hjb_residual(x.values, value, grad, m)));
    }
    return verdict("hjb_residual", margin, m.is_lq() ? "riccati pair" : "limit pair");
}

AuditResult audit_verification(const AuditContext& ctx) {
    const auto& m = ctx.model;
    const ValueOptions opts = value_options(ctx);
    const auto x = CapitalState::constant(m.grid(), 1.0);
    const auto provider = make_provider(m, opts);
    const ClosedLoopResult loop = closed_loop_solve(x, closed_loop_window(ctx), *provider, m);
    const auto gaps = verification_gap(loop.trajectory, loop.control, *provider, m);
    const double min_gap = *std::min_element(gaps.begin(), gaps.end());
    const double total = total_gap(gaps, m.dt());
    const double cost = evaluate_objective(loop.control, loop.trajectory, m);
    const double psi = psi_infinity(x, m, opts).limit;
    const double margin = std::min({min_gap + 1e-12, 1e-4 - total, 1e-3 * std::abs(psi) - std::abs(cost - psi)});
    return verdict("verification_identity", margin, provider->kind());
}

AuditResult audit_gradient(const AuditContext& ctx) {
    const auto& m = ctx.model;
    std::mt19937_64 rng(ctx.seed);
    const auto x = CapitalState::constant(m.grid(), 1.0);
    const std::size_t steps = aligned_steps(1.0, m.dt());
    ControlPath u = random_control_path(0.0, m.dt(), steps, m.grid(), rng, 0.3);
    const Trajectory traj = solve_forward(x, u, m);
    const ControlPath g = objective_gradient(u, traj, solve_adjoint(traj, m, traj.time(steps)), m);
    const double h = 1e-4;
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const ControlPath d = random_direction(u, m.ds(), rng);
        ControlPath up = u, um = u;
        for (std::size_t k = 0; k < u.data().size(); ++k) {
            up.data()[k] += h * d.data()[k];
            um.data()[k] -= h * d.data()[k];
        }
        const double fd = (evaluate_objective(up, solve_forward(x, up, m), m) -
                           evaluate_objective(um, solve_forward(x, um, m), m)) / (2.0 * h);
        const double an = path_pairing(g, d, m.ds());
        worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
    }
    return verdict("gradient_check", 1e-6 - worst);
}

AuditResult audit_holder(const AuditContext& ctx) {
    const auto& m = ctx.model;
    const ThetaParams params = ThetaParams::from(m);
    std::mt19937_64 rng(ctx.seed);
    std::uniform_int_distribution<std::size_t> len(1, 400);
    std::uniform_int_distribution<std::size_t> offset(0, 400);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const double t0 = static_cast<double>(offset(rng)) * m.dt();
        const ControlPath u = random_control_path(t0, m.dt(), len(rng), m.grid(), rng, 1.0);
        margin = std::min(margin, check_holder_bound(u, params, m.ds()).margin + 1e-12);
    }
    return verdict("holder_bound", margin);
}

AuditResult audit_state_bound(const AuditContext& ctx) {
    const auto& m = ctx.model;
    std::mt19937_64 rng(ctx.seed);
    const std::size_t steps = aligned_steps(2.0, m.dt());
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const CapitalState x = random_state_in_ball(m.grid(), rng, 2.0);
        ControlPath u = random_control_path(0.0, m.dt(), steps, m.grid(), rng, 1.0);
        const Trajectory traj = solve_forward(x, u, m);
        margin = std::min(margin, check_state_bound(x, u, traj, m).margin + 1e-12);
    }
    return verdict("state_bound", margin);
}

AuditResult audit_constraints(const AuditContext& ctx) {
    const auto& m = ctx.model;
    if (!m.cost().boxed()) return verdict("constraint_respect", 0.0, "no box constraints");
    std::mt19937_64 rng(ctx.seed);
    double worst = 0.0;
    auto excess = [&](double v, const ScalarConvexSpec& c) {
        if (c.kind != ScalarConvexSpec::Kind::QuadraticBox) return 0.0;
        return std::max(0.0, std::abs(v) - c.bound);
    };
    auto scan = [&](std::span<const double> row) {
        worst = std::max(worst, excess(row[0], m.cost().c0));
        for (std::size_t j = 1; j < row.size(); ++j) worst = std::max(worst, excess(row[j], m.cost().c1));
    };
    const auto pair = make_conjugate(m);
    OnDemandProvider provider(m, value_options(ctx));
    for (int i = 0; i < 3; ++i) {
        const CapitalState x = random_state(m.grid(), rng, 10.0);
        SolverOptions opts;
        const auto sol = solve_finite_horizon(x, 2.0, m, opts);
        for (std::size_t k = 0; k < sol.control.steps(); ++k) scan(sol.control.row(k));
        const Control u = feedback_control(x.values, provider, pair);
        std::vector<double> row{u.u0};
        row.insert(row.end(), u.u1.begin(), u.u1.end());
        scan(row);
    }
    return verdict("constraint_respect", -worst);
}

json audit_json(const AuditResult& r) {
    json j;
    j["name"] = r.name;
    j["margin"] = std::isfinite(r.margin) ? json(r.margin) : json(nullptr);
    j["pass"] = r.pass;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

void emit(const json& j, const std::string& out_dir, const std::string& file, std::ostream& out) {
    if (out_dir.empty()) {
        write_json(out, j);
        return;
    }
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / file);
    write_json(f, j);
}

}  // namespace

const std::vector<Audit>& audit_registry() {
    static const std::vector<Audit> registry{
        {"riccati_equivalence", audit_riccati},
        {"t_independence", audit_t_independence},
        {"scaling_law", audit_scaling},
        {"value_convergence", audit_convergence},
        {"dpp", audit_dpp},
        {"hjb_residual", audit_hjb},
        {"verification_identity", audit_verification},
        {"gradient_check", audit_gradient},
        {"holder_bound", audit_holder},
        {"state_bound", audit_state_bound},
        {"constraint_respect", audit_constraints},
    };
    return registry;
}

std::vector<AuditResult> run_audits(const AuditContext& ctx) {
    std::vector<AuditResult> out;
    for (const auto& a : audit_registry()) {
        try {
            out.push_back(a.run(ctx));
        } catch (const VintageError& e) {
            out.push_back(AuditResult{a.name, -std::numeric_limits<double>::infinity(), false, e.what()});
        }
    }
    return out;
}

CapitalState resolve_state(const std::string& spec, const AgeGrid& grid) {
    if (spec == "ones") return CapitalState::constant(grid, 1.0);
    if (spec == "zero") return CapitalState::zeros(grid);
    if (spec == "bump") {
        std::vector<double> v(grid.size());
        for (int j = 0; j < grid.n_cells(); ++j) {
            const double z = (grid.center(j) / grid.s_max() - 0.3) / 0.1;
            v[j] = std::exp(-z * z);
        }
        return CapitalState(grid, std::move(v));
    }
    std::ifstream in(spec);
    if (!in) throw ConfigError("--x must be ones, zero, bump or a readable CSV path");
    return read_state_csv(in, grid);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vintage capital optimal control toolkit"};
    app.require_subcommand(1);
    std::string model_name = "lq-1";
    int n_cells = 200;
    std::uint64_t seed = 42;
    double tol = 1e-6;
    double horizon = 0.0;
    std::string out_dir;
    std::string x_spec = "ones";
    std::string controls_path;
    std::string report_dir;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--model", model_name, "canonical instance name or JSON config path");
        sub->add_option("--cells", n_cells, "age cells (canonical instances only)");
        sub->add_option("--seed", seed, "seed of the random suites");
        sub->add_option("--tol", tol, "tolerance");
        sub->add_option("--horizon", horizon, "time horizon");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--x", x_spec, "initial state: ones, zero, bump or CSV path");
    };
    auto* simulate = app.add_subcommand("simulate", "forward solve under a control path");
    common(simulate);
    simulate->add_option("--controls", controls_path, "control CSV (default: zero controls)");
    auto* optimize = app.add_subcommand("optimize", "finite-horizon optimal control");
    common(optimize);
    auto* value = app.add_subcommand("value", "infinite-horizon value probe");
    common(value);
    auto* feedback = app.add_subcommand("feedback", "closed-loop simulation under the optimal feedback");
    common(feedback);
    auto* verify = app.add_subcommand("verify", "run every audit");
    common(verify);
    auto* report = app.add_subcommand("report", "tabulate JSON results in a directory");
    report->add_option("dir", report_dir, "directory with JSON results")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        if (report->parsed()) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::recursive_directory_iterator(report_dir))
                if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            out << "file,key,value\n";
            for (const auto& f : files) {
                std::ifstream in(f);
                json j;
                try {
                    j = json::parse(in);
                } catch (const json::parse_error&) {
                    throw ConfigError("malformed JSON in " + f.string());
                }
                const std::string rel = fs::relative(f, report_dir).string();
                if (j.contains("audits")) {
                    for (const auto& a : j.at("audits"))
                        out << rel << ',' << a.at("name").get<std::string>() << ','
                            << (a.at("pass").get<bool>() ? "pass" : "FAIL") << '\n';
                    continue;
                }
                for (const auto& [k, v] : j.items())
                    if (v.is_primitive()) out << rel << ',' << k << ',' << v.dump() << '\n';
            }
            return 0;
        }

        const VintageModel model = load_model(model_name, n_cells);
        const CapitalState x = resolve_state(x_spec, model.grid());

        if (simulate->parsed()) {
            ControlPath u;
            if (!controls_path.empty()) {
                std::ifstream in(controls_path);
                if (!in) throw ConfigError("cannot open control file '" + controls_path + "'");
                u = read_control_csv(in, model);
            } else {
                const double t = horizon > 0.0 ? horizon : 1.0;
                u = ControlPath(0.0, model.dt(), aligned_steps(t, model.dt()), model.n_cells());
            }
            const Trajectory traj = solve_forward(x, u, model);
            if (out_dir.empty()) {
                write_trajectory_csv(out, traj);
            } else {
                fs::create_directories(out_dir);
                std::ofstream f(fs::path(out_dir) / "trajectory.csv");
                write_trajectory_csv(f, traj);
            }
            return 0;
        }

        if (optimize->parsed()) {
            SolverOptions opts;
            opts.tol = tol;
            opts.record_history = true;
            const double t = horizon > 0.0 ? horizon : 2.0;
            const auto sol = solve_finite_horizon(x, t, model, opts);
            json j = report_to_json(sol.report);
            j["model"] = model.name();
            j["horizon"] = t;
            emit(j, out_dir, "report.json", out);
            if (!out_dir.empty()) {
                std::ofstream c(fs::path(out_dir) / "control.csv");
                write_control_csv(c, sol.control);
                std::ofstream h(fs::path(out_dir) / "history.csv");
                write_history_csv(h, sol.history);
            }
            return sol.report.converged ? 0 : 1;
        }

        if (value->parsed()) {
            ValueOptions opts;
            opts.tol = tol;
            const ValueProbe probe = psi_infinity(x, model, opts);
            json j = probe_to_json(probe);
            j["model"] = model.name();
            emit(j, out_dir, "value.json", out);
            if (!out_dir.empty()) {
                std::ofstream c(fs::path(out_dir) / "value.csv");
                write_probe_csv(c, probe);
            }
            return 0;
        }

        if (feedback->parsed()) {
            ValueOptions opts;
            opts.tol = tol;
            const auto provider = make_provider(model, opts);
            const double t = horizon > 0.0 ? horizon : 10.0 / model.lambda();
            const ClosedLoopResult loop = closed_loop_solve(x, t, *provider, model);
            const auto gaps = verification_gap(loop.trajectory, loop.control, *provider, model);
            json j;
            j["model"] = model.name();
            j["provider"] = provider->kind();
            j["t_sim"] = t;
            j["cost"] = evaluate_objective(loop.control, loop.trajectory, model);
            j["total_gap"] = total_gap(gaps, model.dt());
            j["min_gap"] = gaps.empty() ? 0.0 : *std::min_element(gaps.begin(), gaps.end());
            emit(j, out_dir, "feedback.json", out);
            if (!out_dir.empty()) {
                std::ofstream c(fs::path(out_dir) / "closed_loop.csv");
                write_closed_loop_csv(c, loop, gaps, model);
            }
            return 0;
        }

        if (verify->parsed()) {
            const AuditContext ctx{model, seed, tol, horizon};
            const auto results = run_audits(ctx);
            json j;
            j["model"] = model.name();
            j["seed"] = seed;
            j["audits"] = json::array();
            bool ok = results.size() == kExpectedAuditCount;
            for (const auto& r : results) {
                j["audits"].push_back(audit_json(r));
                ok = ok && r.pass;
                if (!r.pass) err << "audit " << r.name << " failed (margin " << r.margin << ") " << r.detail << '\n';
            }
            emit(j, out_dir, "summary.json", out);
            return ok ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const GridError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const AlphaBoundary& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const RegimeViolation& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const VintageError& e) {
        err << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace vintage::cli

#include "thermistor/cli.hpp"

#include "thermistor/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <optional>

namespace thermistor::cli {

namespace {

using Json = nlohmann::ordered_json;

// Shortest representation that round-trips to the same double.
std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void write_field_csv(const std::filesystem::path& path, const FieldHistory& field, const char* name) {
    std::ofstream out = open_output(path);
    out << "t,x," << name << '\n';
    const Eigen::VectorXd x = field.mesh.nodes();
    for (int n = 0; n < field.num_levels(); ++n) {
        const std::string t = num(field.time(n));
        for (Eigen::Index j = 0; j < x.size(); ++j) out << t << ',' << num(x[j]) << ',' << num(field[n][j]) << '\n';
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

Json vector_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json cost_json(const CostBreakdown& c) {
    return Json{{"state_term", c.state_term}, {"control_term", c.control_term}, {"total", c.total}};
}

Json problem_json(const RunConfig& config) {
    const ModelParams& p = config.params;
    return Json{{"lambda", p.lambda},
                {"horizon", p.horizon},
                {"time_step", p.time_step},
                {"n_elements", p.n_elements},
                {"conductivity", p.conductivity.name()},
                {"box_min", p.box.min},
                {"box_max", p.box.max},
                {"scheme", to_string(config.mode)}};
}

Json energy_json(const EnergyReport& e) {
    return Json{{"max_l2_sq", e.max_l2_sq},
                {"seminorm_integral", e.seminorm_integral},
                {"boundary_integral", e.boundary_integral},
                {"star_integral", e.star_integral},
                {"total", e.total},
                {"max_linf", e.max_linf}};
}

void write_beta_csv(const std::filesystem::path& path, const BoundaryControl& beta, double dt) {
    std::ofstream out = open_output(path);
    const bool constant = beta.kind == BoundaryControl::Kind::Constant;
    out << (constant ? "t,beta_constant\n" : "t,beta_left,beta_right\n");
    for (int n = 0; n < beta.num_levels(); ++n) {
        out << num(n * dt) << ',';
        if (constant) {
            out << num(beta.constant_value) << '\n';
        } else {
            out << num(beta.left[n]) << ',' << num(beta.right[n]) << '\n';
        }
    }
}

void prepare_dir(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
}

}  // namespace

int cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
    const ModelParams& p = config.params;
    const BoundaryControl beta = simulation_control(config);
    const FieldHistory u = forward_solve(p, beta, config.mode);

    prepare_dir(out_dir);
    write_field_csv(out_dir / "u.csv", u, "u");

    const int last = u.num_levels() - 1;
    const double steady_gap = (u[last] - u[last - 1]).cwiseAbs().maxCoeff();
    Json summary{{"command", "simulate"},
                 {"problem", problem_json(config)},
                 {"beta", beta.left[0]},
                 {"final_time", u.time(last)},
                 {"final_profile", Json{{"x", vector_json(u.mesh.nodes())}, {"u", vector_json(u[last])}}},
                 {"steady_state_gap", steady_gap},
                 {"max_abs_u", u.max_abs()},
                 {"cost", cost_json(cost(p, beta, u))},
                 {"energy", energy_json(energy_bound_report(p, u))}};
    write_json(out_dir / "summary.json", summary);

    log << "simulate: " << u.num_levels() << " levels, final |u|max = " << num(u[last].cwiseAbs().maxCoeff())
        << ", last-step change = " << num(steady_gap) << "\n";
    return kExitOk;
}

int cmd_optimize(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
    const ModelParams& p = config.params;
    const BoundaryControl start = starting_control(config);

    OptimalityReport report;
    std::string status;
    switch (config.driver) {
        case Driver::Sweep:
        case Driver::ConstantBeta:
            report = forward_backward_sweep(p, start, config.mode,
                                            {config.tol, config.max_iter, config.relaxation, config.constant_slice});
            status = to_string(report.status);
            break;
        case Driver::ProjectedGradient:
            report = projected_gradient_descent(p, start, config.mode,
                                                {config.step, config.tol, config.max_iter, GradientOptions{}.min_step});
            status = to_string(report.status);
            break;
        case Driver::SimulateOnly: {
            FieldHistory u = forward_solve(p, start, config.mode);
            FieldHistory phi = adjoint_solve(p, start, u, config.mode);
            report.control = start;
            report.cost = cost(p, start, u);
            report.cost_history = {report.cost.total};
            report.phi0_residual = phi0_residual(phi);
            report.state = std::move(u);
            report.adjoint = std::move(phi);
            status = "evaluated";
            break;
        }
    }

    prepare_dir(out_dir);
    write_beta_csv(out_dir / "beta.csv", report.control, p.time_step);
    {
        std::ofstream out = open_output(out_dir / "cost_history.csv");
        out << "iteration,cost\n";
        for (std::size_t k = 0; k < report.cost_history.size(); ++k) out << k << ',' << num(report.cost_history[k]) << '\n';
    }
    write_field_csv(out_dir / "u.csv", *report.state, "u");
    write_field_csv(out_dir / "phi.csv", *report.adjoint, "phi");

    const bool constant = report.control.kind == BoundaryControl::Kind::Constant;
    Json control{{"kind", constant ? "constant" : "trajectory"}};
    if (constant) {
        control["value"] = report.control.constant_value;
    } else {
        control["left"] = vector_json(report.control.left);
        control["right"] = vector_json(report.control.right);
    }
    Json j{{"command", "optimize"},
           {"problem", problem_json(config)},
           {"driver", to_string(config.driver)},
           {"control", control},
           {"cost", cost_json(report.cost)},
           {"iterations", report.iterations},
           {"accepted_steps", report.accepted_steps},
           {"control_residuals", report.control_residuals},
           {"cost_history", report.cost_history},
           {"phi0_residual", report.phi0_residual},
           {"converged", report.converged},
           {"status", status}};
    write_json(out_dir / "report.json", j);

    log << "optimize (" << to_string(config.driver) << "): " << status << " after " << report.iterations
        << " iterations, J = " << num(report.cost.total) << "\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& config,
               const std::filesystem::path& out_dir,
               std::ostream& log,
               const AssemblyHooks& hooks) {
    const auto results = run_verification(config.params, verification_control(config), config.mode, config.seed, hooks);
    const bool ok = verification_passed(results);

    Json checks = Json::array();
    for (const auto& r : results) {
        const char* tag = r.passed ? "PASS" : (r.advisory ? "WARN" : "FAIL");
        log << tag << "  " << r.name << "  value=" << num(r.value) << "  threshold=" << num(r.threshold) << "  "
            << r.detail << (r.advisory ? "  (advisory)" : "") << "\n";
        checks.push_back(Json{{"name", r.name},
                              {"passed", r.passed},
                              {"advisory", r.advisory},
                              {"value", r.value},
                              {"threshold", r.threshold},
                              {"detail", r.detail}});
    }
    std::string failed;
    for (const auto& r : results) {
        if (!r.passed && !r.advisory) failed += (failed.empty() ? "" : ", ") + r.name;
    }
    log << "verify: " << (ok ? "PASS" : "FAIL (" + failed + ")") << "\n";

    prepare_dir(out_dir);
    write_json(out_dir / "verify_report.json", Json{{"command", "verify"},
                                                    {"problem", problem_json(config)},
                                                    {"seed", config.seed},
                                                    {"passed", ok},
                                                    {"checks", checks}});
    return ok ? kExitOk : kExitCheckFailed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlocal thermistor simulation and optimal boundary control"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::string fault;
    app.add_option("--config", config_path, "configuration file (key = value)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    app.add_option("--mode", mode, "scheme: paper or consistent (overrides scheme)")
        ->check(CLI::IsMember({"paper", "consistent"}));
    app.add_option("--seed", seed, "seed for random verification directions");
    app.add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"mass-matrix"}));

    auto* simulate = app.add_subcommand("simulate", "run the state equation and write u.csv, summary.json");
    auto* optimize = app.add_subcommand("optimize", "solve the optimality system and write controls and fields");
    auto* verify = app.add_subcommand("verify", "run the diagnostics suite; exit 0 iff all checks pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        RunConfig config = load_config(config_path);
        if (!mode.empty()) config.mode = parse_mode(mode);
        if (seed) config.seed = *seed;
        const std::filesystem::path dir = out_dir.empty() ? config.output_dir : out_dir;

        if (simulate->parsed()) return cmd_simulate(config, dir, out);
        if (optimize->parsed()) return cmd_optimize(config, dir, out);
        if (verify->parsed()) {
            AssemblyHooks hooks;
            if (fault == "mass-matrix") {
                hooks.mass = [](const Mesh1D& mesh) {
                    Tridiagonal<double> a = assemble_mass(mesh);
                    a.diag *= 1.01;
                    return a;
                };
            }
            return cmd_verify(config, dir, out, hooks);
        }
    } catch (const ConfigError& e) {
        err << "invalid configuration:\n" << e.what() << "\n";
        return kExitBadConfig;
    } catch (const ContractError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const DivergenceError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const SingularSystemError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitBadConfig;
}

}  // namespace thermistor::cli

#include "thermistor/optimal_control.hpp"

#include "thermistor/errors.hpp"

#include <cmath>
#include <string>

namespace thermistor {

namespace {

double time_weight(int n, int levels) {
    return (n == 0 || n == levels - 1) ? 0.5 : 1.0;
}

void require_same_grid(const FieldHistory& a, const FieldHistory& b) {
    if (!a.same_grid(b)) throw ContractError("state and adjoint histories live on different grids");
}

BoundaryControl blend(const BoundaryControl& a, const BoundaryControl& b, double r) {
    BoundaryControl out = BoundaryControl::trajectory((1.0 - r) * a.left + r * b.left, (1.0 - r) * a.right + r * b.right);
    out.kind = a.kind;
    out.constant_value = (1.0 - r) * a.constant_value + r * b.constant_value;
    return out;
}

BoundaryControl clamp_step(const BoundaryControl& beta, const BoundaryControl& g, double step, const ControlBox& box) {
    auto clamp = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& d) {
        Eigen::VectorXd v = b - step * d;
        return v.unaryExpr([&](double x) { return box.clamp(x); }).eval();
    };
    return BoundaryControl::trajectory(clamp(beta.left, g.left), clamp(beta.right, g.right));
}

template <typename Fn>
auto tag_iteration(int iteration, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " (driver iteration " + std::to_string(iteration) + ")",
                              e.level());
    } catch (const SingularSystemError& e) {
        throw SingularSystemError(std::string(e.what()) + " (driver iteration " + std::to_string(iteration) + ")",
                                  e.level());
    }
}

void check_start(const ModelParams& p, const BoundaryControl& beta0) {
    if (beta0.num_levels() != p.num_levels()) throw ContractError("initial control has the wrong level count");
    if (!beta0.within(p.box)) throw ContractError("initial control lies outside the admissible box");
}

void finish(OptimalityReport& report, const ModelParams& p, SchemeMode mode) {
    FieldHistory u = forward_solve(p, report.control, mode);
    FieldHistory phi = adjoint_solve(p, report.control, u, mode);
    report.cost = cost(p, report.control, u);
    report.phi0_residual = phi0_residual(phi);
    report.state = std::move(u);
    report.adjoint = std::move(phi);
}

}  // namespace

CostBreakdown cost(const ModelParams& p, const BoundaryControl& beta, const FieldHistory& u) {
    if (u.mesh.n_elements() != p.n_elements || u.num_levels() != p.num_levels() ||
        beta.num_levels() != u.num_levels()) {
        throw ContractError("cost: control, state and model grids disagree");
    }
    CostBreakdown c;
    if (beta.kind == BoundaryControl::Kind::Constant) {
        c.state_term = integrate_nodal(u.mesh, u[u.num_levels() - 1]);
        c.control_term = beta.constant_value * beta.constant_value;
    } else {
        const int levels = u.num_levels();
        for (int n = 0; n < levels; ++n) {
            const double w = time_weight(n, levels) * u.dt;
            c.state_term += w * integrate_nodal(u.mesh, u[n]);
            c.control_term += w * (beta.left[n] * beta.left[n] + beta.right[n] * beta.right[n]);
        }
    }
    c.total = c.state_term + c.control_term;
    return c;
}

BoundaryControl project_control(const FieldHistory& u, const FieldHistory& phi, const ControlBox& box) {
    require_same_grid(u, phi);
    const int levels = u.num_levels();
    const int last = u.mesh.n_nodes() - 1;
    Eigen::VectorXd left(levels), right(levels);
    for (int n = 0; n < levels; ++n) {
        left[n] = box.clamp(0.5 * u[n][0] * phi[n][0]);
        right[n] = box.clamp(0.5 * u[n][last] * phi[n][last]);
    }
    return BoundaryControl::trajectory(std::move(left), std::move(right));
}

double project_constant_control(const Mesh1D& mesh,
                                const FieldHistory& u,
                                const FieldHistory& phi,
                                const ControlBox& box,
                                ConstantSlice slice) {
    require_same_grid(u, phi);
    if (!(u.mesh == mesh)) throw ContractError("mesh does not match the histories");
    auto boundary_product = [&](int n) {
        const auto [u0, u1] = boundary_trace(u[n]);
        const auto [p0, p1] = boundary_trace(phi[n]);
        return u0 * p0 + u1 * p1;
    };
    const int levels = u.num_levels();
    double integral = 0.0;
    if (slice == ConstantSlice::FinalLevel) {
        integral = boundary_product(levels - 1);
    } else {
        double weight = 0.0;
        for (int n = 0; n < levels; ++n) {
            integral += time_weight(n, levels) * boundary_product(n);
            weight += time_weight(n, levels);
        }
        integral /= weight;
    }
    return box.clamp(0.5 * integral);
}

BoundaryControl gradient_direction(const BoundaryControl& beta, const FieldHistory& u, const FieldHistory& phi) {
    require_same_grid(u, phi);
    if (beta.num_levels() != u.num_levels()) throw ContractError("control and histories have different level counts");
    const int levels = u.num_levels();
    const int last = u.mesh.n_nodes() - 1;
    Eigen::VectorXd left(levels), right(levels);
    for (int n = 0; n < levels; ++n) {
        left[n] = 2.0 * beta.left[n] - u[n][0] * phi[n][0];
        right[n] = 2.0 * beta.right[n] - u[n][last] * phi[n][last];
    }
    return BoundaryControl::trajectory(std::move(left), std::move(right));
}

double boundary_inner(const BoundaryControl& a, const BoundaryControl& b, double dt) {
    if (a.num_levels() != b.num_levels()) throw ContractError("boundary fields have different level counts");
    const int levels = a.num_levels();
    double s = 0.0;
    for (int n = 0; n < levels; ++n) {
        s += time_weight(n, levels) * dt * (a.left[n] * b.left[n] + a.right[n] * b.right[n]);
    }
    return s;
}

const char* to_string(DriverStatus status) {
    switch (status) {
        case DriverStatus::Converged: return "converged";
        case DriverStatus::MaxIterations: return "max_iterations";
        case DriverStatus::Stagnated: return "stagnated";
    }
    return "unknown";
}

OptimalityReport forward_backward_sweep(const ModelParams& p,
                                        const BoundaryControl& beta0,
                                        SchemeMode mode,
                                        const SweepOptions& options) {
    check_start(p, beta0);
    if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) throw ConfigError("relaxation must lie in (0, 1]");
    if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
    if (options.max_iter < 1) throw ConfigError("max_iter must be at least 1");

    const bool constant = beta0.kind == BoundaryControl::Kind::Constant;
    const Mesh1D mesh(p.n_elements);
    OptimalityReport report{beta0, {}, 0, 0, {}, {}, 0.0, false, DriverStatus::MaxIterations, {}, {}};

    for (int k = 1; k <= options.max_iter; ++k) {
        const BoundaryControl& beta = report.control;
        auto [u, phi] = tag_iteration(k, [&] {
            FieldHistory state = forward_solve(p, beta, mode);
            FieldHistory adj = adjoint_solve(p, beta, state, mode);
            return std::pair{std::move(state), std::move(adj)};
        });
        report.cost_history.push_back(cost(p, beta, u).total);

        BoundaryControl target = constant
            ? BoundaryControl::constant(project_constant_control(mesh, u, phi, p.box, options.constant_slice),
                                        p.num_levels())
            : project_control(u, phi, p.box);
        BoundaryControl next = blend(beta, target, options.relaxation);
        const double residual = next.sup_distance(beta);
        report.control_residuals.push_back(residual);
        report.control = std::move(next);
        report.iterations = k;
        ++report.accepted_steps;
        if (residual <= options.tol) {
            report.converged = true;
            report.status = DriverStatus::Converged;
            break;
        }
    }
    finish(report, p, mode);
    return report;
}

OptimalityReport projected_gradient_descent(const ModelParams& p,
                                            const BoundaryControl& beta0,
                                            SchemeMode mode,
                                            const GradientOptions& options) {
    check_start(p, beta0);
    if (!(options.step > 0.0)) throw ConfigError("gradient step must be positive");
    if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
    if (!(options.min_step > 0.0)) throw ConfigError("minimum step must be positive");

    OptimalityReport report{BoundaryControl::trajectory(beta0.left, beta0.right), {}, 0, 0, {}, {}, 0.0, false,
                            DriverStatus::MaxIterations, {}, {}};

    FieldHistory u = tag_iteration(0, [&] { return forward_solve(p, report.control, mode); });
    double current = cost(p, report.control, u).total;
    report.cost_history.push_back(current);

    for (int k = 1; k <= options.max_iter; ++k) {
        report.iterations = k;
        const FieldHistory phi = tag_iteration(k, [&] { return adjoint_solve(p, report.control, u, mode); });
        const BoundaryControl g = gradient_direction(report.control, u, phi);
        const double pg = clamp_step(report.control, g, 1.0, p.box).sup_distance(report.control);
        report.control_residuals.push_back(pg);
        if (pg <= options.tol) {
            report.converged = true;
            report.status = DriverStatus::Converged;
            break;
        }

        bool accepted = false;
        for (double s = options.step; s >= options.min_step; s *= 0.5) {
            BoundaryControl candidate = clamp_step(report.control, g, s, p.box);
            FieldHistory trial = tag_iteration(k, [&] { return forward_solve(p, candidate, mode); });
            const double value = cost(p, candidate, trial).total;
            if (value <= current) {
                report.control = std::move(candidate);
                u = std::move(trial);
                current = value;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            report.status = DriverStatus::Stagnated;
            break;
        }
        ++report.accepted_steps;
        report.cost_history.push_back(current);
    }
    finish(report, p, mode);
    return report;
}

}  // namespace thermistor

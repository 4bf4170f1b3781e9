#include "thermistor/pde_solvers.hpp"

#include "thermistor/errors.hpp"

#include <cmath>
#include <string>

namespace thermistor {

const char* to_string(SchemeMode mode) {
    return mode == SchemeMode::PaperFaithful ? "paper" : "consistent";
}

double FieldHistory::max_abs() const {
    double m = 0.0;
    for (const auto& level : levels) m = std::max(m, level.cwiseAbs().maxCoeff());
    return m;
}

bool FieldHistory::same_grid(const FieldHistory& o) const {
    return mesh == o.mesh && dt == o.dt && num_levels() == o.num_levels();
}

BoundaryControl BoundaryControl::trajectory(Eigen::VectorXd left, Eigen::VectorXd right) {
    if (left.size() != right.size()) throw ContractError("control trajectories have different lengths");
    BoundaryControl c;
    c.kind = Kind::Trajectory;
    c.left = std::move(left);
    c.right = std::move(right);
    return c;
}

BoundaryControl BoundaryControl::uniform(double value, int levels) {
    return trajectory(Eigen::VectorXd::Constant(levels, value), Eigen::VectorXd::Constant(levels, value));
}

BoundaryControl BoundaryControl::constant(double value, int levels) {
    BoundaryControl c = uniform(value, levels);
    c.kind = Kind::Constant;
    c.constant_value = value;
    return c;
}

bool BoundaryControl::within(const ControlBox& box) const {
    auto inside = [&](const Eigen::VectorXd& v) {
        return (v.array() >= box.min).all() && (v.array() <= box.max).all();
    };
    return inside(left) && inside(right);
}

double BoundaryControl::sup_distance(const BoundaryControl& other) const {
    if (num_levels() != other.num_levels()) throw ContractError("controls have different level counts");
    if (num_levels() == 0) return 0.0;
    return std::max((left - other.left).cwiseAbs().maxCoeff(), (right - other.right).cwiseAbs().maxCoeff());
}

double phi0_residual(const FieldHistory& phi) {
    return phi.levels.empty() ? 0.0 : phi[0].cwiseAbs().maxCoeff();
}

namespace scheme {

Eigen::VectorXd nonlocal_source(const ModelParams& p, const Mesh1D& mesh, const NodalField& u) {
    const Eigen::VectorXd w = trapezoid_weights(mesh);
    const Eigen::VectorXd fu = p.conductivity.eval(u);
    const double total = w.dot(fu);
    return (p.lambda / (total * total)) * w.cwiseProduct(fu);
}

Eigen::VectorXd nonlocal_source_jvp(const ModelParams& p, const Mesh1D& mesh, const NodalField& u,
                                    const NodalField& psi) {
    const Eigen::VectorXd w = trapezoid_weights(mesh);
    const Eigen::VectorXd fu = p.conductivity.eval(u);
    const Eigen::VectorXd dfu = p.conductivity.deriv(u);
    const double total = w.dot(fu);
    const double dtotal = w.dot(dfu.cwiseProduct(psi));
    const double inv2 = 1.0 / (total * total);
    return p.lambda * inv2 * w.cwiseProduct(dfu.cwiseProduct(psi)) -
           (2.0 * p.lambda * inv2 / total * dtotal) * w.cwiseProduct(fu);
}

Eigen::VectorXd nonlocal_source_vjp(const ModelParams& p, const Mesh1D& mesh, const NodalField& u,
                                    const NodalField& phi) {
    const Eigen::VectorXd w = trapezoid_weights(mesh);
    const Eigen::VectorXd fu = p.conductivity.eval(u);
    const Eigen::VectorXd dfu = p.conductivity.deriv(u);
    const double total = w.dot(fu);
    const double weighted = w.dot(fu.cwiseProduct(phi));  // ∫ f(u) φ
    const double inv2 = 1.0 / (total * total);
    return p.lambda * inv2 * w.cwiseProduct(dfu.cwiseProduct(phi)) -
           (2.0 * p.lambda * inv2 / total * weighted) * w.cwiseProduct(dfu);
}

Tridiagonal<double> consistent_step_matrix(const Mesh1D& mesh, double tau, double beta_left, double beta_right) {
    Tridiagonal<double> m = assemble_mass(mesh) + assemble_stiffness(mesh) * tau;
    m.diag[0] += tau * beta_left;
    m.diag[mesh.n_nodes() - 1] += tau * beta_right;
    return m;
}

PaperRows paper_forward_rows(const Mesh1D& mesh, double tau, double beta_left, double beta_right) {
    const int n = mesh.n_elements();  // unknowns α_0 .. α_{N-1}
    const double h = mesh.h();
    const double a = h / 6.0 - tau / h;
    const double b = 2.0 * h / 3.0 + 2.0 * tau / h;
    const double right_factor = 1.0 / (1.0 + beta_right * h);

    PaperRows rows{Tridiagonal<double>(n), Tridiagonal<double>(n)};
    rows.lhs.sub.setConstant(a);
    rows.lhs.diag.setConstant(b);
    rows.lhs.sup.setConstant(a);
    rows.rhs.sub.setConstant(h / 6.0);
    rows.rhs.diag.setConstant(2.0 * h / 3.0);
    rows.rhs.sup.setConstant(h / 6.0);

    // j = 0: ghost α_{-1} = α_1 + (hβ + 1) α_0 folded in, plus the halved boundary term τβ/2
    rows.lhs.diag[0] = a * (1.0 + h * beta_left) + b + tau * beta_left / 2.0;
    rows.lhs.sup[0] = 2.0 * a;
    rows.rhs.diag[0] = h / 6.0 * (5.0 + h * beta_left);
    rows.rhs.sup[0] = h / 3.0;

    // j = N-1: α_N = α_{N-1} / (1 + βh) folded in
    rows.lhs.diag[n - 1] = b + a * right_factor;
    rows.rhs.diag[n - 1] = 2.0 * h / 3.0 * (1.0 + right_factor / 4.0);
    return rows;
}

double paper_forward_source(const ModelParams& p, const NodalField& u) {
    const double f0 = p.conductivity.eval(u[0]);
    const double fn = p.conductivity.eval(u[u.size() - 1]);
    const double s = f0 + fn;
    return 2.0 * p.lambda * p.time_step * f0 / (s * s);
}

PaperRows paper_adjoint_rows(const ModelParams& p,
                             const Mesh1D& mesh,
                             double tau,
                             double beta_left,
                             double beta_right,
                             const NodalField& u_n) {
    const int n = mesh.n_elements();
    const double h = mesh.h();
    const double c = -h / 6.0 - tau / h;
    const double d = -2.0 * h / 3.0 + 2.0 * tau / h;
    const double right_factor = 1.0 / (1.0 + beta_right * h);

    const double f0 = p.conductivity.eval(u_n[0]);
    const double fn = p.conductivity.eval(u_n[u_n.size() - 1]);
    const double df0 = p.conductivity.deriv(u_n[0]);
    const double s = f0 + fn;

    PaperRows rows{Tridiagonal<double>(n), Tridiagonal<double>(n)};
    rows.lhs.sub.setConstant(c);
    rows.lhs.diag.setConstant(d);
    rows.lhs.sup.setConstant(c);
    rows.rhs.sub.setConstant(h / 6.0);
    rows.rhs.diag.setConstant(2.0 * h / 3.0);
    rows.rhs.sup.setConstant(h / 6.0);

    rows.lhs.diag[0] = c * (1.0 + h * beta_left) + d + tau * beta_left / 2.0 -
                       2.0 * p.lambda * tau * beta_left * df0 / (s * s);
    rows.lhs.sup[0] = 2.0 * c;
    rows.rhs.diag[0] = h / 6.0 * (5.0 + h * beta_left);
    rows.rhs.sup[0] = h / 3.0;

    rows.lhs.diag[n - 1] = d + c * right_factor;
    rows.rhs.diag[n - 1] = 2.0 * h / 3.0 * (1.0 + right_factor / 4.0);
    return rows;
}

}  // namespace scheme

namespace {

void require_valid(const ModelParams& p) {
    const auto violations = validate_params(p);
    if (!violations.empty()) {
        std::string msg = "invalid model parameters:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw ConfigError(msg);
    }
}

void require_levels(const ModelParams& p, const BoundaryControl& c, const char* what) {
    if (c.num_levels() != p.num_levels()) {
        throw ContractError(std::string(what) + " has " + std::to_string(c.num_levels()) +
                            " levels, expected " + std::to_string(p.num_levels()));
    }
    if (!c.all_finite()) throw ContractError(std::string(what) + " has non-finite values");
}

void require_history(const ModelParams& p, const FieldHistory& u) {
    if (u.mesh.n_elements() != p.n_elements || u.num_levels() != p.num_levels() || u.dt != p.time_step) {
        throw ContractError("field history does not match the model grid");
    }
}

void check_finite(const NodalField& v, int level, const char* field) {
    if (!v.allFinite() || v.cwiseAbs().maxCoeff() > kDivergenceThreshold) {
        throw DivergenceError(std::string(field) + " diverged at time level " + std::to_string(level), level);
    }
}

template <typename Rhs>
NodalField solve_at(const Tridiagonal<double>& m, const Rhs& rhs, int level) {
    try {
        return thomas_solve(m, rhs);
    } catch (const SingularSystemError& e) {
        throw SingularSystemError(std::string(e.what()) + " (time level " + std::to_string(level) + ")", level);
    }
}

// Extends a solution on nodes 0..N-1 with α_N = α_{N-1} / (1 + βh).
NodalField append_right_node(const Eigen::VectorXd& head, double beta_right, double h) {
    NodalField full(head.size() + 1);
    full.head(head.size()) = head;
    full[head.size()] = head[head.size() - 1] / (1.0 + beta_right * h);
    return full;
}

}  // namespace

FieldHistory forward_solve(const ModelParams& p, const BoundaryControl& beta, SchemeMode mode) {
    require_valid(p);
    require_levels(p, beta, "control");

    const Mesh1D mesh(p.n_elements);
    const double tau = p.time_step;
    const int steps = p.num_steps();
    const int n_nodes = mesh.n_nodes();
    const Tridiagonal<double> mass = assemble_mass(mesh);

    std::vector<NodalField> levels;
    levels.reserve(static_cast<std::size_t>(steps) + 1);
    levels.push_back(p.initial_temperature);
    check_finite(levels.back(), 0, "state");

    for (int n = 0; n < steps; ++n) {
        const NodalField& u = levels.back();
        const double bl = beta.left[n + 1];
        const double br = beta.right[n + 1];
        NodalField next;
        if (mode == SchemeMode::ConsistentGalerkin) {
            const Eigen::VectorXd rhs = mass * u + tau * scheme::nonlocal_source(p, mesh, u);
            next = solve_at(scheme::consistent_step_matrix(mesh, tau, bl, br), rhs, n + 1);
        } else {
            const auto rows = scheme::paper_forward_rows(mesh, tau, bl, br);
            Eigen::VectorXd rhs = rows.rhs * u.head(n_nodes - 1);
            rhs[0] += scheme::paper_forward_source(p, u);
            next = append_right_node(solve_at(rows.lhs, rhs, n + 1), br, mesh.h());
        }
        check_finite(next, n + 1, "state");
        levels.push_back(std::move(next));
    }
    return FieldHistory(mesh, tau, std::move(levels));
}

FieldHistory adjoint_solve(const ModelParams& p,
                           const BoundaryControl& beta,
                           const FieldHistory& u,
                           SchemeMode mode) {
    require_valid(p);
    require_levels(p, beta, "control");
    require_history(p, u);

    const Mesh1D mesh(p.n_elements);
    const double tau = p.time_step;
    const int steps = p.num_steps();
    const int n_nodes = mesh.n_nodes();
    const Tridiagonal<double> mass = assemble_mass(mesh);
    const Eigen::VectorXd unit_load = trapezoid_weights(mesh);  // ∫ 1·v_j

    std::vector<NodalField> levels(static_cast<std::size_t>(steps) + 1, NodalField::Zero(n_nodes));
    for (int n = steps - 1; n >= 0; --n) {
        const NodalField& later = levels[static_cast<std::size_t>(n) + 1];
        NodalField now;
        if (mode == SchemeMode::ConsistentGalerkin) {
            const Eigen::VectorXd rhs =
                mass * later + tau * (unit_load + scheme::nonlocal_source_vjp(p, mesh, u[n], later));
            now = solve_at(scheme::consistent_step_matrix(mesh, tau, beta.left[n], beta.right[n]), rhs, n);
        } else {
            // Ghost-point rows read with their own time indices: μ^{n+1} known, μ^n unknown.
            const double bl = beta.left[n + 1];
            const double br = beta.right[n + 1];
            const auto rows = scheme::paper_adjoint_rows(p, mesh, tau, bl, br, u[n]);
            Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n_nodes - 1, tau * mesh.h()) -
                                  rows.lhs * later.head(n_nodes - 1);
            const double f0 = p.conductivity.eval(u[n][0]);
            const double s = f0 + p.conductivity.eval(u[n][n_nodes - 1]);
            rhs[0] += 2.0 * p.lambda * tau * (later[0] + later[n_nodes - 1]) * f0 / (s * s * s);
            now = append_right_node(solve_at(rows.rhs, rhs, n), br, mesh.h());
        }
        check_finite(now, n, "adjoint");
        levels[static_cast<std::size_t>(n)] = std::move(now);
    }
    return FieldHistory(mesh, tau, std::move(levels));
}

FieldHistory sensitivity_solve(const ModelParams& p,
                               const BoundaryControl& beta,
                               const FieldHistory& u,
                               const BoundaryControl& direction,
                               SchemeMode mode) {
    require_valid(p);
    require_levels(p, beta, "control");
    require_levels(p, direction, "variation direction");
    require_history(p, u);

    const Mesh1D mesh(p.n_elements);
    const double tau = p.time_step;
    const double h = mesh.h();
    const int steps = p.num_steps();
    const int n_nodes = mesh.n_nodes();
    const int last = n_nodes - 1;
    const Tridiagonal<double> mass = assemble_mass(mesh);

    std::vector<NodalField> levels;
    levels.reserve(static_cast<std::size_t>(steps) + 1);
    levels.push_back(NodalField::Zero(n_nodes));

    for (int n = 0; n < steps; ++n) {
        const NodalField& psi = levels.back();
        const NodalField& u_now = u[n];
        const NodalField& u_next = u[n + 1];
        const double bl = beta.left[n + 1];
        const double br = beta.right[n + 1];
        const double ll = direction.left[n + 1];
        const double lr = direction.right[n + 1];
        NodalField next;
        if (mode == SchemeMode::ConsistentGalerkin) {
            Eigen::VectorXd rhs = mass * psi + tau * scheme::nonlocal_source_jvp(p, mesh, u_now, psi);
            rhs[0] -= tau * ll * u_next[0];
            rhs[last] -= tau * lr * u_next[last];
            next = solve_at(scheme::consistent_step_matrix(mesh, tau, bl, br), rhs, n + 1);
        } else {
            // Exact linearization of the ghost-point rows with respect to β along l.
            const auto rows = scheme::paper_forward_rows(mesh, tau, bl, br);
            const double a = h / 6.0 - tau / h;
            const double q = 1.0 + br * h;
            Eigen::VectorXd rhs = rows.rhs * psi.head(last);
            rhs[0] += (h * h / 6.0) * ll * u_now[0];
            rhs[last - 1] += -(h * h) / (6.0 * q * q) * lr * u_now[last - 1];
            rhs[0] -= (a * h + tau / 2.0) * ll * u_next[0];
            rhs[last - 1] -= -(a * h) / (q * q) * lr * u_next[last - 1];

            const double f0 = p.conductivity.eval(u_now[0]);
            const double fn = p.conductivity.eval(u_now[last]);
            const double df0 = p.conductivity.deriv(u_now[0]);
            const double dfn = p.conductivity.deriv(u_now[last]);
            const double s = f0 + fn;
            const double k = 2.0 * p.lambda * tau;
            rhs[0] += k * (df0 / (s * s) - 2.0 * f0 * df0 / (s * s * s)) * psi[0] +
                      k * (-2.0 * f0 * dfn / (s * s * s)) * psi[last];

            const Eigen::VectorXd head = solve_at(rows.lhs, rhs, n + 1);
            next = NodalField(n_nodes);
            next.head(last) = head;
            next[last] = head[last - 1] / q - u_next[last - 1] * h * lr / (q * q);
        }
        check_finite(next, n + 1, "sensitivity");
        levels.push_back(std::move(next));
    }
    return FieldHistory(mesh, tau, std::move(levels));
}

}  // namespace thermistor

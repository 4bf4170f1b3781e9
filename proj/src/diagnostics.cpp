#include "thermistor/diagnostics.hpp"

#include "thermistor/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace thermistor {

namespace {

constexpr double kGaussPoint = 0.57735026918962576451;  // 1/√3 on [-1, 1]

// Local hat-function values and slopes on one element [x_a, x_a + h].
struct ElementBasis {
    double h;
    double value(int local, double xi) const {  // xi in [-1, 1]
        return local == 0 ? 0.5 * (1.0 - xi) : 0.5 * (1.0 + xi);
    }
    double slope(int local) const { return local == 0 ? -1.0 / h : 1.0 / h; }
};

double time_weight(int n, int levels) {
    return (n == 0 || n == levels - 1) ? 0.5 : 1.0;
}

std::string format(double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << v;
    return os.str();
}

// Each fine step inside coarse step n -> n+1 sees the same β^{n+1}.
BoundaryControl halve_steps(const BoundaryControl& beta) {
    const int fine_levels = 2 * (beta.num_levels() - 1) + 1;
    Eigen::VectorXd fl(fine_levels), fr(fine_levels);
    for (int k = 0; k < fine_levels; ++k) {
        fl[k] = beta.left[(k + 1) / 2];
        fr[k] = beta.right[(k + 1) / 2];
    }
    return BoundaryControl::trajectory(fl, fr);
}

}  // namespace

EnergyReport energy_bound_report(const ModelParams& p, const FieldHistory& u) {
    EnergyReport r;
    const int levels = u.num_levels();
    for (int n = 0; n < levels; ++n) {
        const NodalField& level = u[n];
        const double w = time_weight(n, levels) * u.dt;
        const auto [g0, gn] = boundary_trace(level);
        r.max_l2_sq = std::max(r.max_l2_sq, mass_norm_sq(u.mesh, level));
        r.seminorm_integral += w * h1_seminorm_sq(u.mesh, level);
        r.boundary_integral += w * p.box.min * (g0 * g0 + gn * gn);
        r.max_linf = std::max(r.max_linf, level.cwiseAbs().maxCoeff());
    }
    r.star_integral = r.seminorm_integral + r.boundary_integral;
    r.total = r.max_l2_sq + r.star_integral;
    return r;
}

Eigen::MatrixXd reference_mass_matrix(const Mesh1D& mesh) {
    const int n = mesh.n_nodes();
    const ElementBasis basis{mesh.h()};
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (double xi : {-kGaussPoint, kGaussPoint}) s += basis.value(i, xi) * basis.value(j, xi);
                a(e + i, e + j) += s * mesh.h() / 2.0;
            }
        }
    }
    return a;
}

Eigen::MatrixXd reference_stiffness_matrix(const Mesh1D& mesh) {
    const int n = mesh.n_nodes();
    const ElementBasis basis{mesh.h()};
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) b(e + i, e + j) += basis.slope(i) * basis.slope(j) * mesh.h();
        }
    }
    return b;
}

FieldHistory dense_reference_solve(const ModelParams& p, const BoundaryControl& beta) {
    const auto violations = validate_params(p);
    if (!violations.empty()) throw ConfigError("dense reference: invalid parameters: " + violations.front());
    if (p.n_elements > 200) throw ConfigError("dense reference solve is limited to 200 elements");
    if (beta.num_levels() != p.num_levels()) throw ContractError("dense reference: control level count mismatch");

    const Mesh1D mesh(p.n_elements);
    const int n = mesh.n_nodes();
    const double h = mesh.h();
    const double tau = p.time_step;
    const Eigen::MatrixXd mass = reference_mass_matrix(mesh);
    const Eigen::MatrixXd stiff = reference_stiffness_matrix(mesh);

    // Element-wise nodal quadrature of λ f(u) v_j / (∫ f(u))².
    auto source = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
        double total = 0.0;
        for (int e = 0; e < mesh.n_elements(); ++e) {
            const double fa = p.conductivity.eval(u[e]);
            const double fb = p.conductivity.eval(u[e + 1]);
            load[e] += 0.5 * h * fa;
            load[e + 1] += 0.5 * h * fb;
            total += 0.5 * h * (fa + fb);
        }
        return (p.lambda / (total * total) * load).eval();
    };

    std::vector<NodalField> levels;
    levels.push_back(p.initial_temperature);
    for (int step = 1; step < p.num_levels(); ++step) {
        Eigen::MatrixXd system = mass + tau * stiff;
        system(0, 0) += tau * beta.left[step];
        system(n - 1, n - 1) += tau * beta.right[step];
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
        const Eigen::VectorXd base = mass * levels.back();

        Eigen::VectorXd iterate = levels.back();
        bool converged = false;
        for (int k = 0; k < 50; ++k) {
            Eigen::VectorXd next = lu.solve(base + tau * source(iterate));
            const double change = (next - iterate).cwiseAbs().maxCoeff();
            iterate = std::move(next);
            if (!iterate.allFinite()) break;
            if (change <= 1e-12 * std::max(1.0, iterate.cwiseAbs().maxCoeff())) {
                converged = true;
                break;
            }
        }
        if (!converged) throw OracleError("Picard iteration did not converge at level " + std::to_string(step));
        levels.push_back(std::move(iterate));
    }
    return FieldHistory(mesh, tau, std::move(levels));
}

double max_level_gap(const FieldHistory& a, const FieldHistory& b) {
    if (!a.same_grid(b)) throw ContractError("histories live on different grids");
    double gap = 0.0;
    for (int n = 0; n < a.num_levels(); ++n) gap = std::max(gap, (a[n] - b[n]).cwiseAbs().maxCoeff());
    return gap;
}

SchemeDiscrepancy scheme_cross_check(const ModelParams& p, const BoundaryControl& beta) {
    const FieldHistory paper = forward_solve(p, beta, SchemeMode::PaperFaithful);
    const FieldHistory consistent = forward_solve(p, beta, SchemeMode::ConsistentGalerkin);
    SchemeDiscrepancy d;
    for (int n = 0; n < paper.num_levels(); ++n) {
        d.level_gaps.push_back((paper[n] - consistent[n]).cwiseAbs().maxCoeff());
        d.max_gap = std::max(d.max_gap, d.level_gaps.back());
    }
    d.normalized_gap = d.max_gap / (paper.mesh.h() + p.time_step);
    return d;
}

Eigen::VectorXd resample_nodal(const Eigen::VectorXd& values, int n_elements) {
    if (values.size() < 2) throw ContractError("resampling needs at least two nodal values");
    const int src_elements = static_cast<int>(values.size()) - 1;
    Eigen::VectorXd out(n_elements + 1);
    for (int j = 0; j <= n_elements; ++j) {
        const double x = static_cast<double>(j) / n_elements * src_elements;
        const int e = std::min(static_cast<int>(x), src_elements - 1);
        const double t = x - e;
        out[j] = (1.0 - t) * values[e] + t * values[e + 1];
    }
    return out;
}

ModelParams refine(const ModelParams& p, int n_elements, int steps) {
    ModelParams q = p;
    q.n_elements = n_elements;
    q.time_step = p.horizon / steps;
    q.initial_temperature = resample_nodal(p.initial_temperature, n_elements);
    return q;
}

std::vector<double> sensitivity_fd_errors(const ModelParams& p,
                                          const BoundaryControl& beta,
                                          const BoundaryControl& direction,
                                          SchemeMode mode,
                                          const std::vector<double>& epsilons) {
    const FieldHistory u = forward_solve(p, beta, mode);
    const FieldHistory psi = sensitivity_solve(p, beta, u, direction, mode);
    const double scale = psi.max_abs();
    std::vector<double> errors;
    for (double eps : epsilons) {
        BoundaryControl shifted = BoundaryControl::trajectory(beta.left + eps * direction.left,
                                                              beta.right + eps * direction.right);
        const FieldHistory ue = forward_solve(p, shifted, mode);
        double gap = 0.0;
        for (int n = 0; n < u.num_levels(); ++n) {
            gap = std::max(gap, ((ue[n] - u[n]) / eps - psi[n]).cwiseAbs().maxCoeff());
        }
        errors.push_back(scale > 0.0 ? gap / scale : gap);
    }
    return errors;
}

GradientCheck gradient_fd_check(
    const ModelParams& p,
    const BoundaryControl& beta,
    const BoundaryControl& direction,
    SchemeMode mode,
    double epsilon,
    const std::function<BoundaryControl(const BoundaryControl&, const FieldHistory&, const FieldHistory&)>& density) {
    const FieldHistory u = forward_solve(p, beta, mode);
    const FieldHistory phi = adjoint_solve(p, beta, u, mode);
    const double j0 = cost(p, beta, u).total;

    BoundaryControl shifted = BoundaryControl::trajectory(beta.left + epsilon * direction.left,
                                                          beta.right + epsilon * direction.right);
    const double j1 = cost(p, shifted, forward_solve(p, shifted, mode)).total;

    GradientCheck c;
    c.finite_difference = (j1 - j0) / epsilon;
    c.predicted = boundary_inner(direction, density(beta, u, phi), p.time_step);
    c.relative_error = std::abs(c.finite_difference - c.predicted) /
                       std::max(std::abs(c.finite_difference), std::numeric_limits<double>::min());
    return c;
}

BoundaryControl random_direction(int levels, std::uint64_t seed) {
    constexpr int kModes = 4;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::Matrix<double, kModes, 2> coeffs;
    for (int k = 0; k < kModes; ++k) {
        coeffs(k, 0) = dist(rng);
        coeffs(k, 1) = dist(rng);
    }
    Eigen::MatrixXd basis(levels, kModes);
    const double span = levels > 1 ? levels - 1 : 1;
    for (int n = 0; n < levels; ++n) {
        for (int k = 0; k < kModes; ++k) basis(n, k) = std::cos(k * std::numbers::pi * n / span);
    }
    const Eigen::MatrixXd l = basis * coeffs;
    const double scale = l.cwiseAbs().maxCoeff();
    return BoundaryControl::trajectory(l.col(0) / scale, l.col(1) / scale);
}

std::vector<CheckResult> run_verification(const ModelParams& p,
                                          const BoundaryControl& beta,
                                          SchemeMode mode,
                                          std::uint64_t seed,
                                          const AssemblyHooks& hooks) {
    std::vector<CheckResult> out;
    const Mesh1D mesh(p.n_elements);

    auto guarded = [&](const std::string& name, double threshold, auto&& body) {
        CheckResult r{name, false, 0.0, threshold, {}};
        try {
            body(r);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        out.push_back(std::move(r));
    };

    guarded("mass-matrix", 1e-13, [&](CheckResult& r) {
        const Eigen::MatrixXd ref = reference_mass_matrix(mesh);
        r.value = (hooks.mass(mesh).to_dense() - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
        r.passed = r.value <= r.threshold;
        r.detail = "max relative entry gap against Gauss quadrature";
    });

    guarded("stiffness-matrix", 1e-13, [&](CheckResult& r) {
        const Eigen::MatrixXd ref = reference_stiffness_matrix(mesh);
        r.value = (hooks.stiffness(mesh).to_dense() - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
        r.passed = r.value <= r.threshold;
        r.detail = "max relative entry gap against Gauss quadrature";
    });

    guarded("thomas-solve", 1e-9, [&](CheckResult& r) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const int n = 50;
        Tridiagonal<double> t(n);
        for (int i = 0; i < n - 1; ++i) {
            t.sub[i] = dist(rng);
            t.sup[i] = dist(rng);
        }
        for (int i = 0; i < n; ++i) t.diag[i] = 3.0 + dist(rng);
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = dist(rng);
        const Eigen::VectorXd x = thomas_solve(t, rhs);
        const Eigen::VectorXd ref = t.to_dense().partialPivLu().solve(rhs);
        r.value = (x - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
        r.passed = r.value <= r.threshold;
        r.detail = "random diagonally dominant system against dense LU";
    });

    guarded("oracle-agreement", 0.75, [&](CheckResult& r) {
        const BoundaryControl fine_beta = halve_steps(beta);
        const ModelParams fine = refine(p, p.n_elements, 2 * p.num_steps());
        const double coarse_gap = max_level_gap(forward_solve(p, beta, SchemeMode::ConsistentGalerkin),
                                                dense_reference_solve(p, beta));
        const double fine_gap = max_level_gap(forward_solve(fine, fine_beta, SchemeMode::ConsistentGalerkin),
                                              dense_reference_solve(fine, fine_beta));
        if (coarse_gap <= 1e-10) {
            r.value = 0.0;
            r.passed = fine_gap <= 1e-10;
        } else {
            r.value = fine_gap / coarse_gap;
            r.passed = r.value <= r.threshold;
        }
        r.detail = "gap(tau)=" + format(coarse_gap) + " gap(tau/2)=" + format(fine_gap);
    });

    guarded("energy-bound", 2.0, [&](CheckResult& r) {
        double lo_energy = INFINITY, hi_energy = 0.0, lo_u = INFINITY, hi_u = 0.0, lo_phi = INFINITY, hi_phi = 0.0;
        for (const auto& [n_el, steps] : {std::pair{20, 100}, std::pair{40, 200}, std::pair{80, 400}}) {
            const ModelParams q = refine(p, n_el, steps);
            const BoundaryControl b = BoundaryControl::uniform(beta.left[0], q.num_levels());
            const FieldHistory u = forward_solve(q, b, mode);
            const FieldHistory phi = adjoint_solve(q, b, u, mode);
            const EnergyReport e = energy_bound_report(q, u);
            lo_energy = std::min(lo_energy, e.total);
            hi_energy = std::max(hi_energy, e.total);
            lo_u = std::min(lo_u, e.max_linf);
            hi_u = std::max(hi_u, e.max_linf);
            lo_phi = std::min(lo_phi, phi.max_abs());
            hi_phi = std::max(hi_phi, phi.max_abs());
        }
        auto ratio = [](double lo, double hi) { return hi <= 0.0 ? 1.0 : (lo > 0.0 ? hi / lo : INFINITY); };
        r.value = std::max({ratio(lo_energy, hi_energy), ratio(lo_u, hi_u), ratio(lo_phi, hi_phi)});
        r.passed = r.value < r.threshold;
        r.detail = "max/min over (20,100),(40,200),(80,400) of energy, |u|inf, |phi|inf";
    });

    const bool constant_f = p.conductivity.kind == ConductivityKind::Constant;
    guarded("sensitivity-fd", constant_f ? 5e-3 : 5e-2, [&](CheckResult& r) {
        const BoundaryControl l = BoundaryControl::uniform(1.0, p.num_levels());
        const auto errors = sensitivity_fd_errors(p, beta, l, mode, {1e-2, 1e-3, 1e-4});
        const bool decreasing = errors[1] < errors[0] && errors[2] < errors[1];
        r.value = errors.back();
        r.passed = (decreasing || errors.front() <= 1e-10) && r.value <= r.threshold;
        r.detail = "errors " + format(errors[0]) + " " + format(errors[1]) + " " + format(errors[2]);
    });

    guarded("gradient-fd", 5e-2, [&](CheckResult& r) {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const BoundaryControl l = random_direction(p.num_levels(), seed + static_cast<std::uint64_t>(k));
            const GradientCheck c = gradient_fd_check(p, beta, l, mode, 1e-4);
            worst = std::max(worst, c.relative_error);
        }
        r.value = worst;
        r.passed = r.value <= r.threshold;
        r.detail = "worst relative error over 5 seeded directions at eps=1e-4";
    });

    guarded("scheme-cross-check", 1.0, [&](CheckResult& r) {
        r.advisory = true;
        const double coarse = scheme_cross_check(p, beta).max_gap;
        const ModelParams fine = refine(p, 2 * p.n_elements, 2 * p.num_steps());
        const double fine_gap = scheme_cross_check(fine, halve_steps(beta)).max_gap;
        r.value = fine_gap / coarse;
        r.passed = std::isfinite(r.value) && r.value < r.threshold;
        r.detail = "paper/consistent max gap ratio under (N,steps) -> (2N,2steps)";
    });

    return out;
}

bool verification_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed || r.advisory; });
}

}  // namespace thermistor

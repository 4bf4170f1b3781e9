// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "thermistor/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

using namespace thermistor;

namespace {

constexpr auto kConsistent = SchemeMode::ConsistentGalerkin;

ModelParams constant_case(double horizon = 1.0, int n = 50, double beta_max = 1.0) {
    return make_params(1.0, horizon, 0.01, n, builtin_conductivity("constant(2)"), ControlBox{0.1, beta_max});
}

ModelParams catalog_case(double horizon = 2.0) {
    return make_params(1.0, horizon, 0.01, 50, builtin_conductivity("shifted_sine"), ControlBox{0.1, 1.0});
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > budget_s) {
        o.passed = false;
        o.detail += fmt(" [over budget %.0fs]", budget_s);
    }
    if (!o.passed) ++failures;
    std::printf("%s  C%-2d %-28s %7.2fs  %s\n", o.passed ? "PASS" : "FAIL", id, name, elapsed, o.detail.c_str());
    std::fflush(stdout);
}

void info(const std::string& text) {
    std::printf("INFO       %s\n", text.c_str());
    std::fflush(stdout);
}

double sup_gap(const BoundaryControl& a, const BoundaryControl& b) {
    return std::max((a.left - b.left).cwiseAbs().maxCoeff(), (a.right - b.right).cwiseAbs().maxCoeff());
}

// 2β + uφ on the boundary nodes.
BoundaryControl plus_sign_density(const BoundaryControl& beta, const FieldHistory& u, const FieldHistory& phi) {
    const int levels = u.num_levels();
    const Eigen::Index last = u.mesh.n_nodes() - 1;
    Eigen::VectorXd left(levels), right(levels);
    for (int n = 0; n < levels; ++n) {
        left[n] = 2.0 * beta.left[n] + u[n][0] * phi[n][0];
        right[n] = 2.0 * beta.right[n] + u[n][last] * phi[n][last];
    }
    return BoundaryControl::trajectory(left, right);
}

}  // namespace

int main() {
    criterion(1, "assembly-exactness", 1.0, [] {
        double worst = 0.0;
        for (int n : {4, 10, 100}) {
            const Mesh1D mesh(n);
            const double h = mesh.h();
            const auto m = assemble_mass(mesh);
            const auto k = assemble_stiffness(mesh);
            for (int j = 1; j < n; ++j) {
                worst = std::max({worst,
                                  std::abs(m.sub[j - 1] - h / 6) / h,
                                  std::abs(m.diag[j] - 2 * h / 3) / h,
                                  std::abs(m.sup[j] - h / 6) / h,
                                  std::abs(k.sub[j - 1] + 1 / h) * h,
                                  std::abs(k.diag[j] - 2 / h) * h,
                                  std::abs(k.sup[j] + 1 / h) * h});
            }
        }
        return Outcome{worst <= 4 * std::numeric_limits<double>::epsilon(),
                       fmt("max relative row deviation %.2e over N in {4,10,100}", worst)};
    });

    criterion(2, "constant-forcing-oracle", 1.0, [] {
        const auto p = constant_case();
        const auto u = forward_solve(p, BoundaryControl::uniform(0.0, p.num_levels()), kConsistent);
        double gap = 0.0;
        for (int n = 0; n < u.num_levels(); ++n) {
            gap = std::max(gap, (u[n].array() - u.time(n) / 2).abs().maxCoeff());
        }
        return Outcome{gap <= 1e-12, fmt("max |u - t/2| = %.2e", gap)};
    });

    criterion(3, "steady-state-oracle", 5.0, [] {
        const auto p = constant_case(10.0, 100);
        const auto u = forward_solve(p, BoundaryControl::uniform(1.0, p.num_levels()), kConsistent);
        const Eigen::VectorXd exact = u.mesh.interpolate([](double x) { return 0.25 * (x - x * x + 1); });
        const double gap = (u[u.num_levels() - 1] - exact).cwiseAbs().maxCoeff();
        return Outcome{gap <= 1e-3, fmt("sup |u(T) - u*| = %.2e", gap)};
    });

    criterion(4, "adjoint-oracle", 1.0, [] {
        const auto p = constant_case();
        const auto beta = BoundaryControl::uniform(0.0, p.num_levels());
        const auto u = forward_solve(p, beta, kConsistent);
        const auto phi = adjoint_solve(p, beta, u, kConsistent);
        double gap = 0.0;
        for (int n = 0; n < phi.num_levels(); ++n) {
            gap = std::max(gap, (phi[n].array() - (p.horizon - phi.time(n))).abs().maxCoeff());
        }
        return Outcome{gap <= 1e-12, fmt("max |phi - (T - t)| = %.2e", gap)};
    });

    criterion(5, "sensitivity-consistency", 30.0, [] {
        bool ok = true;
        std::string detail;
        for (const auto& [name, p, limit] : {std::tuple{"constant", constant_case(), 5e-3},
                                             std::tuple{"catalog", catalog_case(), 5e-2}}) {
            const auto beta = BoundaryControl::uniform(0.55, p.num_levels());
            const auto e = sensitivity_fd_errors(p, beta, random_direction(p.num_levels(), 1), kConsistent,
                                                 {1e-2, 1e-3, 1e-4});
            ok = ok && e[1] < e[0] && e[2] < e[1] && e[2] <= limit;
            detail += fmt("%s %.1e/%.1e/%.1e  ", name, e[0], e[1], e[2]);
        }
        return Outcome{ok, detail};
    });

    criterion(6, "gradient-consistency", 60.0, [] {
        // Pairs the difference quotient with 2β + uφ, the density as stated.
        const auto p = catalog_case();
        const auto beta = BoundaryControl::uniform(0.55, p.num_levels());
        double stated = 0.0, corrected = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto l = random_direction(p.num_levels(), seed);
            stated = std::max(stated, gradient_fd_check(p, beta, l, kConsistent, 1e-4, plus_sign_density).relative_error);
            corrected = std::max(corrected, gradient_fd_check(p, beta, l, kConsistent, 1e-4).relative_error);
        }
        info(fmt("C6 with density 2*beta - u*phi (positive adjoint): worst relative error %.2e", corrected));
        return Outcome{stated <= 5e-2, fmt("density 2*beta + u*phi: worst relative error %.2e over seeds 1..5", stated)};
    });

    criterion(7, "switching-structure", 60.0, [] {
        const auto p = catalog_case();
        const auto r = forward_backward_sweep(p, BoundaryControl::uniform(p.box.min, p.num_levels()), kConsistent);
        const Eigen::VectorXd& b = r.control.left;
        // 0 = at m, 1 = interior, 2 = at M
        std::vector<int> label(b.size());
        for (Eigen::Index n = 0; n < b.size(); ++n) {
            label[n] = b[n] <= p.box.min + 1e-9 ? 0 : (b[n] >= p.box.max - 1e-9 ? 2 : 1);
        }
        const bool ordered = std::is_sorted(label.begin(), label.end());
        const bool ok = r.converged && label.front() == 0 && label.back() == 2 && ordered;
        const auto peak = std::max_element(b.begin(), b.end());
        return Outcome{ok, fmt("converged=%d first=%.3g last=%.3g max=%.3g at t=%.2f monotone=%d", r.converged, b[0],
                               b[b.size() - 1], *peak, (peak - b.begin()) * p.time_step, ordered)};
    });

    criterion(8, "steady-state-reached", 60.0, [] {
        const auto p = catalog_case(10.0);
        auto gap_for = [&](double beta) {
            const auto u = forward_solve(p, BoundaryControl::uniform(beta, p.num_levels()), kConsistent);
            const int last = u.num_levels() - 1;
            return (u[last] - u[last - 1]).cwiseAbs().maxCoeff();
        };
        info(fmt("C8 with beta = m = 0.1: last-step change %.2e", gap_for(p.box.min)));
        const double gap = gap_for(p.box.max);
        return Outcome{gap <= 1e-6, fmt("beta = M = 1, T = 10: last-step change %.2e", gap)};
    });

    criterion(9, "driver-agreement", 120.0, [] {
        const auto p = catalog_case();
        const auto sweep = forward_backward_sweep(p, BoundaryControl::uniform(p.box.min, p.num_levels()), kConsistent);
        const auto pgd =
            projected_gradient_descent(p, BoundaryControl::uniform(p.box.max, p.num_levels()), kConsistent);
        const double gap = sup_gap(sweep.control, pgd.control);
        const bool terminated = pgd.converged || pgd.status == DriverStatus::Stagnated;
        return Outcome{sweep.converged && terminated && gap <= 1e-3,
                       fmt("sup gap %.2e, J %.10f vs %.10f, sweep %s, gradient %s", gap, sweep.cost.total,
                           pgd.cost.total, to_string(sweep.status), to_string(pgd.status))};
    });

    criterion(10, "energy-monitors", 30.0, [] {
        const auto p = catalog_case(1.0);
        std::vector<double> energy, linf;
        for (auto [n, steps] : {std::pair{20, 100}, std::pair{40, 200}, std::pair{80, 400}}) {
            const auto q = refine(p, n, steps);
            const auto e = energy_bound_report(q, forward_solve(q, BoundaryControl::uniform(q.box.min, q.num_levels()),
                                                                kConsistent));
            energy.push_back(e.total);
            linf.push_back(e.max_linf);
        }
        auto spread = [](const std::vector<double>& v) {
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi / *lo;
        };
        const double se = spread(energy), sl = spread(linf);
        return Outcome{se < 2.0 && sl < 2.0, fmt("energy %.4g/%.4g/%.4g (x%.3f), Linf %.4g/%.4g/%.4g (x%.3f)", energy[0],
                                                 energy[1], energy[2], se, linf[0], linf[1], linf[2], sl)};
    });

    criterion(11, "ghost-row-fidelity", 1.0, [] {
        const Mesh1D mesh(10);
        const double h = mesh.h(), tau = 0.01;
        const double a = h / 6.0 - tau / h, b = 2.0 * h / 3.0 + 2.0 * tau / h;
        int mismatches = 0, checked = 0;
        auto expect = [&](bool same) {
            ++checked;
            mismatches += !same;
        };
        for (double bl : {0.0, 0.3}) {
            const double br = 0.7;
            const auto rows = scheme::paper_forward_rows(mesh, tau, bl, br);
            expect(rows.lhs.diag[0] == a * (1.0 + h * bl) + b + tau * bl / 2.0);
            expect(rows.lhs.sup[0] == 2.0 * a);
            expect(rows.rhs.diag[0] == h / 6.0 * (5.0 + h * bl));
            expect(rows.rhs.sup[0] == h / 3.0);
            for (int j = 1; j <= 8; ++j) {
                expect(rows.lhs.sub[j - 1] == a);
                expect(rows.lhs.diag[j] == b);
                expect(rows.lhs.sup[j] == a);
                expect(rows.rhs.sub[j - 1] == h / 6.0);
                expect(rows.rhs.diag[j] == 2.0 * h / 3.0);
                expect(rows.rhs.sup[j] == h / 6.0);
            }
            expect(rows.lhs.sub[8] == a);
            expect(rows.lhs.diag[9] == b + a / (1.0 + br * h));
            expect(rows.rhs.sub[8] == h / 6.0);
            expect(std::abs(rows.rhs.diag[9] - 2.0 * h / 3.0 * (1.0 + 1.0 / (4.0 * (1.0 + br * h)))) <= 1e-15 * h);
        }
        return Outcome{mismatches == 0, fmt("%d/%d coefficients match for N = 10, tau = 0.01", checked - mismatches,
                                            checked)};
    });

    std::printf("acceptance: %d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

#pragma once

#include "thermistor/optimal_control.hpp"
#include "thermistor/pde_solvers.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace thermistor {

/// Discrete counterpart of the a-priori bound ‖u‖²_{L²(H¹)} + ‖u‖²₂ <= c.
struct EnergyReport {
    double max_l2_sq = 0.0;           // max_n ‖uⁿ‖₂²
    double seminorm_integral = 0.0;   // ∫₀ᵀ ∫|∇u|² dx dt
    double boundary_integral = 0.0;   // ∫₀ᵀ m (u(0)² + u(1)²) dt
    double star_integral = 0.0;       // ∫₀ᵀ ‖u‖²_* dt
    double total = 0.0;               // max_l2_sq + star_integral
    double max_linf = 0.0;            // max_n ‖uⁿ‖∞
};

EnergyReport energy_bound_report(const ModelParams& p, const FieldHistory& u);

/// Brute-force reference trajectory: element-by-element Gauss assembly into
/// dense matrices, Picard iteration making the nonlocal source implicit, and
/// a dense LU per step. Shares nothing with the production assembly except
/// the mesh. Limited to N <= 200.
FieldHistory dense_reference_solve(const ModelParams& p, const BoundaryControl& beta);

/// Dense mass and stiffness matrices by 2-point Gauss quadrature per element.
Eigen::MatrixXd reference_mass_matrix(const Mesh1D& mesh);
Eigen::MatrixXd reference_stiffness_matrix(const Mesh1D& mesh);

/// max_n ‖aⁿ − bⁿ‖∞.
double max_level_gap(const FieldHistory& a, const FieldHistory& b);

struct SchemeDiscrepancy {
    std::vector<double> level_gaps;
    double max_gap = 0.0;
    double normalized_gap = 0.0;  // max_gap / (h + τ)
};

/// Runs forward_solve in both scheme modes and compares them level by level.
SchemeDiscrepancy scheme_cross_check(const ModelParams& p, const BoundaryControl& beta);

/// Piecewise-linear resampling of nodal values onto a mesh with n_elements.
Eigen::VectorXd resample_nodal(const Eigen::VectorXd& values, int n_elements);

/// Same problem on a different (N, steps) grid.
ModelParams refine(const ModelParams& p, int n_elements, int steps);

/// Relative sup-norm gaps ‖ψ − (u(β+εl) − u(β))/ε‖∞ / ‖ψ‖∞, one per ε.
std::vector<double> sensitivity_fd_errors(const ModelParams& p,
                                          const BoundaryControl& beta,
                                          const BoundaryControl& direction,
                                          SchemeMode mode,
                                          const std::vector<double>& epsilons);

struct GradientCheck {
    double finite_difference = 0.0;  // (J(β+εl) − J(β))/ε
    double predicted = 0.0;          // ∫_{S_T} l·g ds dt
    double relative_error = 0.0;
};

/// Compares the difference quotient of J against the pairing of l with the
/// supplied gradient density (computed from u(β), φ(β) by `density`).
GradientCheck gradient_fd_check(
    const ModelParams& p,
    const BoundaryControl& beta,
    const BoundaryControl& direction,
    SchemeMode mode,
    double epsilon,
    const std::function<BoundaryControl(const BoundaryControl&, const FieldHistory&, const FieldHistory&)>& density =
        gradient_direction);

/// Random smooth trajectory direction: on each side a combination of
/// cos(kπt/T), k < 4, with coefficients uniform in [-1, 1], scaled to ‖l‖∞ = 1.
BoundaryControl random_direction(int levels, std::uint64_t seed);

/// Matrix assemblers the verification suite checks; replaceable for fault injection.
struct AssemblyHooks {
    std::function<Tridiagonal<double>(const Mesh1D&)> mass = assemble_mass;
    std::function<Tridiagonal<double>(const Mesh1D&)> stiffness = assemble_stiffness;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
    bool advisory = false;  // reported but excluded from the overall verdict
};

/// True when every non-advisory check passed.
bool verification_passed(const std::vector<CheckResult>& results);

/// Runs the diagnostics suite on one problem; deterministic for a fixed seed.
std::vector<CheckResult> run_verification(const ModelParams& p,
                                          const BoundaryControl& beta,
                                          SchemeMode mode,
                                          std::uint64_t seed,
                                          const AssemblyHooks& hooks = {});

}  // namespace thermistor

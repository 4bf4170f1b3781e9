#pragma once

#include "thermistor/pde_solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thermistor {

struct CostBreakdown {
    double state_term = 0.0;    // ∫_{Q_T} u, or ∫_Ω u(T) for a constant control
    double control_term = 0.0;  // ∫_{S_T} β², or β² for a constant control
    double total = 0.0;
};

/// J(β). Trajectory controls use trapezoid quadrature in space and time;
/// constant controls use the time-free functional ∫_Ω u(T) dx + β².
CostBreakdown cost(const ModelParams& p, const BoundaryControl& beta, const FieldHistory& u);

/// Pointwise optimality law on ∂Ω × levels: β = min(max(u·φ/2, m), M).
///
/// φ is the adjoint of adjoint_solve() (source +1, φ(T) = 0), so the
/// directional derivative of J is ∫_{S_T} l (2β − uφ); the sign of the
/// u·φ term follows from that identity.
BoundaryControl project_control(const FieldHistory& u, const FieldHistory& phi, const ControlBox& box);

/// Which slice of ∂Ω × (0,T) feeds the constant-coefficient law.
enum class ConstantSlice { FinalLevel, TimeAverage };

/// Constant-coefficient law: β = min(max(½ ∫_{∂Ω} u φ ds, m), M), with the boundary
/// integral taken at the final level or averaged over time.
double project_constant_control(const Mesh1D& mesh,
                                const FieldHistory& u,
                                const FieldHistory& phi,
                                const ControlBox& box,
                                ConstantSlice slice = ConstantSlice::FinalLevel);

/// Gradient density g = 2β − uφ on both boundary points at every level.
BoundaryControl gradient_direction(const BoundaryControl& beta, const FieldHistory& u, const FieldHistory& phi);

/// ∫_{S_T} a·b ds dt with trapezoid weights in time.
double boundary_inner(const BoundaryControl& a, const BoundaryControl& b, double dt);

enum class DriverStatus { Converged, MaxIterations, Stagnated };

const char* to_string(DriverStatus status);

struct OptimalityReport {
    BoundaryControl control;
    CostBreakdown cost;
    int iterations = 0;
    int accepted_steps = 0;
    std::vector<double> control_residuals;
    std::vector<double> cost_history;
    double phi0_residual = 0.0;
    bool converged = false;
    DriverStatus status = DriverStatus::MaxIterations;
    std::optional<FieldHistory> state;    // u at the returned control
    std::optional<FieldHistory> adjoint;  // φ at the returned control
};

struct SweepOptions {
    double tol = 1e-6;
    int max_iter = 500;
    double relaxation = 0.5;
    ConstantSlice constant_slice = ConstantSlice::FinalLevel;
};

/// Fixed-point iteration on the optimality system:
/// β ← (1 − r)·β + r·project_control(u(β), φ(β)), stopping on sup|Δβ| <= tol.
/// A Constant-kind starting control iterates the constant-coefficient law instead.
OptimalityReport forward_backward_sweep(const ModelParams& p,
                                        const BoundaryControl& beta0,
                                        SchemeMode mode,
                                        const SweepOptions& options = {});

struct GradientOptions {
    double step = 0.5;
    double tol = 1e-6;
    int max_iter = 500;
    double min_step = 1e-8;
};

/// β ← clamp(β − s·g(β), m, M) with s halved while J increases.
/// control_residuals holds sup|β − clamp(β − g)|, the projected-gradient norm.
OptimalityReport projected_gradient_descent(const ModelParams& p,
                                            const BoundaryControl& beta0,
                                            SchemeMode mode,
                                            const GradientOptions& options = {});

}  // namespace thermistor

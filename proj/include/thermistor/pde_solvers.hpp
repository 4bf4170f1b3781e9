#pragma once

#include "thermistor/fem1d.hpp"
#include "thermistor/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace thermistor {

/// Which discrete system each time step solves.
///
/// PaperFaithful assembles the ghost-point row recurrences as stated: ghost-node
/// elimination at x = 0, nodal elimination of x = 1, and the nonlocal source
/// lumped onto the first equation. ConsistentGalerkin is the textbook
/// backward Euler–Galerkin scheme with trapezoid quadrature of the source and
/// Robin terms on the boundary diagonal.
enum class SchemeMode { PaperFaithful, ConsistentGalerkin };

const char* to_string(SchemeMode mode);

/// Nodal coefficients of a space-time field at every level t_n = n·dt.
struct FieldHistory {
    Mesh1D mesh;
    double dt;
    std::vector<NodalField> levels;

    FieldHistory(Mesh1D m, double step, std::vector<NodalField> values)
        : mesh(m), dt(step), levels(std::move(values)) {}

    int num_levels() const { return static_cast<int>(levels.size()); }
    double time(int n) const { return n * dt; }
    const NodalField& operator[](int n) const { return levels[static_cast<std::size_t>(n)]; }
    NodalField& operator[](int n) { return levels[static_cast<std::size_t>(n)]; }

    double max_abs() const;
    bool same_grid(const FieldHistory& o) const;
};

/// Heat-transfer coefficient on ∂Ω = {0, 1}, one value per time level and end.
///
/// The Constant kind carries a single value; left/right are filled with it so
/// that every consumer can read per-level values uniformly.
struct BoundaryControl {
    enum class Kind { Trajectory, Constant };

    Kind kind = Kind::Trajectory;
    Eigen::VectorXd left;
    Eigen::VectorXd right;
    double constant_value = 0.0;

    static BoundaryControl trajectory(Eigen::VectorXd left, Eigen::VectorXd right);
    static BoundaryControl uniform(double value, int levels);
    static BoundaryControl constant(double value, int levels);

    int num_levels() const { return static_cast<int>(left.size()); }
    bool all_finite() const { return left.allFinite() && right.allFinite() && std::isfinite(constant_value); }
    bool within(const ControlBox& box) const;

    /// sup over both ends and all levels of |this - other|.
    double sup_distance(const BoundaryControl& other) const;
};

/// State u: u(0) = u₀, stepped forward with the nonlocal source taken at the previous level.
FieldHistory forward_solve(const ModelParams& p, const BoundaryControl& beta, SchemeMode mode);

/// Adjoint φ: φ(T) = 0, stepped backward with source +1 and the nonlocal f′(u) coupling
/// evaluated at the already-known later level. φ(0) is not enforced; see phi0_residual().
FieldHistory adjoint_solve(const ModelParams& p,
                           const BoundaryControl& beta,
                           const FieldHistory& u,
                           SchemeMode mode);

/// Sensitivity ψ = du/dβ·l: ψ(0) = 0, linearized nonlocal terms explicit at level n,
/// boundary load -l·u through the Robin term.
FieldHistory sensitivity_solve(const ModelParams& p,
                               const BoundaryControl& beta,
                               const FieldHistory& u,
                               const BoundaryControl& direction,
                               SchemeMode mode);

/// ‖φ(0)‖∞, the residual of the initial condition the adjoint cannot also satisfy.
double phi0_residual(const FieldHistory& phi);

/// Fields larger than this in magnitude are treated as divergent.
inline constexpr double kDivergenceThreshold = 1e12;

namespace scheme {

/// λ f(u) v_j / (∫ f(u))² by nodal quadrature, one entry per node.
Eigen::VectorXd nonlocal_source(const ModelParams& p, const Mesh1D& mesh, const NodalField& u);

/// Directional derivative of nonlocal_source at u along psi.
Eigen::VectorXd nonlocal_source_jvp(const ModelParams& p, const Mesh1D& mesh, const NodalField& u,
                                    const NodalField& psi);

/// Transposed derivative of nonlocal_source at u applied to phi (adjoint coupling load).
Eigen::VectorXd nonlocal_source_vjp(const ModelParams& p, const Mesh1D& mesh, const NodalField& u,
                                    const NodalField& phi);

/// A + τB + τ diag(β_left, 0, ..., 0, β_right).
Tridiagonal<double> consistent_step_matrix(const Mesh1D& mesh, double tau, double beta_left, double beta_right);

/// Rows of the ghost-point scheme on the unknowns 0..N-1 (node N is eliminated).
/// lhs multiplies the new level, rhs the previous level.
struct PaperRows {
    Tridiagonal<double> lhs;
    Tridiagonal<double> rhs;
};

/// Forward rows with a = h/6 - τ/h, b = 2h/3 + 2τ/h.
PaperRows paper_forward_rows(const Mesh1D& mesh, double tau, double beta_left, double beta_right);

/// Boundary-lumped source 2λτ f(α₀) / (f(α₀) + f(α_N))², added to the first row only.
double paper_forward_source(const ModelParams& p, const NodalField& u);

/// Adjoint rows with c = -h/6 - τ/h, d = -2h/3 + 2τ/h. lhs multiplies μ at the later
/// level t_{n+1} and includes the f′ coupling on its first diagonal entry; rhs is the
/// mass-like operator on the earlier level t_n (negated when moved across).
PaperRows paper_adjoint_rows(const ModelParams& p,
                             const Mesh1D& mesh,
                             double tau,
                             double beta_left,
                             double beta_right,
                             const NodalField& u_n);

}  // namespace scheme

}  // namespace thermistor

#pragma once

#include "thermistor/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace thermistor {

/// Nodal coefficients of a piecewise-linear field at one time level.
using NodalField = Eigen::VectorXd;

/// Uniform partition 0 = x_0 < x_1 < ... < x_N = 1 carrying the hat basis.
class Mesh1D {
public:
    explicit Mesh1D(int n_elements);

    int n_elements() const { return n_elements_; }
    int n_nodes() const { return n_elements_ + 1; }
    double h() const { return h_; }
    double node(int j) const { return j == n_elements_ ? 1.0 : j * h_; }
    Eigen::VectorXd nodes() const;

    /// Evaluates f at every node.
    template <typename F>
    NodalField interpolate(F&& f) const {
        NodalField out(n_nodes());
        for (int j = 0; j < n_nodes(); ++j) out[j] = f(node(j));
        return out;
    }

    friend bool operator==(const Mesh1D& a, const Mesh1D& b) { return a.n_elements_ == b.n_elements_; }

private:
    int n_elements_;
    double h_;
};

/// Tridiagonal matrix stored by diagonals.
template <typename Scalar>
struct Tridiagonal {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector sub;   // length n-1, entry i sits at (i+1, i)
    Vector diag;  // length n
    Vector sup;   // length n-1, entry i sits at (i, i+1)

    Tridiagonal() = default;
    explicit Tridiagonal(Eigen::Index n)
        : sub(Vector::Zero(n > 0 ? n - 1 : 0)), diag(Vector::Zero(n)), sup(Vector::Zero(n > 0 ? n - 1 : 0)) {}

    Eigen::Index size() const { return diag.size(); }

    bool consistent() const {
        const Eigen::Index n = diag.size();
        return sub.size() == std::max<Eigen::Index>(n - 1, 0) && sup.size() == std::max<Eigen::Index>(n - 1, 0);
    }

    bool all_finite() const { return sub.allFinite() && diag.allFinite() && sup.allFinite(); }

    template <typename Derived>
    Vector operator*(const Eigen::MatrixBase<Derived>& x) const {
        const Eigen::Index n = size();
        Vector y = diag.cwiseProduct(x);
        if (n > 1) {
            y.head(n - 1) += sup.cwiseProduct(x.tail(n - 1));
            y.tail(n - 1) += sub.cwiseProduct(x.head(n - 1));
        }
        return y;
    }

    Tridiagonal operator+(const Tridiagonal& o) const {
        Tridiagonal r;
        r.sub = sub + o.sub;
        r.diag = diag + o.diag;
        r.sup = sup + o.sup;
        return r;
    }

    Tridiagonal operator*(Scalar s) const {
        Tridiagonal r;
        r.sub = sub * s;
        r.diag = diag * s;
        r.sup = sup * s;
        return r;
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
        const Eigen::Index n = size();
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
        m.diagonal() = diag;
        if (n > 1) {
            m.diagonal(1) = sup;
            m.diagonal(-1) = sub;
        }
        return m;
    }
};

/// Thomas elimination. Throws SingularSystemError when a pivot drops below
/// 1e-14 times the magnitude of its row.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> thomas_solve(const Tridiagonal<Scalar>& t,
                                                      const Eigen::MatrixBase<Derived>& rhs) {
    using std::abs;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = t.size();
    if (!t.consistent()) throw ContractError("tridiagonal diagonals have inconsistent lengths");
    if (rhs.size() != n) throw ContractError("right-hand side length does not match the system size");
    if (n == 0) return Vector();

    Vector c(n);  // modified super-diagonal
    Vector d(n);  // modified right-hand side
    auto row_scale = [&](Eigen::Index i) {
        Scalar s = abs(t.diag[i]);
        if (i > 0) s = std::max(s, Scalar(abs(t.sub[i - 1])));
        if (i + 1 < n) s = std::max(s, Scalar(abs(t.sup[i])));
        return s;
    };
    auto check_pivot = [&](Scalar pivot, Eigen::Index i) {
        const Scalar scale = row_scale(i);
        if (!(abs(pivot) > Scalar(1e-14) * scale) || scale == Scalar(0)) {
            throw SingularSystemError("zero pivot in tridiagonal solve at row " + std::to_string(i));
        }
    };

    Scalar pivot = t.diag[0];
    check_pivot(pivot, 0);
    c[0] = n > 1 ? t.sup[0] / pivot : Scalar(0);
    d[0] = rhs[0] / pivot;
    for (Eigen::Index i = 1; i < n; ++i) {
        pivot = t.diag[i] - t.sub[i - 1] * c[i - 1];
        check_pivot(pivot, i);
        c[i] = i + 1 < n ? t.sup[i] / pivot : Scalar(0);
        d[i] = (rhs[i] - t.sub[i - 1] * d[i - 1]) / pivot;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
    return d;
}

/// Consistent mass matrix: interior rows (h/6, 2h/3, h/6), boundary diagonal h/3.
Tridiagonal<double> assemble_mass(const Mesh1D& mesh);

/// Stiffness matrix: interior rows (-1/h, 2/h, -1/h), boundary diagonal 1/h.
Tridiagonal<double> assemble_stiffness(const Mesh1D& mesh);

/// Trapezoid weights (h/2, h, ..., h, h/2); equal to the row sums of the mass matrix.
Eigen::VectorXd trapezoid_weights(const Mesh1D& mesh);

/// Trapezoid rule over [0,1]; exact for piecewise-linear integrands.
template <typename Derived>
typename Derived::Scalar integrate_nodal(const Mesh1D& mesh, const Eigen::MatrixBase<Derived>& g) {
    const Eigen::Index n = g.size();
    if (n != mesh.n_nodes()) throw ContractError("nodal field length does not match the mesh");
    return mesh.h() * (g.sum() - (g[0] + g[n - 1]) / 2);
}

/// (g_0, g_N).
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> boundary_trace(const Eigen::MatrixBase<Derived>& g) {
    if (g.size() == 0) throw ContractError("boundary trace of an empty field");
    return {g[0], g[g.size() - 1]};
}

/// Discrete H¹ seminorm squared, Σ (g_{j+1} - g_j)² / h.
template <typename Derived>
typename Derived::Scalar h1_seminorm_sq(const Mesh1D& mesh, const Eigen::MatrixBase<Derived>& g) {
    if (g.size() != mesh.n_nodes()) throw ContractError("nodal field length does not match the mesh");
    const Eigen::Index n = g.size();
    return (g.tail(n - 1) - g.head(n - 1)).squaredNorm() / mesh.h();
}

/// ‖g‖²_* = ∫|g'|² dx + m (g(0)² + g(1)²).
template <typename Derived>
typename Derived::Scalar star_norm_sq(const Mesh1D& mesh, const Eigen::MatrixBase<Derived>& g, double m) {
    const auto [g0, gn] = boundary_trace(g);
    return h1_seminorm_sq(mesh, g) + m * (g0 * g0 + gn * gn);
}

/// L²(0,1) norm squared of the piecewise-linear interpolant, gᵀ A g.
double mass_norm_sq(const Mesh1D& mesh, const Eigen::Ref<const Eigen::VectorXd>& g);

}  // namespace thermistor

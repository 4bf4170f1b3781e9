#include "thermistor/fem1d.hpp"

namespace thermistor {

Mesh1D::Mesh1D(int n_elements) : n_elements_(n_elements), h_(0.0) {
    if (n_elements < 1) throw ContractError("mesh needs at least one element");
    h_ = 1.0 / n_elements;
}

Eigen::VectorXd Mesh1D::nodes() const {
    Eigen::VectorXd x(n_nodes());
    for (int j = 0; j < n_nodes(); ++j) x[j] = node(j);
    return x;
}

Tridiagonal<double> assemble_mass(const Mesh1D& mesh) {
    const int n = mesh.n_nodes();
    const double h = mesh.h();
    Tridiagonal<double> a(n);
    a.diag.setConstant(2.0 * h / 3.0);
    a.diag[0] = h / 3.0;
    a.diag[n - 1] = h / 3.0;
    a.sub.setConstant(h / 6.0);
    a.sup.setConstant(h / 6.0);
    return a;
}

Tridiagonal<double> assemble_stiffness(const Mesh1D& mesh) {
    const int n = mesh.n_nodes();
    const double inv_h = 1.0 / mesh.h();
    Tridiagonal<double> b(n);
    b.diag.setConstant(2.0 * inv_h);
    b.diag[0] = inv_h;
    b.diag[n - 1] = inv_h;
    b.sub.setConstant(-inv_h);
    b.sup.setConstant(-inv_h);
    return b;
}

Eigen::VectorXd trapezoid_weights(const Mesh1D& mesh) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(mesh.n_nodes(), mesh.h());
    w[0] = w[mesh.n_nodes() - 1] = mesh.h() / 2.0;
    return w;
}

double mass_norm_sq(const Mesh1D& mesh, const Eigen::Ref<const Eigen::VectorXd>& g) {
    if (g.size() != mesh.n_nodes()) throw ContractError("nodal field length does not match the mesh");
    return g.dot(assemble_mass(mesh) * g);
}

}  // namespace thermistor

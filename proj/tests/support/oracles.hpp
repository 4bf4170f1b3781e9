#pragma once

// Reference computations for the test suite. Nothing here calls the library's
// assembly or solvers; everything is written from first principles with
// std::vector so it can serve as an independent check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

// Gaussian elimination with partial pivoting on a dense copy.
inline Vector dense_solve(Matrix a, Vector b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        if (a[p][k] == 0.0) throw std::runtime_error("singular oracle system");
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    Vector x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

// Hat function j on the uniform mesh with n elements, and its derivative.
inline double hat(int j, int n, double x) {
    const double h = 1.0 / n;
    const double d = std::abs(x - j * h);
    return d >= h ? 0.0 : 1.0 - d / h;
}

inline double hat_slope(int j, int n, double x) {
    const double h = 1.0 / n;
    const double xj = j * h;
    if (x > xj - h && x < xj) return 1.0 / h;
    if (x > xj && x < xj + h) return -1.0 / h;
    return 0.0;
}

// Simpson's rule per element; exact for the quadratic products of hats.
inline double integrate_elements(int n, const std::function<double(double)>& g) {
    const double h = 1.0 / n;
    double s = 0.0;
    for (int e = 0; e < n; ++e) {
        const double a = e * h;
        s += h / 6.0 * (g(a) + 4.0 * g(a + h / 2.0) + g(a + h));
    }
    return s;
}

inline Matrix mass_matrix(int n) {
    Matrix m(n + 1, Vector(n + 1, 0.0));
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            m[i][j] = integrate_elements(n, [&](double x) { return hat(i, n, x) * hat(j, n, x); });
        }
    }
    return m;
}

// Slopes are constant per element, so the element midpoint avoids the kinks.
inline Matrix stiffness_matrix(int n) {
    Matrix k(n + 1, Vector(n + 1, 0.0));
    const double h = 1.0 / n;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            double s = 0.0;
            for (int e = 0; e < n; ++e) {
                const double mid = (e + 0.5) * h;
                s += h * hat_slope(i, n, mid) * hat_slope(j, n, mid);
            }
            k[i][j] = s;
        }
    }
    return k;
}

// -y'' = s on (0,1) with -y'(0) + b0 y(0) = 0 and y'(1) + b1 y(1) = 0,
// second-order central differences with ghost points, n intervals.
inline Vector robin_bvp(int n, double source, double b0, double b1) {
    const double h = 1.0 / n;
    Matrix a(n + 1, Vector(n + 1, 0.0));
    Vector rhs(n + 1, source * h * h);
    for (int i = 0; i <= n; ++i) {
        a[i][i] = 2.0;
        if (i > 0) a[i][i - 1] = -1.0;
        if (i < n) a[i][i + 1] = -1.0;
    }
    // ghost y_{-1} = y_1 - 2h b0 y_0, y_{n+1} = y_{n-1} - 2h b1 y_n
    a[0][1] = -2.0;
    a[0][0] = 2.0 + 2.0 * h * b0;
    a[n][n - 1] = -2.0;
    a[n][n] = 2.0 + 2.0 * h * b1;
    return dense_solve(a, rhs);
}

}  // namespace oracle

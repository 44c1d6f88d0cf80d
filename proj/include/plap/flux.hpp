#pragma once

#include <cmath>
#include <cstddef>

namespace plap {

/// Pointwise flux nonlinearity of the regularized p-Laplacian,
///   F(z) = (|z|^2 + delta^2)^((p-2)/2) z,
/// and its Jacobian
///   DF_ij(z) = (p-2)(|z|^2 + delta^2)^((p-4)/2) z_i z_j
///            + delta_ij (|z|^2 + delta^2)^((p-2)/2).
/// DF is symmetric positive semidefinite for p >= 2, so the prox Hessian
/// I + lambda * A'(v) assembled from it is SPD.

inline double flux_coeff(double m2, double p) {
    // m2 = |z|^2 + delta^2
    return m2 > 0.0 ? std::pow(m2, 0.5 * (p - 2.0)) : 0.0;
}

inline void flux_vec(const double* z, int nz, double p, double delta, double* out) {
    double m2 = delta * delta;
    for (int i = 0; i < nz; ++i) m2 += z[i] * z[i];
    const double c = flux_coeff(m2, p);
    for (int i = 0; i < nz; ++i) out[i] = c * z[i];
}

/// out = DF(z) w.  Finite for every z, including z = 0 with delta = 0 and 2 < p < 4.
inline void flux_jac_apply(const double* z, const double* w, int nz, double p, double delta,
                           double* out) {
    double m2 = delta * delta;
    double zw = 0.0;
    for (int i = 0; i < nz; ++i) {
        m2 += z[i] * z[i];
        zw += z[i] * w[i];
    }
    const double c = flux_coeff(m2, p);
    const double r = (m2 > 0.0) ? (p - 2.0) * c / m2 * zw : 0.0;
    for (int i = 0; i < nz; ++i) out[i] = c * w[i] + r * z[i];
}

/// w^T DF(z) w without forming the matrix (diagonal assembly).
inline double flux_jac_quad(const double* z, const double* w, int nz, double p, double delta) {
    double m2 = delta * delta;
    double zw = 0.0, ww = 0.0;
    for (int i = 0; i < nz; ++i) {
        m2 += z[i] * z[i];
        zw += z[i] * w[i];
        ww += w[i] * w[i];
    }
    const double c = flux_coeff(m2, p);
    const double r = (m2 > 0.0) ? (p - 2.0) * c / m2 * zw * zw : 0.0;
    return c * ww + r;
}

}  // namespace plap

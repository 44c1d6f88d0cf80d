#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "plap/grid.hpp"
#include "plap/operator.hpp"

namespace plap {

/// Drift and diffusion coefficients read off one PDE field:
///   drift  b = grad((|grad u|^2 + delta^2)^((p-2)/2))    (length/time)
///   sigma  s = (|grad u|^2 + delta^2)^((p-2)/4)          (the sqrt(2) of the
///              noise term is applied by the particle stepper, not here)
/// Both live at cell centers and are frozen over one PDE step.
struct CoefficientField {
    Grid grid;
    std::array<std::vector<double>, 2> drift;
    std::vector<double> sigma;
    double time = 0.0;
};

namespace detail {
/// Cell-centered gradient of cell data: average of the two adjacent face
/// differences per axis, i.e. central differences with zero extension.
inline std::array<std::vector<double>, 2> cell_gradient(const Grid& g,
                                                        const std::vector<double>& vals) {
    ScalarField tmp(g);
    tmp.v = vals;
    GradientField gf = gradient(tmp);
    return gf.center;
}

inline std::vector<double> grad_mag2_cells(const ScalarField& u) {
    GradientField gf = gradient(u);
    std::vector<double> m2(u.grid.cells(), 0.0);
    for (int ax = 0; ax < u.grid.dim; ++ax)
        for (long c = 0; c < u.grid.cells(); ++c) m2[c] += gf.center[ax][c] * gf.center[ax][c];
    return m2;
}
}  // namespace detail

inline std::vector<double> diffusion_coeff(const ScalarField& u, double p, double delta) {
    std::vector<double> s = detail::grad_mag2_cells(u);
    const double d2 = delta * delta;
    for (double& v : s) v = std::pow(v + d2, 0.25 * (p - 2.0));
    return s;
}

inline std::array<std::vector<double>, 2> drift_coeff(const ScalarField& u, double p,
                                                      double delta) {
    std::vector<double> phi = detail::grad_mag2_cells(u);
    const double d2 = delta * delta;
    for (double& v : phi) v = std::pow(v + d2, 0.5 * (p - 2.0));
    return detail::cell_gradient(u.grid, phi);
}

inline CoefficientField make_coefficients(const ScalarField& u, double p, double delta,
                                          double time) {
    CoefficientField c;
    c.grid = u.grid;
    c.sigma = diffusion_coeff(u, p, delta);
    c.drift = drift_coeff(u, p, delta);
    c.time = time;
    return c;
}

/// L2 norm of the discrete mismatch between the divergence form and its
/// Fokker-Planck rewrite,
///   div(|grad u|^(p-2) grad u) - Lap(|grad u|^(p-2) u) + div(u grad(|grad u|^(p-2))),
/// assembled from three independently composed discretizations and measured
/// over cells at least 3 cells from the boundary (where all three stencils
/// are complete).  The operators do not commute on the grid; the residual
/// must vanish under refinement with order >= 1 on smooth fields.
inline double fp_consistency_residual(const ScalarField& u, double p, double delta) {
    const Grid& g = u.grid;
    const long m = g.cells();
    const double d2 = delta * delta;

    // T1 = div(F(grad u)) on faces (the evolution operator, sign flipped).
    ScalarField t1 = apply_A(u, OperatorParams{p, 0.0, delta});
    for (long c = 0; c < m; ++c) t1[c] = -t1[c];

    // phi = (|grad u|^2 + delta^2)^((p-2)/2) at cells.
    std::vector<double> phi = detail::grad_mag2_cells(u);
    for (double& v : phi) v = std::pow(v + d2, 0.5 * (p - 2.0));

    // T2 = Lap(phi u) as divergence of face gradients.
    ScalarField pu(g);
    for (long c = 0; c < m; ++c) pu[c] = phi[c] * u[c];
    ScalarField t2 = divergence(face_gradient(pu));

    // T3 = div(u b) with b = grad(phi) at cells, central differences per axis.
    std::array<std::vector<double>, 2> b = detail::cell_gradient(g, phi);
    ScalarField t3(g);
    for (int ax = 0; ax < g.dim; ++ax) {
        std::vector<double> ub(m);
        for (long c = 0; c < m; ++c) ub[c] = u[c] * b[ax][c];
        std::array<std::vector<double>, 2> dub = detail::cell_gradient(g, ub);
        for (long c = 0; c < m; ++c) t3[c] += dub[ax][c];
    }

    ScalarField res(g);
    const int n = g.n;
    auto interior = [&](int ix, int iy) {
        return ix >= 3 && ix < n - 3 && (g.dim == 1 || (iy >= 3 && iy < n - 3));
    };
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < (g.dim == 1 ? 1 : n); ++iy) {
            const long c = g.index(ix, iy);
            res[c] = interior(ix, iy) ? t1[c] - t2[c] + t3[c] : 0.0;
        }
    return l2_norm(res);
}

/// Per-field functionals recorded at every step for the estimate checks.
struct FieldFunctionals {
    double min = 0.0;
    double gsup_x = 0.0, gsup_y = 0.0;  // face-difference sup per axis
    double grad_l2 = 0.0;               // | |grad u| |_2
    double int_pm2 = 0.0;               // integral |grad u|^(p-2)
    double int_drift_abs = 0.0;         // integral |grad(|grad u|^(p-2))|
    double int_gp2_sq = 0.0;            // integral |grad(|grad u|^(p/2))|^2
};

inline FieldFunctionals field_functionals(const ScalarField& u, double p) {
    FieldFunctionals out;
    const Grid& g = u.grid;
    const long m = g.cells();
    const double vol = g.cell_volume();
    out.min = min_value(u);
    auto gs = gradient_sup_per_axis(u);
    out.gsup_x = gs[0];
    out.gsup_y = gs[1];

    std::vector<double> m2 = detail::grad_mag2_cells(u);
    double s_m2 = 0.0, s_pm2 = 0.0;
    std::vector<double> phi(m), w(m);
    for (long c = 0; c < m; ++c) {
        s_m2 += m2[c];
        s_pm2 += std::pow(m2[c], 0.5 * (p - 2.0));
        phi[c] = std::pow(m2[c], 0.5 * (p - 2.0));
        w[c] = std::pow(m2[c], 0.25 * p);
    }
    out.grad_l2 = std::sqrt(s_m2 * vol);
    out.int_pm2 = s_pm2 * vol;

    auto b = detail::cell_gradient(g, phi);
    auto gw = detail::cell_gradient(g, w);
    double s_b = 0.0, s_gw = 0.0;
    for (long c = 0; c < m; ++c) {
        double b2 = 0.0, gw2 = 0.0;
        for (int ax = 0; ax < g.dim; ++ax) {
            b2 += b[ax][c] * b[ax][c];
            gw2 += gw[ax][c] * gw[ax][c];
        }
        s_b += std::sqrt(b2);
        s_gw += gw2;
    }
    out.int_drift_abs = s_b * vol;
    out.int_gp2_sq = s_gw * vol;
    return out;
}

}  // namespace plap

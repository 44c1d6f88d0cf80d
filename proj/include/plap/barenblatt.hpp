#pragma once

#include <cmath>
#include <vector>

#include "plap/errors.hpp"
#include "plap/grid.hpp"

namespace plap {

/// Self-similar source solution of the p-Laplace flow (p > 2),
///   B(t, x) = t^(-d beta) G(|x| t^(-beta)),
///   G(xi)   = (C1 - q xi^(p/(p-1)))_+^((p-1)/(p-2)),
///   beta    = 1 / (d(p-2) + p).
/// q comes from the radial profile ODE  (-G')^(p-1) = beta xi G  and C1 from
/// mass normalization by quadrature; both are validated downstream by the
/// pde_residual refinement check with a perturbed-q negative control, never
/// trusted as literals.
struct BarenblattProfile {
    double p = 4.0;
    int d = 1;
    double total_mass = 1.0;
    double beta = 0.0;
    double kappa = 0.0;  // p/(p-1)
    double expo = 0.0;   // (p-1)/(p-2)
    double q = 0.0;
    double C1 = 0.0;
    double c_fb = 0.0;  // free boundary radius r(t) = c_fb t^beta

    double radius(double t) const { return c_fb * std::pow(t, beta); }

    double profile(double xi) const {
        const double a = C1 - q * std::pow(std::abs(xi), kappa);
        return a > 0.0 ? std::pow(a, expo) : 0.0;
    }

    double value_radial(double t, double r) const {
        const double tb = std::pow(t, beta);
        return std::pow(t, -d * beta) * profile(std::abs(r) / tb);
    }

    double value(double t, double x, double y = 0.0) const {
        return value_radial(t, d == 1 ? std::abs(x) : std::hypot(x, y));
    }

    ScalarField sample(const Grid& g, double t) const {
        return sample_function(g, [&](double x, double y) { return value(t, x, y); });
    }
};

namespace detail {
/// integral_0^1 (1 - s^kappa)^m s^(d-1) ds by composite midpoint.
inline double shape_integral(double kappa, double m, int d, long npts = 400000) {
    double s = 0.0;
    const double h = 1.0 / npts;
    for (long i = 0; i < npts; ++i) {
        const double x = (i + 0.5) * h;
        s += std::pow(1.0 - std::pow(x, kappa), m) * (d == 2 ? x : 1.0);
    }
    return s * h;
}
}  // namespace detail

inline BarenblattProfile make_barenblatt(double p, int d, double total_mass = 1.0) {
    if (!(p > 2.0)) throw Error("barenblatt profile requires p > 2");
    if (d != 1 && d != 2) throw Error("barenblatt profile requires d in {1,2}");
    BarenblattProfile b;
    b.p = p;
    b.d = d;
    b.total_mass = total_mass;
    b.beta = 1.0 / (d * (p - 2.0) + p);
    b.kappa = p / (p - 1.0);
    b.expo = (p - 1.0) / (p - 2.0);
    b.q = (p - 2.0) / p * std::pow(b.beta, 1.0 / (p - 1.0));
    const double I = detail::shape_integral(b.kappa, b.expo, d);
    const double S = (d == 1) ? 2.0 : 2.0 * M_PI;
    const double coef = S * std::pow(b.q, -d / b.kappa) * I;
    b.C1 = std::pow(total_mass / coef, 1.0 / (b.expo + d / b.kappa));
    b.c_fb = std::pow(b.C1 / b.q, 1.0 / b.kappa);
    return b;
}

/// Sup over sampled interior cells of |dB/dt - div(|grad B|^(p-2) grad B)|,
/// with centered finite differences independent of the solver stencils.
/// Cells within `margin` cells of the free boundary or of the origin are
/// excluded: the profile is merely Hoelder at the front and at its central
/// cusp, and pointwise stencils cannot converge there.  Goes to zero under
/// grid refinement iff the profile constants solve the equation; a wrong q
/// leaves an O(1) residual across the whole support.
inline double pde_residual(const BarenblattProfile& b, double t, const Grid& g,
                           double margin_cells = 5.0) {
    if (!(t > 0.0)) throw Error("pde_residual: t must be positive");
    const int n = g.n;
    const double h = g.h;
    const double tau = h;  // time step of the centered d/dt difference
    // The margin must not shrink to a fixed cell count under refinement: at a
    // fixed number of cells from either Hoelder point the stencil error is
    // h-independent by self-similarity.
    const double margin = std::max(margin_cells * h, 0.08 * b.radius(t));
    const double rin = b.radius(t) - margin;
    const double rout = margin;
    if (rin <= rout + 2.0 * h) return 0.0;

    ScalarField u = b.sample(g, t);
    ScalarField up = b.sample(g, t + tau);
    ScalarField um = b.sample(g, t - tau > 0.0 ? t - tau : 0.5 * t);
    const double dt_span = (t - tau > 0.0) ? 2.0 * tau : tau + 0.5 * t;

    // Cell-centered flux by central differences, then central divergence.
    const long m = g.cells();
    std::array<std::vector<double>, 2> flux;
    for (int ax = 0; ax < g.dim; ++ax) flux[ax].assign(m, 0.0);
    auto at = [&](const ScalarField& w, int ix, int iy) {
        return (ix >= 0 && ix < n && iy >= 0 && iy < n) ? w[g.index(ix, iy)] : 0.0;
    };
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < (g.dim == 1 ? 1 : n); ++iy) {
            const double gx = (at(u, ix + 1, iy) - at(u, ix - 1, iy)) / (2 * h);
            const double gy =
                g.dim == 1 ? 0.0 : (at(u, ix, iy + 1) - at(u, ix, iy - 1)) / (2 * h);
            const double mag2 = gx * gx + gy * gy;
            const double c = mag2 > 0.0 ? std::pow(mag2, 0.5 * (b.p - 2.0)) : 0.0;
            flux[0][g.index(ix, iy)] = c * gx;
            if (g.dim == 2) flux[1][g.index(ix, iy)] = c * gy;
        }
    auto flux_at = [&](int ax, int ix, int iy) {
        return (ix >= 0 && ix < n && iy >= 0 && iy < n) ? flux[ax][g.index(ix, iy)] : 0.0;
    };

    double worst = 0.0;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < (g.dim == 1 ? 1 : n); ++iy) {
            const double x = g.coord(ix);
            const double y = g.dim == 1 ? 0.0 : g.coord(iy);
            const double rad = std::hypot(x, y);
            if (rad > rin || rad < rout) continue;
            const long c = g.index(ix, iy);
            double divf = (flux_at(0, ix + 1, iy) - flux_at(0, ix - 1, iy)) / (2 * h);
            if (g.dim == 2) divf += (flux_at(1, ix, iy + 1) - flux_at(1, ix, iy - 1)) / (2 * h);
            const double dudt = (up[c] - um[c]) / dt_span;
            worst = std::max(worst, std::abs(dudt - divf));
        }
    return worst;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long k = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++k;
    }
    if (k < 2) throw Error("fit_loglog_slope: need at least two positive samples");
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// One measured support-radius history; times are absolute (run time plus
/// the self-similar offset of the initial datum, when applicable).
struct SupportRun {
    std::vector<double> times;
    std::vector<double> radii;
    double init_mass = 1.0;
};

/// Support-growth constant: the max over runs and steps of
///   r(t) / (t^beta m^((p-2) beta)),
/// with 20% headroom.  Requires at least two runs.
inline double calibrate_support_constant(const std::vector<SupportRun>& runs, double p, int d) {
    if (runs.size() < 2) throw Error("calibrate_support_constant: need at least two runs");
    const double beta = 1.0 / (d * (p - 2.0) + p);
    double worst = 0.0;
    for (const SupportRun& run : runs)
        for (size_t i = 0; i < run.times.size(); ++i) {
            if (!(run.times[i] > 0.0)) continue;
            const double denom =
                std::pow(run.times[i], beta) * std::pow(run.init_mass, (p - 2.0) * beta);
            worst = std::max(worst, run.radii[i] / denom);
        }
    if (!(worst > 0.0)) throw Error("calibrate_support_constant: no usable samples");
    return 1.2 * worst;
}

}  // namespace plap

#pragma once

#include <cmath>

#include "plap/flux.hpp"
#include "plap/grid.hpp"

namespace plap {

/// Parameters of the evolution operator
///   A u = -div((|grad u|^2 + delta^2)^((p-2)/2) grad u) - eps * Lap u.
struct OperatorParams {
    double p = 4.0;
    double eps = 0.0;    // viscous regularization
    double delta = 0.0;  // gradient regularization (absolute)
};

namespace detail {

// One face of the energy stencil, as up to 5 difference pairs.
// z_i = scale_i * (u[a_i] - u[b_i]); pairs crossing the box boundary are
// dropped, so every pair couples two real cells and the assembled operator
// conserves mass exactly and annihilates constants.
//
// d=1: z = (normal difference).  d=2: z = (normal difference, half of each
// adjacent tangential difference), so |z|^2 = g_n^2 + mean of the tangential
// difference squares; for an affine field |z|^2 equals |grad u|^2 exactly.
struct FaceStencil {
    int npair = 0;
    long a[5];
    long b[5];
    double scale[5];
    double weight = 0.0;  // h^d / d, the face quadrature weight of the energy
};

template <class Op>
inline void visit_faces(const Grid& g, Op&& op) {
    const int n = g.n;
    const double s1 = 1.0 / g.h;
    FaceStencil f;
    if (g.dim == 1) {
        f.weight = g.h;
        for (int j = 1; j < n; ++j) {
            f.npair = 1;
            f.a[0] = j;
            f.b[0] = j - 1;
            f.scale[0] = s1;
            op(f);
        }
        return;
    }
    const double s2 = 0.5 / g.h;
    f.weight = 0.5 * g.h * g.h;
    auto add_pair = [&](int axc, int ayc, int bxc, int byc) {
        if (axc < 0 || axc >= n || ayc < 0 || ayc >= n) return;
        if (bxc < 0 || bxc >= n || byc < 0 || byc >= n) return;
        f.a[f.npair] = g.index(axc, ayc);
        f.b[f.npair] = g.index(bxc, byc);
        f.scale[f.npair] = s2;
        ++f.npair;
    };
    // x-faces between cells (jx-1, iy) and (jx, iy)
    for (int jx = 1; jx < n; ++jx)
        for (int iy = 0; iy < n; ++iy) {
            f.npair = 1;
            f.a[0] = g.index(jx, iy);
            f.b[0] = g.index(jx - 1, iy);
            f.scale[0] = s1;
            add_pair(jx - 1, iy + 1, jx - 1, iy);
            add_pair(jx - 1, iy, jx - 1, iy - 1);
            add_pair(jx, iy + 1, jx, iy);
            add_pair(jx, iy, jx, iy - 1);
            op(f);
        }
    // y-faces between cells (ix, jy-1) and (ix, jy)
    for (int ix = 0; ix < n; ++ix)
        for (int jy = 1; jy < n; ++jy) {
            f.npair = 1;
            f.a[0] = g.index(ix, jy);
            f.b[0] = g.index(ix, jy - 1);
            f.scale[0] = s1;
            add_pair(ix + 1, jy, ix, jy);
            add_pair(ix, jy, ix - 1, jy);
            add_pair(ix + 1, jy - 1, ix, jy - 1);
            add_pair(ix, jy - 1, ix - 1, jy - 1);
            op(f);
        }
}

inline void gather(const double* u, const FaceStencil& f, double* z) {
    for (int i = 0; i < f.npair; ++i) z[i] = f.scale[i] * (u[f.a[i]] - u[f.b[i]]);
}

}  // namespace detail

/// Discrete energy whose exact gradient (in the h^d-weighted inner product)
/// is apply_A:
///   Phi(u) = sum_faces (h^d/d) [ (|z|^2 + delta^2)^(p/2) - delta^p ] / p
///          + (eps/2) h^d sum_faces g_n^2.
inline double energy(const ScalarField& u, const OperatorParams& prm) {
    const double p = prm.p;
    const double d2 = prm.delta * prm.delta;
    const double base = prm.delta > 0.0 ? std::pow(d2, 0.5 * p) : 0.0;
    const double weps = 0.5 * prm.eps * u.grid.cell_volume();
    double e = 0.0;
    detail::visit_faces(u.grid, [&](const detail::FaceStencil& f) {
        double z[5];
        detail::gather(u.v.data(), f, z);
        double m2 = d2;
        for (int i = 0; i < f.npair; ++i) m2 += z[i] * z[i];
        e += f.weight * (std::pow(m2, 0.5 * p) - base) / p;
        if (prm.eps != 0.0) e += weps * z[0] * z[0];
    });
    return e;
}

/// Phi(u) = (1/p) integral |grad u|^p, computed from face gradients.
inline double lp_gradient_energy(const ScalarField& u, double p) {
    return energy(u, OperatorParams{p, 0.0, 0.0});
}

/// A u = -div(F(grad u)) - eps Lap u with fluxes on faces; the exact
/// L2(h^d)-gradient of energy().
inline ScalarField apply_A(const ScalarField& u, const OperatorParams& prm) {
    ScalarField out(u.grid);
    const double invd = 1.0 / u.grid.dim;
    detail::visit_faces(u.grid, [&](const detail::FaceStencil& f) {
        double z[5], y[5];
        detail::gather(u.v.data(), f, z);
        flux_vec(z, f.npair, prm.p, prm.delta, y);
        for (int i = 0; i < f.npair; ++i) {
            double c = invd * y[i] * f.scale[i];
            if (i == 0) c += prm.eps * z[0] * f.scale[0];
            out[f.a[i]] += c;
            out[f.b[i]] -= c;
        }
    });
    return out;
}

/// Directional derivative A'(u)[w].  With full_jacobian the face flux is
/// linearized with DF (Newton); otherwise the scalar coefficient is frozen
/// (lagged fixed-point operator).  Both are symmetric positive semidefinite.
inline ScalarField hessian_apply(const ScalarField& u, const ScalarField& w,
                                 const OperatorParams& prm, bool full_jacobian = true) {
    ScalarField out(u.grid);
    const double invd = 1.0 / u.grid.dim;
    detail::visit_faces(u.grid, [&](const detail::FaceStencil& f) {
        double zu[5], zw[5], y[5];
        detail::gather(u.v.data(), f, zu);
        detail::gather(w.v.data(), f, zw);
        if (full_jacobian) {
            flux_jac_apply(zu, zw, f.npair, prm.p, prm.delta, y);
        } else {
            double m2 = prm.delta * prm.delta;
            for (int i = 0; i < f.npair; ++i) m2 += zu[i] * zu[i];
            const double c = flux_coeff(m2, prm.p);
            for (int i = 0; i < f.npair; ++i) y[i] = c * zw[i];
        }
        for (int i = 0; i < f.npair; ++i) {
            double c = invd * y[i] * f.scale[i];
            if (i == 0) c += prm.eps * zw[0] * f.scale[0];
            out[f.a[i]] += c;
            out[f.b[i]] -= c;
        }
    });
    return out;
}

/// diag(A'(u)), used as a Jacobi preconditioner for the inner CG solves.
inline std::vector<double> hessian_diagonal(const ScalarField& u, const OperatorParams& prm,
                                            bool full_jacobian = true) {
    std::vector<double> diag(u.grid.cells(), 0.0);
    const double invd = 1.0 / u.grid.dim;
    detail::visit_faces(u.grid, [&](const detail::FaceStencil& f) {
        double zu[5];
        detail::gather(u.v.data(), f, zu);
        double m2 = prm.delta * prm.delta;
        for (int i = 0; i < f.npair; ++i) m2 += zu[i] * zu[i];
        const double c = flux_coeff(m2, prm.p);
        // Cells of this face; each appears in at most 3 pairs.
        long cells[10];
        int ncells = 0;
        for (int i = 0; i < f.npair; ++i)
            for (long cand : {f.a[i], f.b[i]}) {
                bool seen = false;
                for (int k = 0; k < ncells; ++k) seen = seen || cells[k] == cand;
                if (!seen) cells[ncells++] = cand;
            }
        for (int k = 0; k < ncells; ++k) {
            double s[5];
            for (int i = 0; i < f.npair; ++i)
                s[i] = (f.a[i] == cells[k] ? f.scale[i] : 0.0) -
                       (f.b[i] == cells[k] ? f.scale[i] : 0.0);
            double quad;
            if (full_jacobian) {
                quad = flux_jac_quad(zu, s, f.npair, prm.p, prm.delta);
            } else {
                quad = 0.0;
                for (int i = 0; i < f.npair; ++i) quad += c * s[i] * s[i];
            }
            diag[cells[k]] += invd * quad + prm.eps * s[0] * s[0];
        }
    });
    return diag;
}

}  // namespace plap

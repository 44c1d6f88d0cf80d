#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

/// Uniform cell-centered grid on the box [-L, L]^d, d in {1, 2}.
///
/// Cells are indexed 0..n-1 per axis with centers x_i = -L + (i + 1/2) h,
/// h = 2L/n.  Values outside the box are treated as zero everywhere in the
/// library (the Problem invariants keep the support of every field away
/// from the boundary, so the zero extension is exact).
struct Grid {
    int dim = 1;
    int n = 0;          // cells per axis
    double half_width = 0.0;  // L
    double h = 0.0;     // 2L/n

    long cells() const { return dim == 1 ? n : static_cast<long>(n) * n; }
    double cell_volume() const { return dim == 1 ? h : h * h; }
    double coord(int i) const { return -half_width + (i + 0.5) * h; }

    // d=2 storage is row-major in x: cell (ix, iy) -> ix*n + iy.
    long index(int ix, int iy = 0) const { return dim == 1 ? ix : static_cast<long>(ix) * n + iy; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && half_width == o.half_width;
    }
};

inline Grid make_grid(int dim, int n, double half_width) {
    if (dim != 1 && dim != 2) throw ConfigError("d", "dimension must be 1 or 2");
    if (n < 2 || n % 2 != 0) throw ConfigError("n", "cells per axis must be even and >= 2");
    if (!(half_width > 0.0)) throw ConfigError("L", "box half-width must be positive");
    Grid g;
    g.dim = dim;
    g.n = n;
    g.half_width = half_width;
    g.h = 2.0 * half_width / n;
    return g;
}

/// Grid sample of a scalar function, one value per cell.
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.cells(), fill) {}

    double& operator[](long i) { return v[i]; }
    double operator[](long i) const { return v[i]; }
    long size() const { return static_cast<long>(v.size()); }
};

/// Per-axis arrays of face values (normal components).
///
/// Axis a has faces between cells along that axis, including the two
/// boundary faces per row:
///   d=1:        comp[0] has n+1 entries, face j at x = -L + j h.
///   d=2, axis0: comp[0] has (n+1)*n entries, index jx*n + iy.
///   d=2, axis1: comp[1] has n*(n+1) entries, index ix*(n+1) + jy.
struct FaceField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    FaceField() = default;
    explicit FaceField(const Grid& g) : grid(g) {
        if (g.dim == 1) {
            comp[0].assign(g.n + 1, 0.0);
        } else {
            comp[0].assign(static_cast<long>(g.n + 1) * g.n, 0.0);
            comp[1].assign(static_cast<long>(g.n) * (g.n + 1), 0.0);
        }
    }
};

/// Gradient sample: face-normal differences plus their cell-centered averages.
struct GradientField {
    Grid grid;
    FaceField faces;
    // center[a] holds component a at cell centers (average of the two adjacent faces).
    std::array<std::vector<double>, 2> center;
};

/// Forward differences on the interior faces, (u_{i+1} - u_i)/h.  The two
/// boundary faces per row carry zero: no flux crosses the box boundary, which
/// coincides with the zero extension whenever the support stays interior and
/// makes constants gradient-free.
inline FaceField face_gradient(const ScalarField& u) {
    const Grid& g = u.grid;
    FaceField f(g);
    const int n = g.n;
    const double inv_h = 1.0 / g.h;
    if (g.dim == 1) {
        for (int j = 1; j < n; ++j) f.comp[0][j] = (u[j] - u[j - 1]) * inv_h;
    } else {
        for (int jx = 1; jx < n; ++jx)
            for (int iy = 0; iy < n; ++iy)
                f.comp[0][static_cast<long>(jx) * n + iy] =
                    (u[g.index(jx, iy)] - u[g.index(jx - 1, iy)]) * inv_h;
        for (int ix = 0; ix < n; ++ix)
            for (int jy = 1; jy < n; ++jy)
                f.comp[1][static_cast<long>(ix) * (n + 1) + jy] =
                    (u[g.index(ix, jy)] - u[g.index(ix, jy - 1)]) * inv_h;
    }
    return f;
}

inline GradientField gradient(const ScalarField& u) {
    const Grid& g = u.grid;
    GradientField out;
    out.grid = g;
    out.faces = face_gradient(u);
    const int n = g.n;
    if (g.dim == 1) {
        out.center[0].resize(n);
        for (int i = 0; i < n; ++i)
            out.center[0][i] = 0.5 * (out.faces.comp[0][i] + out.faces.comp[0][i + 1]);
    } else {
        out.center[0].resize(g.cells());
        out.center[1].resize(g.cells());
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                const long c = g.index(ix, iy);
                out.center[0][c] = 0.5 * (out.faces.comp[0][static_cast<long>(ix) * n + iy] +
                                          out.faces.comp[0][static_cast<long>(ix + 1) * n + iy]);
                out.center[1][c] = 0.5 * (out.faces.comp[1][static_cast<long>(ix) * (n + 1) + iy] +
                                          out.faces.comp[1][static_cast<long>(ix) * (n + 1) + iy + 1]);
            }
    }
    return out;
}

/// (F_{i+1/2} - F_{i-1/2})/h per cell.  Exact discrete adjoint of
/// face_gradient: <grad u, F>_faces = -<u, divergence(F)>_cells for every
/// flux F that vanishes on the boundary faces.
inline ScalarField divergence(const FaceField& flux) {
    const Grid& g = flux.grid;
    ScalarField out(g);
    const int n = g.n;
    const double inv_h = 1.0 / g.h;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            out[i] = (flux.comp[0][i + 1] - flux.comp[0][i]) * inv_h;
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                const long c = g.index(ix, iy);
                out[c] = (flux.comp[0][static_cast<long>(ix + 1) * n + iy] -
                          flux.comp[0][static_cast<long>(ix) * n + iy]) *
                             inv_h +
                         (flux.comp[1][static_cast<long>(ix) * (n + 1) + iy + 1] -
                          flux.comp[1][static_cast<long>(ix) * (n + 1) + iy]) *
                             inv_h;
            }
    }
    return out;
}

/// <a, b> with the cell measure h^d.
inline double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (long i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid.cell_volume();
}

/// <F, G> over faces with measure h^d (boundary faces included).
inline double inner_faces(const FaceField& a, const FaceField& b) {
    double s = 0.0;
    for (int ax = 0; ax < a.grid.dim; ++ax)
        for (size_t i = 0; i < a.comp[ax].size(); ++i) s += a.comp[ax][i] * b.comp[ax][i];
    return s * a.grid.cell_volume();
}

inline double mass(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s += x;
    return s * u.grid.cell_volume();
}

inline double l1_norm(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s += std::abs(x);
    return s * u.grid.cell_volume();
}

inline double l2_norm(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s += x * x;
    return std::sqrt(s * u.grid.cell_volume());
}

/// max |u| over cells.
inline double sup_norm(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s = std::max(s, std::abs(x));
    return s;
}

inline double max_value(const ScalarField& u) {
    double s = -1e300;
    for (double x : u.v) s = std::max(s, x);
    return u.v.empty() ? 0.0 : s;
}

inline double min_value(const ScalarField& u) {
    double s = 1e300;
    for (double x : u.v) s = std::min(s, x);
    return u.v.empty() ? 0.0 : s;
}

/// max |x| over cells with |value| > threshold; 0 if none.
inline double support_radius(const ScalarField& u, double threshold) {
    if (!(threshold > 0.0)) throw Error("support_radius: threshold must be positive");
    const Grid& g = u.grid;
    double r = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i)
            if (std::abs(u[i]) > threshold) r = std::max(r, std::abs(g.coord(i)));
    } else {
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy)
                if (std::abs(u[g.index(ix, iy)]) > threshold)
                    r = std::max(r, std::hypot(g.coord(ix), g.coord(iy)));
    }
    return r;
}

/// Largest face-normal difference magnitude per axis; the discrete |D_i u|_inf.
inline std::array<double, 2> gradient_sup_per_axis(const ScalarField& u) {
    FaceField f = face_gradient(u);
    std::array<double, 2> out{0.0, 0.0};
    for (int ax = 0; ax < u.grid.dim; ++ax)
        for (double x : f.comp[ax]) out[ax] = std::max(out[ax], std::abs(x));
    return out;
}

inline ScalarField sample_function(const Grid& g, const auto& fn) {
    ScalarField u(g);
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) u[i] = fn(g.coord(i), 0.0);
    } else {
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy) u[g.index(ix, iy)] = fn(g.coord(ix), g.coord(iy));
    }
    return u;
}

}  // namespace plap

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "plap/errors.hpp"
#include "plap/grid.hpp"
#include "plap/operator.hpp"

namespace plap {

/// Inner-solver configuration for one implicit (resolvent) step.
struct ProxConfig {
    double tol = 1e-10;  // relative residual |v + lambda A v - f| / |f|
    int max_iter = 60;
    enum class Inner { newton, fixed_point } inner = Inner::newton;
    int cg_max_iter = 100000;
    double cg_forcing = 1e-4;  // inner linear solve: relative tolerance
    double armijo = 1e-4;
};

struct ProxResult {
    ScalarField u;
    double residual = 0.0;  // relative, recomputed from a fresh apply_A
    int iterations = 0;
};

/// Per-iteration record of one prox solve (merit J and relative residual of
/// every accepted iterate, the initial guess included).
struct ProxTrace {
    std::vector<double> merit;
    std::vector<double> residual;
};

namespace detail {

// Jacobi-preconditioned CG for (I + lambda A'(v)) x = rhs, matrix-free.
inline void prox_cg(const ScalarField& v, double lambda, const OperatorParams& prm,
                    bool full_jacobian, const ScalarField& rhs, double rel_tol, int max_iter,
                    ScalarField& x) {
    const long m = rhs.size();
    std::vector<double> prec(hessian_diagonal(v, prm, full_jacobian));
    for (double& d : prec) d = 1.0 / (1.0 + lambda * d);

    x = ScalarField(rhs.grid, 0.0);
    ScalarField r = rhs;
    ScalarField z(rhs.grid), q(rhs.grid), dir(rhs.grid);
    double rhs2 = 0.0;
    for (long i = 0; i < m; ++i) rhs2 += r[i] * r[i];
    if (rhs2 == 0.0) return;
    const double stop2 = rhs2 * rel_tol * rel_tol;

    for (long i = 0; i < m; ++i) z[i] = prec[i] * r[i];
    dir = z;
    double rz = 0.0;
    for (long i = 0; i < m; ++i) rz += r[i] * z[i];

    for (int it = 0; it < max_iter; ++it) {
        ScalarField hd = hessian_apply(v, dir, prm, full_jacobian);
        double dq = 0.0;
        for (long i = 0; i < m; ++i) {
            q[i] = dir[i] + lambda * hd[i];
            dq += dir[i] * q[i];
        }
        if (!(dq > 0.0)) break;  // numerically indefinite; accept current x
        const double alpha = rz / dq;
        double r2 = 0.0;
        for (long i = 0; i < m; ++i) {
            x[i] += alpha * dir[i];
            r[i] -= alpha * q[i];
            r2 += r[i] * r[i];
        }
        if (r2 <= stop2) return;
        double rz_new = 0.0;
        for (long i = 0; i < m; ++i) {
            z[i] = prec[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (long i = 0; i < m; ++i) dir[i] = z[i] + beta * dir[i];
    }
}

}  // namespace detail

/// Solves v + lambda A(v) = f, the resolvent of A at f; equivalently the
/// minimizer of J(v) = (1/2)|v - f|^2 + lambda Phi(v).  J decreases
/// monotonically across the accepted iterates.  Throws NonConvergenceError
/// when max_iter is exhausted.
inline ProxResult prox_step(const ScalarField& f, double lambda, const OperatorParams& prm,
                            const ProxConfig& cfg, ProxTrace* trace = nullptr) {
    if (!(lambda > 0.0)) throw Error("prox_step: lambda must be positive");
    const long m = f.size();
    const double fnorm = l2_norm(f);
    const double scale = fnorm > 0.0 ? fnorm : 1.0;

    auto merit = [&](const ScalarField& v) {
        double s = 0.0;
        for (long i = 0; i < m; ++i) s += (v[i] - f[i]) * (v[i] - f[i]);
        return 0.5 * s * f.grid.cell_volume() + lambda * energy(v, prm);
    };
    auto residual_field = [&](const ScalarField& v) {
        ScalarField r = apply_A(v, prm);
        for (long i = 0; i < m; ++i) r[i] = v[i] + lambda * r[i] - f[i];
        return r;
    };

    ScalarField v = f;
    ScalarField r = residual_field(v);
    double rel = l2_norm(r) / scale;
    double J = merit(v);
    const bool newton_mode = cfg.inner == ProxConfig::Inner::newton;
    auto record = [&] {
        if (trace) {
            trace->merit.push_back(J);
            trace->residual.push_back(rel);
        }
    };
    record();

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (rel <= cfg.tol) return {std::move(v), rel, it};

        bool accepted = false;
        // Newton direction first (or the lagged direction in fixed-point
        // mode), then the damped lagged direction as fallback.
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            const bool full = newton_mode && attempt == 0;
            ScalarField dir(f.grid);
            double t;
            if (full || attempt == 0) {
                ScalarField rhs = r;
                for (long i = 0; i < m; ++i) rhs[i] = -rhs[i];
                detail::prox_cg(v, lambda, prm, full, rhs, cfg.cg_forcing, cfg.cg_max_iter, dir);
                t = full ? 1.0 : 0.5;
            } else {
                // Damped lagged-coefficient sweep: solve (I + lambda L(v)) w = f.
                detail::prox_cg(v, lambda, prm, false, f, cfg.cg_forcing, cfg.cg_max_iter, dir);
                for (long i = 0; i < m; ++i) dir[i] -= v[i];
                t = 0.5;
            }
            double slope = inner(r, dir);
            if (!(slope < 0.0)) {
                // CG failed to produce descent; fall back to steepest descent.
                for (long i = 0; i < m; ++i) dir[i] = -r[i];
                slope = inner(r, dir);
                t = 1.0;
            }
            while (t >= 1e-12) {
                ScalarField trial = v;
                for (long i = 0; i < m; ++i) trial[i] += t * dir[i];
                const double Jt = merit(trial);
                // Armijo with a roundoff allowance: near convergence the true
                // decrease falls below the precision of J itself.
                const double fuzz = 1e-14 * (std::abs(J) + std::abs(Jt));
                if (Jt <= J + cfg.armijo * t * slope + fuzz) {
                    v = std::move(trial);
                    J = Jt;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
        }
        if (!accepted) throw NonConvergenceError(rel, it);
        r = residual_field(v);
        rel = l2_norm(r) / scale;
        record();
    }
    if (rel <= cfg.tol) return {std::move(v), rel, cfg.max_iter};
    throw NonConvergenceError(rel, cfg.max_iter);
}

}  // namespace plap

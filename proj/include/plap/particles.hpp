#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "plap/coefficients.hpp"
#include "plap/errors.hpp"
#include "plap/grid.hpp"
#include "plap/parallel.hpp"
#include "plap/rng.hpp"

namespace plap {

/// Particle ensemble for the diffusion
///   dX = b(t, X) dt + sqrt(2) s(t, X) dW
/// with coefficients extracted from the PDE field; particles do not couple
/// to each other, the mean-field dependence enters only through u.
/// Positions are a pure function of (u0, coefficients, N, master_seed):
/// every random draw comes from a counter-based stream keyed by particle id
/// and substep index.
struct ParticleEnsemble {
    int dim = 1;
    uint64_t master_seed = 0;
    long step = 0;              // global substep counter
    std::vector<double> pos;    // N * dim, particle-major

    long size() const { return dim > 0 ? static_cast<long>(pos.size()) / dim : 0; }
    double x(long i) const { return pos[i * dim]; }
    double y(long i) const { return pos[i * dim + 1]; }
};

/// Multilinear interpolation of cell-centered values; zero outside the
/// outermost cell centers, so coefficients vanish (particles freeze) away
/// from the numerical support.
inline double interp_cells(const Grid& g, const std::vector<double>& vals, double x, double y = 0.0) {
    const int n = g.n;
    auto axis = [&](double c, int& i0, double& frac) {
        const double t = (c + g.half_width) / g.h - 0.5;
        const double fl = std::floor(t);
        i0 = static_cast<int>(fl);
        frac = t - fl;
    };
    int ix;
    double fx;
    axis(x, ix, fx);
    auto at1 = [&](int i) { return (i >= 0 && i < n) ? vals[i] : 0.0; };
    if (g.dim == 1) return (1.0 - fx) * at1(ix) + fx * at1(ix + 1);
    int iy;
    double fy;
    axis(y, iy, fy);
    auto at2 = [&](int i, int j) {
        return (i >= 0 && i < n && j >= 0 && j < n) ? vals[g.index(i, j)] : 0.0;
    };
    return (1.0 - fx) * ((1.0 - fy) * at2(ix, iy) + fy * at2(ix, iy + 1)) +
           fx * ((1.0 - fy) * at2(ix + 1, iy) + fy * at2(ix + 1, iy + 1));
}

/// Samples X(0) ~ u0 (renormalized): inverse CDF over the cell masses plus a
/// uniform jitter inside the cell.  Deterministic given the seed.
inline ParticleEnsemble sample_initial(const ScalarField& u0, long N, uint64_t seed) {
    const Grid& g = u0.grid;
    const long m = g.cells();
    std::vector<double> cdf(m);
    double total = 0.0;
    for (long c = 0; c < m; ++c) {
        total += std::max(u0[c], 0.0);
        cdf[c] = total;
    }
    if (!(total > 0.0)) throw ZeroMassError();

    ParticleEnsemble ens;
    ens.dim = g.dim;
    ens.master_seed = seed;
    ens.pos.resize(N * g.dim);
    const CounterRng rng{seed};
    const int n = g.n;
    for (long i = 0; i < N; ++i) {
        const double v = rng.uniform(i, CounterRng::kInitContext, 0) * total;
        const long c = std::lower_bound(cdf.begin(), cdf.end(), v) - cdf.begin();
        const long cc = std::min(c, m - 1);
        const double jx = rng.uniform(i, CounterRng::kInitContext, 1);
        if (g.dim == 1) {
            ens.pos[i] = -g.half_width + (cc + jx) * g.h;
        } else {
            const double jy = rng.uniform(i, CounterRng::kInitContext, 2);
            const long ix = cc / n, iy = cc % n;
            ens.pos[2 * i] = -g.half_width + (ix + jx) * g.h;
            ens.pos[2 * i + 1] = -g.half_width + (iy + jy) * g.h;
        }
    }
    return ens;
}

/// One explicit Euler-Maruyama substep with frozen coefficients:
///   X <- X + b(X) dt + sqrt(2 dt) s(X) xi.
/// Throws EscapedDomainError if any coordinate leaves the box.
inline void em_step_inplace(ParticleEnsemble& ens, const CoefficientField& coeff, double dt,
                            int threads = 1) {
    const Grid& g = coeff.grid;
    const long N = ens.size();
    const double root = std::sqrt(2.0 * dt);
    const CounterRng rng{ens.master_seed};
    const uint64_t ctx = static_cast<uint64_t>(ens.step);
    std::atomic<long> escaped{-1};

    parallel_for(N, threads, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            double z0, z1;
            rng.normal_pair(i, ctx, z0, z1);
            if (ens.dim == 1) {
                const double x = ens.pos[i];
                const double b = interp_cells(g, coeff.drift[0], x);
                const double s = interp_cells(g, coeff.sigma, x);
                const double nx = x + b * dt + root * s * z0;
                ens.pos[i] = nx;
                if (std::abs(nx) > g.half_width) escaped.store(i);
            } else {
                const double x = ens.pos[2 * i], y = ens.pos[2 * i + 1];
                const double bx = interp_cells(g, coeff.drift[0], x, y);
                const double by = interp_cells(g, coeff.drift[1], x, y);
                const double s = interp_cells(g, coeff.sigma, x, y);
                const double nx = x + bx * dt + root * s * z0;
                const double ny = y + by * dt + root * s * z1;
                ens.pos[2 * i] = nx;
                ens.pos[2 * i + 1] = ny;
                if (std::abs(nx) > g.half_width || std::abs(ny) > g.half_width)
                    escaped.store(i);
            }
        }
    });
    ens.step += 1;
    const long bad = escaped.load();
    if (bad >= 0) throw EscapedDomainError(bad, ens.step - 1);
}

inline ParticleEnsemble em_step(ParticleEnsemble ens, const CoefficientField& coeff, double dt,
                                int threads = 1) {
    em_step_inplace(ens, coeff, dt, threads);
    return ens;
}

/// Propagates an ensemble along a field history.  field_at(k) must return
/// the PDE field at time times[k]; coefficients are frozen over
/// [t_k, t_{k+1}) and each PDE step is cut into `substeps` equal EM substeps.
/// on_snapshot(k, ens) fires at every PDE time, including k = 0.
inline void simulate(const std::function<const ScalarField&(long)>& field_at,
                     const std::vector<double>& times, double p, double delta, long N,
                     uint64_t seed, int substeps, const std::function<void(long, const ParticleEnsemble&)>& on_snapshot,
                     int threads = 1) {
    if (substeps < 1) throw Error("simulate: substeps must be >= 1");
    const long K = static_cast<long>(times.size()) - 1;
    ParticleEnsemble ens = sample_initial(field_at(0), N, seed);
    if (on_snapshot) on_snapshot(0, ens);
    for (long k = 0; k < K; ++k) {
        const CoefficientField coeff = make_coefficients(field_at(k), p, delta, times[k]);
        const double dt_sub = (times[k + 1] - times[k]) / substeps;
        for (int s = 0; s < substeps; ++s) em_step_inplace(ens, coeff, dt_sub, threads);
        if (on_snapshot) on_snapshot(k + 1, ens);
    }
}

}  // namespace plap

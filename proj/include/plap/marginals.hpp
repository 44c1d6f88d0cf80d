#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "plap/errors.hpp"
#include "plap/grid.hpp"
#include "plap/particles.hpp"

namespace plap {

/// Cell counts / (N h^d); the empirical density on the grid.  Mass is 1 by
/// construction.  Every particle must be inside the box.
inline ScalarField histogram_density(const ParticleEnsemble& ens, const Grid& g) {
    const long N = ens.size();
    if (N < 1) throw Error("histogram_density: need at least one particle");
    const int n = g.n;
    auto cell_of = [&](double c, long pid) {
        if (std::abs(c) > g.half_width) throw EscapedDomainError(pid, ens.step);
        int i = static_cast<int>(std::floor((c + g.half_width) / g.h));
        return std::clamp(i, 0, n - 1);
    };
    std::vector<long> counts(g.cells(), 0);
    for (long i = 0; i < N; ++i) {
        if (g.dim == 1)
            counts[cell_of(ens.x(i), i)] += 1;
        else
            counts[g.index(cell_of(ens.x(i), i), cell_of(ens.y(i), i))] += 1;
    }
    ScalarField out(g);
    const double w = 1.0 / (static_cast<double>(N) * g.cell_volume());
    for (long c = 0; c < g.cells(); ++c) out[c] = counts[c] * w;
    return out;
}

/// Gaussian-kernel density on cell centers, renormalized to grid mass 1.
/// bandwidth <= 0 requests the per-axis rule 1.06 sigma_hat N^(-1/(d+4));
/// throws DegenerateSampleError if the sample has zero spread on some axis.
/// Diagnostic-only comparator; acceptance metrics use the histogram.
inline ScalarField kde_density(const ParticleEnsemble& ens, const Grid& g,
                               double bandwidth = 0.0) {
    const long N = ens.size();
    if (N < 1) throw Error("kde_density: need at least one particle");
    double bw[2] = {bandwidth, bandwidth};
    if (!(bandwidth > 0.0)) {
        for (int ax = 0; ax < g.dim; ++ax) {
            double m = 0.0, s2 = 0.0;
            for (long i = 0; i < N; ++i) m += ens.pos[i * g.dim + ax];
            m /= N;
            for (long i = 0; i < N; ++i) {
                const double dxi = ens.pos[i * g.dim + ax] - m;
                s2 += dxi * dxi;
            }
            const double sd = std::sqrt(s2 / std::max<long>(N - 1, 1));
            if (!(sd > 0.0)) throw DegenerateSampleError();
            bw[ax] = 1.06 * sd * std::pow(static_cast<double>(N), -1.0 / (g.dim + 4.0));
        }
    }
    ScalarField out(g);
    const int n = g.n;
    auto kern = [](double t) { return std::exp(-0.5 * t * t); };
    for (long i = 0; i < N; ++i) {
        if (g.dim == 1) {
            for (int ix = 0; ix < n; ++ix) out[ix] += kern((g.coord(ix) - ens.x(i)) / bw[0]);
        } else {
            for (int ix = 0; ix < n; ++ix) {
                const double kx = kern((g.coord(ix) - ens.x(i)) / bw[0]);
                if (kx < 1e-14) continue;
                for (int iy = 0; iy < n; ++iy)
                    out[g.index(ix, iy)] += kx * kern((g.coord(iy) - ens.y(i)) / bw[1]);
            }
        }
    }
    const double total = mass(out);
    if (!(total > 0.0)) throw DegenerateSampleError();
    for (double& v : out.v) v /= total;
    return out;
}

/// L1 distance sum |a - b| h^d.
inline double l1_distance(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw Error("l1_distance: fields live on different grids");
    double s = 0.0;
    for (long c = 0; c < a.size(); ++c) s += std::abs(a[c] - b[c]);
    return s * a.grid.cell_volume();
}

/// Exact W1 on the line between the empirical measure and the renormalized
/// piecewise-constant density: integral of |F_emp - F_field| with F_field
/// the cell-wise cumulative (piecewise linear) and F_emp the sample CDF.
inline double w1_distance_1d(const ParticleEnsemble& ens, const ScalarField& field) {
    if (ens.dim != 1 || field.grid.dim != 1) throw NotOneDimensionalError();
    const long N = ens.size();
    if (N < 1) throw Error("w1_distance_1d: need at least one particle");
    const Grid& g = field.grid;
    const double total = mass(field);
    if (!(total > 0.0)) throw Error("w1_distance_1d: field has nonpositive mass");

    std::vector<double> xs(ens.pos);
    std::sort(xs.begin(), xs.end());
    if (std::abs(xs.front()) > g.half_width || std::abs(xs.back()) > g.half_width)
        throw EscapedDomainError(-1, ens.step);

    // Piecewise integration of |F_field(x) - F_emp(x)| between consecutive
    // breakpoints (cell edges and particle positions).
    double acc = 0.0;
    auto segment = [&](double a, double b, double Fa, double slope, double Femp) {
        // integral over [a,b] of |Fa + slope (x-a) - Femp|
        const double len = b - a;
        if (len <= 0.0) return;
        const double v0 = Fa - Femp, v1 = Fa + slope * len - Femp;
        if (v0 * v1 >= 0.0) {
            acc += 0.5 * std::abs(v0 + v1) * len;
        } else {
            const double xc = v0 / (v0 - v1) * len;
            acc += 0.5 * (std::abs(v0) * xc + std::abs(v1) * (len - xc));
        }
    };
    long np = 0;        // particles <= current position
    double Fleft = 0.0; // field CDF at the left edge of the current cell
    for (long cell = 0; cell < g.n; ++cell) {
        const double a_edge = -g.half_width + cell * g.h;
        const double b_edge = a_edge + g.h;
        const double dens = field[cell] / total;
        double x = a_edge;
        while (np < N && xs[np] <= b_edge) {
            segment(x, xs[np], Fleft + dens * (x - a_edge), dens, static_cast<double>(np) / N);
            x = xs[np];
            ++np;
        }
        segment(x, b_edge, Fleft + dens * (x - a_edge), dens, static_cast<double>(np) / N);
        Fleft += dens * g.h;
    }
    return acc;
}

/// W1 between two equal-size samples: mean absolute difference of the sorted
/// pairing.  Used as the independent oracle for the CDF formula.
inline double w1_sorted_samples(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size() || a.empty())
        throw Error("w1_sorted_samples: need equal nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / a.size();
}

}  // namespace plap

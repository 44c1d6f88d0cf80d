#pragma once

#include <cmath>
#include <string>

#include "plap/errors.hpp"
#include "plap/grid.hpp"

namespace plap {

/// Full description of one evolution run on the box [-L, L]^d.
struct Problem {
    double p = 4.0;
    int d = 1;
    double L = 6.0;
    int n = 256;
    double dt = 1e-3;
    double T = 0.5;
    double epsilon = 0.0;  // viscous regularization
    double delta = 0.0;    // flux regularization (absolute)
    double R = 0.0;        // support radius of the initial datum

    /// p >= 4 is where the second-order estimates and the probabilistic
    /// representation are proved; runs with 2 < p < 4 are labeled
    /// out-of-theory but still allowed.
    bool theory_regime() const { return p >= 4.0; }

    /// Support-growth exponent beta = 1/(d(p-2)+p).
    double beta() const { return 1.0 / (d * (p - 2.0) + p); }

    Grid grid() const { return make_grid(d, n, L); }
};

inline void validate_problem(const Problem& prob) {
    if (!(prob.p > 2.0)) throw ConfigError("p", "exponent must satisfy p > 2");
    if (prob.d != 1 && prob.d != 2) throw ConfigError("d", "dimension must be 1 or 2");
    if (!(prob.L > 0.0)) throw ConfigError("L", "box half-width must be positive");
    if (prob.n < 2 || prob.n % 2 != 0) throw ConfigError("n", "cells per axis must be even and >= 2");
    if (!(prob.dt > 0.0)) throw ConfigError("dt", "time step must be positive");
    if (!(prob.T > 0.0)) throw ConfigError("T", "horizon must be positive");
    if (!(prob.epsilon >= 0.0)) throw ConfigError("epsilon", "viscosity must be nonnegative");
    if (!(prob.delta >= 0.0)) throw ConfigError("delta", "flux regularization must be nonnegative");
}

/// Support-radius bound at time t for initial mass m:
/// 2R + C t^beta m^((p-2) beta).
inline double support_bound(const Problem& prob, double c_support, double t, double init_mass) {
    const double b = prob.beta();
    return 2.0 * prob.R +
           c_support * std::pow(t, b) * std::pow(std::abs(init_mass), (prob.p - 2.0) * b);
}

/// The box must contain the support bound at the horizon, so that the
/// zero-flux boundary is exact for the whole run.
inline bool box_invariant_holds(const Problem& prob, double c_support, double init_mass) {
    return support_bound(prob, c_support, prob.T, init_mass) < prob.L;
}

}  // namespace plap

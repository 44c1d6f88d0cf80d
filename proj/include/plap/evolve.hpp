#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "plap/coefficients.hpp"
#include "plap/grid.hpp"
#include "plap/problem.hpp"
#include "plap/prox.hpp"

namespace plap {

struct StepDiagnostics {
    double t = 0.0;
    double mass = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double sup = 0.0;
    double phi = 0.0;
    double support_radius = 0.0;
    double residual = 0.0;
    int iters = 0;
    FieldFunctionals extra;
};

/// Backward-Euler trajectory: times, per-step diagnostics, and (optionally)
/// every field.  t_0 = 0 carries the initial datum.
struct FlowTrajectory {
    Problem prob;
    std::vector<double> times;
    std::vector<StepDiagnostics> diag;
    std::vector<ScalarField> fields;  // populated when keep_fields
    bool keep_fields = true;
    std::vector<std::string> warnings;

    long steps() const { return static_cast<long>(times.size()) - 1; }
};

inline StepDiagnostics step_diagnostics(const ScalarField& u, double t, double p,
                                        double support_threshold, double residual, int iters) {
    StepDiagnostics d;
    d.t = t;
    d.mass = mass(u);
    d.l1 = l1_norm(u);
    d.l2 = l2_norm(u);
    d.sup = sup_norm(u);
    d.phi = lp_gradient_energy(u, p);
    d.support_radius = support_radius(u, support_threshold);
    d.residual = residual;
    d.iters = iters;
    d.extra = field_functionals(u, p);
    return d;
}

/// Evolves u0 over ceil(T/dt) implicit steps u_{k+1} = prox_step(u_k, dt).
/// Nonnegativity and mass are monitored through the diagnostics, never
/// enforced.  on_step, when given, sees every field (index 0..K) and may be
/// used for streaming checkpoints.
inline FlowTrajectory evolve(
    const ScalarField& u0, const Problem& prob, const ProxConfig& cfg, bool keep_fields = true,
    const std::function<void(long, double, const ScalarField&)>& on_step = {}) {
    validate_problem(prob);
    if (!(u0.grid == prob.grid())) throw Error("evolve: field grid does not match the problem");

    FlowTrajectory traj;
    traj.prob = prob;
    traj.keep_fields = keep_fields;

    const double sup0 = sup_norm(u0);
    const double thr = sup0 > 0.0 ? 1e-8 * sup0 : std::numeric_limits<double>::min();
    if (min_value(u0) < -1e-12 * (sup0 > 0 ? sup0 : 1.0))
        traj.warnings.push_back("initial datum has negative values");
    const double m0 = mass(u0);
    if (std::abs(m0 - 1.0) > 1e-8)
        traj.warnings.push_back("initial mass is " + std::to_string(m0) + ", not 1");
    if (prob.R > 0.0 && support_radius(u0, thr) > prob.R * (1.0 + 1e-12))
        traj.warnings.push_back("initial support exceeds the declared radius R");

    const OperatorParams prm{prob.p, prob.epsilon, prob.delta};
    const long K = static_cast<long>(std::ceil(prob.T / prob.dt - 1e-12));

    traj.times.push_back(0.0);
    traj.diag.push_back(step_diagnostics(u0, 0.0, prob.p, thr, 0.0, 0));
    if (keep_fields) traj.fields.push_back(u0);
    if (on_step) on_step(0, 0.0, u0);

    ScalarField u = u0;
    double t = 0.0;
    for (long k = 0; k < K; ++k) {
        const double lambda = std::min(prob.dt, prob.T - t);
        ProxResult res;
        try {
            res = prox_step(u, lambda, prm, cfg);
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(e.residual, e.iterations, k + 1);
        }
        u = std::move(res.u);
        t += lambda;
        traj.times.push_back(t);
        traj.diag.push_back(step_diagnostics(u, t, prob.p, thr, res.residual, res.iterations));
        if (keep_fields) traj.fields.push_back(u);
        if (on_step) on_step(k + 1, t, u);
    }
    return traj;
}

/// (I + (t/n) A)^{-n} u0: the n-fold resolvent composition.  Shares the
/// evolve code path (constant step t/n).
inline ScalarField crandall_liggett(const ScalarField& u0, double t, int n_steps, double p,
                                    double eps, double delta, const ProxConfig& cfg) {
    if (!(t > 0.0) || n_steps < 1) throw Error("crandall_liggett: need t > 0 and n_steps >= 1");
    Problem prob;
    prob.p = p;
    prob.d = u0.grid.dim;
    prob.L = u0.grid.half_width;
    prob.n = u0.grid.n;
    prob.dt = t / n_steps;
    prob.T = t;
    prob.epsilon = eps;
    prob.delta = delta;
    ScalarField last;
    evolve(u0, prob, cfg, false, [&](long, double, const ScalarField& u) { last = u; });
    return last;
}

}  // namespace plap

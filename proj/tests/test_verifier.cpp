#include <doctest.h>

#include <cmath>

#include "plap/runner.hpp"
#include "plap/verifier.hpp"

using namespace plap;

namespace {
struct Fixture {
    Problem prob;
    FlowTrajectory traj;
    double c_support = 0.0;
    double t0 = 1.0;
};

const Fixture& nominal_run() {
    static Fixture fx = [] {
        Fixture f;
        f.prob.p = 4.0;
        f.prob.d = 1;
        f.prob.L = 6.0;
        f.prob.n = 128;
        f.prob.dt = 1e-3;
        f.prob.T = 0.05;
        BarenblattProfile b = make_barenblatt(4.0, 1);
        ScalarField u0 = b.sample(f.prob.grid(), f.t0);
        f.prob.delta = 1e-8 * gradient_sup_per_axis(u0)[0];
        f.prob.R = support_radius(u0, 1e-8 * sup_norm(u0));
        ProxConfig cfg;
        cfg.tol = 1e-12;
        f.traj = evolve(u0, f.prob, cfg);
        f.c_support = calibrate_oracle(4.0, 1)->C_support;
        return f;
    }();
    return fx;
}
}  // namespace

TEST_CASE("all checks pass on a nominal run") {
    const Fixture& fx = nominal_run();
    RunRecord run = record_from(fx.traj, fx.c_support, true, fx.t0);
    EstimateReport rep = run_all_checks(run);
    CHECK(rep.failed() == 0);
    CHECK(!rep.out_of_theory);
    CHECK(rep.checks.size() >= 9);
    for (const auto& c : rep.checks) {
        CHECK(std::isfinite(c.lhs));
        CHECK(std::isfinite(c.rhs));
        CHECK(!c.statement.empty());
    }
}

TEST_CASE("zero initial datum passes trivially") {
    Problem prob = nominal_run().prob;
    prob.T = 5e-3;
    FlowTrajectory traj = evolve(ScalarField(prob.grid()), prob, ProxConfig{});
    RunRecord run = record_from(traj, nominal_run().c_support);
    EstimateCheck c = check_energy_identity(run);
    CHECK(c.pass);
    CHECK(c.lhs == 0.0);
    CHECK(c.rhs == 0.0);
    for (const auto& k : check_second_order(run)) {
        CHECK(k.pass);
        CHECK(k.lhs == 0.0);
    }
}

TEST_CASE("negative control: a non-conservative stencil fails the mass check") {
    // explicit steps with a lopsided divergence (left face scaled by 1.01)
    const Fixture& fx = nominal_run();
    const Grid g = fx.prob.grid();
    ScalarField u = fx.traj.fields.front();
    const double thr = 1e-8 * sup_norm(u);

    std::vector<double> times{0.0};
    std::vector<StepDiagnostics> diag{step_diagnostics(u, 0.0, 4.0, thr, 0.0, 0)};
    const double dt = 1e-4;
    for (int k = 1; k <= 10; ++k) {
        FaceField fg = face_gradient(u);
        ScalarField next = u;
        for (int i = 0; i < g.n; ++i) {
            const double fl = std::pow(std::abs(fg.comp[0][i]), 2.0) * fg.comp[0][i];
            const double fr = std::pow(std::abs(fg.comp[0][i + 1]), 2.0) * fg.comp[0][i + 1];
            // broken on purpose: positive left-face fluxes weighted 1.02, so
            // the face contributions no longer cancel in the cell sum
            next[i] += dt * (fr - (fl > 0.0 ? 1.02 * fl : fl)) / g.h;
        }
        u = next;
        times.push_back(k * dt);
        diag.push_back(step_diagnostics(u, times.back(), 4.0, thr, 0.0, 1));
    }
    RunRecord run;
    run.prob = fx.prob;
    run.times = times;
    run.diag = diag;
    run.init_mass = diag.front().mass;
    auto checks = check_conservation_and_bounds(run);
    CHECK(!checks[0].pass);  // mass conservation violated
}

TEST_CASE("energy identity check rejects a tampered energy history") {
    const Fixture& fx = nominal_run();
    RunRecord run = record_from(fx.traj, fx.c_support, true, fx.t0);
    for (auto& d : run.diag) d.phi *= 1.2;
    EstimateCheck c = check_energy_identity(run);
    CHECK(!c.pass);
}

TEST_CASE("gradient sup check is labeled out-of-theory for p < 4") {
    Problem prob = nominal_run().prob;
    prob.p = 3.0;
    prob.delta = 1e-10;
    BarenblattProfile b = make_barenblatt(3.0, 1);
    ScalarField u0 = b.sample(prob.grid(), 1.0);
    prob.R = support_radius(u0, 1e-8 * sup_norm(u0));
    ProxConfig cfg;
    cfg.tol = 1e-11;
    prob.T = 5e-3;
    FlowTrajectory traj = evolve(u0, prob, cfg);
    RunRecord run = record_from(traj, 1.0);
    auto checks = check_gradient_sup_bound(run);
    REQUIRE(!checks.empty());
    CHECK(checks[0].detail.find("out_of_theory") != std::string::npos);
    EstimateReport rep;
    rep.out_of_theory = !run.prob.theory_regime();
    CHECK(rep.out_of_theory);
}

TEST_CASE("second-order and support checks demand calibration") {
    const Fixture& fx = nominal_run();
    RunRecord run = record_from(fx.traj, 0.0);
    CHECK_THROWS_AS(check_second_order(run), MissingCalibrationError);
    CHECK_THROWS_AS(check_support_growth(run), MissingCalibrationError);
}

TEST_CASE("energy identity check requires a run without viscosity") {
    const Fixture& fx = nominal_run();
    RunRecord run = record_from(fx.traj, fx.c_support);
    run.prob.epsilon = 0.1;
    CHECK_THROWS(check_energy_identity(run));
}

TEST_CASE("superposition check applies the fitted tolerance model") {
    const Fixture& fx = nominal_run();
    RunRecord run = record_from(fx.traj, fx.c_support, true, fx.t0);
    std::vector<SuperpositionSample> good{{0.0, 0.01}, {0.05, 0.005}};
    CHECK(check_superposition(run, good, 100000).pass);
    std::vector<SuperpositionSample> bad{{0.05, 0.9}};
    CHECK(!check_superposition(run, bad, 100000).pass);
    CHECK_THROWS(check_superposition(run, {}, 100000));
}

TEST_CASE("support exponent check appears only for decade-spanning self-similar runs") {
    const Fixture& fx = nominal_run();
    RunRecord run = record_from(fx.traj, fx.c_support, true, fx.t0);  // spans 5% of a decade
    auto checks = check_support_growth(run);
    CHECK(checks.size() == 1);  // containment only
    CHECK(checks[0].pass);
}

TEST_CASE("uniform box bump: conservation checks pass at n=128, d=1, p=4") {
    Problem prob = nominal_run().prob;
    prob.T = 0.02;
    const Grid g = prob.grid();
    ScalarField u0 = sample_function(g, [](double x, double) {
        return std::abs(x) < 1.0 ? 0.5 : 0.0;
    });
    prob.delta = 1e-8 * gradient_sup_per_axis(u0)[0];
    prob.R = support_radius(u0, 1e-8 * sup_norm(u0));
    ProxConfig cfg;
    cfg.tol = 1e-12;
    FlowTrajectory traj = evolve(u0, prob, cfg);
    RunRecord run = record_from(traj, nominal_run().c_support);
    for (const auto& c : check_conservation_and_bounds(run)) CHECK(c.pass);
}

TEST_CASE("gradient sup check on the zero field is 0 <= 0") {
    Problem prob = nominal_run().prob;
    prob.T = 2e-3;
    FlowTrajectory traj = evolve(ScalarField(prob.grid()), prob, ProxConfig{});
    RunRecord run = record_from(traj, nominal_run().c_support);
    for (const auto& c : check_gradient_sup_bound(run)) {
        CHECK(c.pass);
        CHECK(c.lhs == 0.0);
    }
}

// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line.  Desk scale: d=1 runs at n=256, dt=1e-3, T=0.5, N=1e5; d=2 at n=128.
// Heavy shared runs are computed once and cached.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "plap/barenblatt.hpp"
#include "plap/marginals.hpp"
#include "plap/parallel.hpp"
#include "plap/particles.hpp"
#include "plap/runner.hpp"
#include "plap/verifier.hpp"

using namespace plap;

namespace {

void criterion(int number, const std::string& title, bool pass, const std::string& detail) {
    std::printf("ACCEPTANCE %02d [%s] %s — %s\n", number, pass ? "PASS" : "FAIL", title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(pass, "criterion ", number, ": ", title, " — ", detail);
}

std::string fmt2(double a, double b, const char* rel = "vs") {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4g %s %.4g", a, rel, b);
    return buf;
}

int worker_threads() { return resolve_threads(0); }

struct NominalRun {
    Problem prob;
    FlowTrajectory traj;
    BarenblattProfile profile;
    double t0 = 1.0;
    double c_support = 0.0;

    NominalRun(int n, double dt, double T = 0.5) : profile(make_barenblatt(4.0, 1)) {
        prob.p = 4.0;
        prob.d = 1;
        prob.L = 6.0;
        prob.n = n;
        prob.dt = dt;
        prob.T = T;
        ScalarField u0 = profile.sample(prob.grid(), t0);
        prob.delta = 1e-8 * gradient_sup_per_axis(u0)[0];
        prob.R = support_radius(u0, 1e-8 * sup_norm(u0));
        ProxConfig cfg;
        cfg.tol = 1e-12;
        traj = evolve(u0, prob, cfg);
    }
};

const NominalRun& nominal() {
    static NominalRun run(256, 1e-3);
    return run;
}
const NominalRun& nominal_half_dt() {
    static NominalRun run(256, 5e-4);
    return run;
}
const NominalRun& nominal_coarse() {
    static NominalRun run(128, 1e-3);
    return run;
}

double support_constant_1d() {
    static double c = calibrate_oracle(4.0, 1)->C_support;
    return c;
}
double support_constant_2d() {
    static double c = calibrate_oracle(4.0, 2)->C_support;
    return c;
}

/// Decade-spanning self-similar run via chained segments with doubling dt.
struct DecadeRun {
    Problem prob;
    std::vector<double> times;  // absolute (t0 + run time)
    std::vector<StepDiagnostics> diag;
    std::vector<ScalarField> fields;
    double t0;
};

DecadeRun decade_run(int d, int n, double t0, double t_end, double dt0) {
    BarenblattProfile b = make_barenblatt(4.0, d);
    DecadeRun out;
    out.t0 = t0;
    out.prob.p = 4.0;
    out.prob.d = d;
    out.prob.n = n;
    out.prob.L = 1.35 * b.radius(t_end) + 2.0 * b.radius(t0);
    out.prob.delta = 1e-10;
    ProxConfig cfg;
    cfg.tol = 1e-11;
    const Grid g = out.prob.grid();
    ScalarField u = b.sample(g, t0);
    const double thr = 1e-8 * sup_norm(u);
    out.times.push_back(t0);
    out.diag.push_back(step_diagnostics(u, t0, 4.0, thr, 0.0, 0));
    out.fields.push_back(u);
    double t_abs = t0, dt = dt0;
    while (t_abs < t_end) {
        Problem seg = out.prob;
        seg.dt = dt;
        seg.T = std::min(40 * dt, t_end - t_abs);
        FlowTrajectory traj = evolve(u, seg, cfg);
        for (long k = 1; k <= traj.steps(); ++k) {
            out.times.push_back(t_abs + traj.times[k]);
            StepDiagnostics sd = traj.diag[k];
            sd.t = out.times.back();
            out.diag.push_back(sd);
        }
        u = traj.fields.back();
        out.fields.push_back(u);
        t_abs += traj.times.back();
        dt *= 2.0;
    }
    out.prob.T = t_abs - t0;
    out.prob.dt = dt0;
    out.prob.R = out.diag.front().support_radius;
    return out;
}

const DecadeRun& decade_1d() {
    static DecadeRun run = decade_run(1, 256, 0.2, 4.0, 1.5e-3);
    return run;
}
const DecadeRun& decade_2d() {
    static DecadeRun run = decade_run(2, 128, 0.1, 2.2, 1e-3);
    return run;
}

double terminal_w1(const FlowTrajectory& traj, long N, uint64_t seed, int substeps = 1) {
    double dist = -1.0;
    const long K = traj.steps();
    simulate([&](long k) -> const ScalarField& { return traj.fields[k]; }, traj.times,
             traj.prob.p, traj.prob.delta, N, seed, substeps,
             [&](long k, const ParticleEnsemble& e) {
                 if (k == K) dist = w1_distance_1d(e, traj.fields[k]);
             },
             worker_threads());
    return dist;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_CASE("criterion 01: discrete calculus") {
    // summation by parts to machine precision on 100 random pairs
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    bool sbp_ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int d = rep % 2 ? 2 : 1;
        Grid g = make_grid(d, d == 1 ? 64 : 16, 1.5);
        ScalarField u(g);
        for (auto& v : u.v) v = dist(rng);
        FaceField f(g);
        const int n = g.n;
        if (d == 1) {
            for (int j = 1; j < n; ++j) f.comp[0][j] = dist(rng);
        } else {
            for (int jx = 1; jx < n; ++jx)
                for (int iy = 0; iy < n; ++iy) f.comp[0][jx * n + iy] = dist(rng);
            for (int ix = 0; ix < n; ++ix)
                for (int jy = 1; jy < n; ++jy) f.comp[1][ix * (n + 1) + jy] = dist(rng);
        }
        const double lhs = inner_faces(face_gradient(u), f);
        const double rhs = inner(u, divergence(f));
        const double err = std::abs(lhs + rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0);
        worst = std::max(worst, err);
        sbp_ok = sbp_ok && err < 1e-12;
    }
    criterion(1, "summation by parts, 100 random pairs", sbp_ok,
              "worst relative defect " + fmt2(worst, 1e-12, "<"));

    // second-order interior convergence of gradient and divergence
    auto grad_err = [](int n) {
        Grid g = make_grid(1, n, M_PI);
        ScalarField u = sample_function(g, [](double x, double) { return std::sin(x); });
        GradientField gf = gradient(u);
        double e = 0.0;
        for (int i = 0; i < g.n; ++i)
            if (std::abs(g.coord(i)) < 2.0)
                e = std::max(e, std::abs(gf.center[0][i] - std::cos(g.coord(i))));
        return e;
    };
    auto div_err = [](int n) {
        Grid g = make_grid(1, n, M_PI);
        FaceField f(g);
        for (int j = 1; j < n; ++j) f.comp[0][j] = std::sin(2.0 * (-g.half_width + j * g.h));
        ScalarField dv = divergence(f);
        double e = 0.0;
        for (int i = 0; i < g.n; ++i)
            if (std::abs(g.coord(i)) < 2.0)
                e = std::max(e, std::abs(dv[i] - 2.0 * std::cos(2.0 * g.coord(i))));
        return e;
    };
    const double rg = grad_err(256) / grad_err(512);
    const double rd = div_err(256) / div_err(512);
    criterion(1, "Richardson ratio 4 +- 0.5 for gradient and divergence",
              std::abs(rg - 4.0) <= 0.5 && std::abs(rd - 4.0) <= 0.5,
              "gradient " + fmt2(rg, 4.0) + ", divergence " + fmt2(rd, 4.0));
}

TEST_CASE("criterion 02: prox/resolvent correctness") {
    // every accepted step of the nominal run meets the independent residual
    const NominalRun& run = nominal();
    double worst = 0.0;
    for (long k = 1; k <= run.traj.steps(); ++k)
        worst = std::max(worst, run.traj.diag[k].residual);
    // spot-check a fresh residual recomputation on the final step
    const OperatorParams prm{run.prob.p, run.prob.epsilon, run.prob.delta};
    ScalarField av = apply_A(run.traj.fields.back(), prm);
    const ScalarField& f = run.traj.fields[run.traj.steps() - 1];
    const ScalarField& v = run.traj.fields.back();
    double s = 0.0;
    const double lambda = run.traj.times.back() - run.traj.times[run.traj.steps() - 1];
    for (long c = 0; c < v.size(); ++c) {
        const double r = v[c] + lambda * av[c] - f[c];
        s += r * r;
    }
    const double fresh = std::sqrt(s * run.prob.grid().cell_volume()) / l2_norm(f);
    criterion(2, "independent prox residual <= 1e-10 on every accepted step",
              worst <= 1e-10 && fresh <= 1e-10,
              "max recorded " + fmt2(worst, 1e-10, "<=") + ", recomputed terminal " +
                  fmt2(fresh, 1e-10, "<="));

    // flux Jacobian vs finite differences, 100 random gradients, p in {3,4,6}
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    bool jac_ok = true;
    double jworst = 0.0;
    for (double p : {3.0, 4.0, 6.0}) {
        for (int rep = 0; rep < 100; ++rep) {
            const int nz = 1 + rep % 2;
            double z[2], w[2], an[2], fp[2], fm[2], zp[2], zm[2];
            for (int i = 0; i < nz; ++i) {
                z[i] = dist(rng);
                w[i] = dist(rng);
            }
            flux_jac_apply(z, w, nz, p, 0.0, an);
            const double step = 1e-6;
            for (int i = 0; i < nz; ++i) {
                zp[i] = z[i] + step * w[i];
                zm[i] = z[i] - step * w[i];
            }
            flux_vec(zp, nz, p, 0.0, fp);
            flux_vec(zm, nz, p, 0.0, fm);
            double scale = 1.0;
            for (int i = 0; i < nz; ++i) scale = std::max(scale, std::abs(an[i]));
            for (int i = 0; i < nz; ++i) {
                const double rel = std::abs((fp[i] - fm[i]) / (2.0 * step) - an[i]) / scale;
                jworst = std::max(jworst, rel);
                jac_ok = jac_ok && rel <= 1e-5;
            }
        }
    }
    criterion(2, "flux Jacobian matches finite differences to 1e-5 (p in {3,4,6})", jac_ok,
              "worst relative " + fmt2(jworst, 1e-5, "<="));
}

TEST_CASE("criterion 03: mass conservation and negative control") {
    const NominalRun& run = nominal();
    const double m0 = run.traj.diag.front().mass;
    double drift = 0.0;
    for (const auto& d : run.traj.diag) drift = std::max(drift, std::abs(d.mass - m0));
    criterion(3, "relative mass drift <= 1e-8 over the full nominal run",
              drift <= 1e-8 * std::abs(m0), fmt2(drift / m0, 1e-8, "<="));

    // the same check flags a deliberately non-conservative stencil
    const Grid g = run.prob.grid();
    ScalarField u = run.traj.fields.front();
    const double thr = 1e-8 * sup_norm(u);
    std::vector<double> times{0.0};
    std::vector<StepDiagnostics> diag{step_diagnostics(u, 0.0, 4.0, thr, 0.0, 0)};
    for (int k = 1; k <= 10; ++k) {
        FaceField fg = face_gradient(u);
        for (int i = 0; i < g.n; ++i) {
            const double fl = std::pow(fg.comp[0][i], 3.0);
            const double fr = std::pow(fg.comp[0][i + 1], 3.0);
            u[i] += 1e-4 * (fr - (fl > 0.0 ? 1.02 * fl : fl)) / g.h;
        }
        times.push_back(k * 1e-4);
        diag.push_back(step_diagnostics(u, times.back(), 4.0, thr, 0.0, 1));
    }
    RunRecord broken;
    broken.prob = run.prob;
    broken.times = times;
    broken.diag = diag;
    broken.init_mass = m0;
    const bool control_fails = !check_conservation_and_bounds(broken)[0].pass;
    criterion(3, "negative control: non-conservative stencil fails the mass check",
              control_fails, control_fails ? "violation detected" : "violation NOT detected");
}

TEST_CASE("criterion 04: max principle, nonnegativity, L1 contraction") {
    RunRecord run = record_from(nominal().traj, support_constant_1d(), true, 1.0);
    auto checks = check_conservation_and_bounds(run);
    // checks[1] = max principle, [2] = nonnegativity, [3] = l1 contraction
    criterion(4, "max principle with 1e-8 relative slack", checks[1].pass,
              fmt2(checks[1].lhs, checks[1].rhs, "<="));
    criterion(4, "nonnegativity with 1e-8 relative slack", checks[2].pass,
              fmt2(checks[2].lhs, checks[2].rhs, "<="));
    criterion(4, "L1 contraction with 1e-8 relative slack", checks[3].pass,
              fmt2(checks[3].lhs, checks[3].rhs, "<="));
}

TEST_CASE("criterion 05: energy identity") {
    auto residual = [](const NominalRun& run, bool& one_sided) {
        const double rhs = 0.5 * run.traj.diag.front().l2 * run.traj.diag.front().l2;
        double dissip = 0.0;
        one_sided = true;
        double lhs = 0.0;
        for (long k = 1; k <= run.traj.steps(); ++k) {
            dissip += (run.traj.times[k] - run.traj.times[k - 1]) * run.prob.p *
                      run.traj.diag[k].phi;
            const double partial = 0.5 * run.traj.diag[k].l2 * run.traj.diag[k].l2 + dissip;
            one_sided = one_sided && partial <= rhs + 1e-8 * rhs;
            lhs = partial;
        }
        return rhs - lhs;
    };
    bool os1 = false, os2 = false;
    const double r1 = residual(nominal(), os1);
    const double r2 = residual(nominal_half_dt(), os2);
    const double ratio = r1 / r2;
    criterion(5, "identity residual halves (+-25%) when dt halves",
              ratio >= 1.5 && ratio <= 2.5, "ratio " + fmt2(ratio, 2.0));
    criterion(5, "one-sided dissipation inequality at every step", os1 && os2,
              os1 && os2 ? "holds on both runs" : "violated");
}

TEST_CASE("criterion 06: Barenblatt oracle equivalence") {
    auto l1_err = [](const NominalRun& run) {
        const ScalarField& uT = run.traj.fields.back();
        ScalarField ref = run.profile.sample(run.prob.grid(), run.t0 + run.prob.T);
        return l1_distance(uT, ref);
    };
    const double e256 = l1_err(nominal());
    const double e128 = l1_err(nominal_coarse());
    criterion(6, "evolved profile matches the self-similar solution within 2% (L1)",
              e256 <= 0.02, "L1 error at n=256: " + fmt2(e256, 0.02, "<="));
    criterion(6, "error improves under refinement", e256 < e128,
              "n=128: " + fmt2(e128, e256, "-> n=256:"));

    BarenblattProfile good = make_barenblatt(4.0, 1);
    BarenblattProfile bad = good;
    bad.q *= 1.1;
    Grid g1 = make_grid(1, 256, 4.0), g2 = make_grid(1, 512, 4.0);
    const double ratio_good = pde_residual(good, 1.0, g1) / pde_residual(good, 1.0, g2);
    const double ratio_bad = pde_residual(bad, 1.0, g1) / pde_residual(bad, 1.0, g2);
    criterion(6, "oracle residual negative control (q x 1.1) detected",
              ratio_good >= 3.0 && ratio_bad < 2.0,
              "refinement ratio: correct q " + fmt2(ratio_good, ratio_bad, ", perturbed q"));
}

TEST_CASE("criterion 07: support growth") {
    for (const DecadeRun* run : {&decade_1d(), &decade_2d()}) {
        const int d = run->prob.d;
        const double beta = run->prob.beta();
        std::vector<double> rs;
        for (const auto& sd : run->diag) rs.push_back(sd.support_radius);
        const double slope = fit_loglog_slope(run->times, rs);
        criterion(7,
                  "fitted support exponent within 10% of 1/(d(p-2)+p), d=" + std::to_string(d),
                  std::abs(slope - beta) <= 0.10 * beta,
                  "slope " + fmt2(slope, beta) + " (1/" + std::to_string(int(1.0 / beta)) + ")");

        const double C = d == 1 ? support_constant_1d() : support_constant_2d();
        bool contained = true;
        double worst = 0.0;
        for (size_t k = 1; k < run->times.size(); ++k) {
            const double t_run = run->times[k] - run->t0;
            const double bound = 2.0 * run->prob.R + C * std::pow(t_run, beta);
            worst = std::max(worst, rs[k] / bound);
            contained = contained && rs[k] <= bound;
        }
        criterion(7, "containment in the calibrated bound at every step, d=" + std::to_string(d),
                  contained, "worst radius/bound " + fmt2(worst, 1.0, "<="));
    }

    // qualitative finite-speed witness: one step grows the support by at most
    // a few cells
    const NominalRun& run = nominal();
    const double r0 = run.traj.diag[0].support_radius;
    const double r1 = run.traj.diag[1].support_radius;
    criterion(7, "no instantaneous filling: one step grows the support by <= 3 cells",
              r1 - r0 <= 3.0 * run.prob.grid().h, fmt2(r1 - r0, 3.0 * run.prob.grid().h, "<="));
}

TEST_CASE("criterion 08: gradient sup bound") {
    auto overshoot = [](const NominalRun& run) {
        double worst = 0.0;
        const double init = run.traj.diag.front().extra.gsup_x;
        for (const auto& d : run.traj.diag)
            worst = std::max(worst, d.extra.gsup_x / init - 1.0);
        return std::max(worst, 0.0);
    };
    const double o256 = overshoot(nominal());
    const double o128 = overshoot(nominal_coarse());
    criterion(8, "componentwise gradient sup <= initial x 1.05", o256 <= 0.05,
              "overshoot " + fmt2(o256, 0.05, "<="));
    criterion(8, "overshoot shrinks under refinement", o256 <= o128,
              "n=128: " + fmt2(o128, o256, "-> n=256:"));
}

TEST_CASE("criterion 09: second-order estimates with explicit constants") {
    // d=1 nominal run
    RunRecord run1 = record_from(nominal().traj, support_constant_1d(), true, 1.0);
    auto checks1 = check_second_order(run1);
    // d=2 decade run
    RunRecord run2;
    run2.prob = decade_2d().prob;
    run2.times.assign(decade_2d().times.size(), 0.0);
    for (size_t k = 0; k < run2.times.size(); ++k)
        run2.times[k] = decade_2d().times[k] - decade_2d().t0;
    run2.diag = decade_2d().diag;
    run2.init_mass = run2.diag.front().mass;
    run2.c_support = support_constant_2d();
    auto checks2 = check_second_order(run2);

    for (auto& [tag, checks] :
         std::vector<std::pair<std::string, std::vector<EstimateCheck>*>>{
             {"d=1", &checks1}, {"d=2", &checks2}}) {
        for (const auto& c : *checks)
            criterion(9, c.name + " holds with zero tolerance, " + tag, c.pass,
                      fmt2(c.lhs, c.rhs, "<="));
    }
    // lhs of the mobility integral is monotone in T (partial-sum property)
    double acc = 0.0;
    bool monotone = true;
    double prev = 0.0;
    for (long k = 0; k < nominal().traj.steps(); ++k) {
        acc += (nominal().traj.times[k + 1] - nominal().traj.times[k]) *
               nominal().traj.diag[k].extra.int_pm2;
        monotone = monotone && acc >= prev;
        prev = acc;
    }
    criterion(9, "time-integrated mobility is monotone in T", monotone,
              monotone ? "nondecreasing partial sums" : "partial sums decreased");
}

TEST_CASE("criterion 10: superposition") {
    const NominalRun& run = nominal();
    const double diam =
        2.0 * support_radius(run.traj.fields.back(), 1e-8 * sup_norm(run.traj.fields.back()));

    std::vector<double> base;
    for (uint64_t s = 0; s < 5; ++s) base.push_back(terminal_w1(run.traj, 100000, 42 + s));
    const double w1_base = median(base);
    criterion(10, "terminal W1 <= 5% of the support diameter at N=1e5, dt=1e-3",
              w1_base <= 0.05 * diam, fmt2(w1_base, 0.05 * diam, "<="));

    std::vector<double> refined;
    for (uint64_t s = 0; s < 5; ++s)
        refined.push_back(terminal_w1(nominal_half_dt().traj, 1000000, 142 + s));
    const double w1_ref = median(refined);
    criterion(10, "distance decreases under (N x 10, dt/2), median over 5 seeds",
              w1_ref <= w1_base, fmt2(w1_ref, w1_base, "<="));

    // Monte Carlo rate in N: log-log slope -0.5 +- 0.15 over N = 1e3, 1e4, 1e5
    std::vector<double> Ns{1e3, 1e4, 1e5}, w1s;
    for (double N : Ns) {
        std::vector<double> d;
        for (uint64_t s = 0; s < 3; ++s)
            d.push_back(terminal_w1(run.traj, static_cast<long>(N), 7 + 13 * s));
        w1s.push_back(median(d));
    }
    const double slope = fit_loglog_slope(Ns, w1s);
    criterion(10, "Monte Carlo rate: log-log slope -0.5 +- 0.15 in N",
              std::abs(slope + 0.5) <= 0.15, "slope " + fmt2(slope, -0.5));
}

TEST_CASE("criterion 11: epsilon and delta convergence") {
    json j = json{{"p", 4.0},
                  {"d", 1},
                  {"L", 6.0},
                  {"n", 192},
                  {"dt", 1e-3},
                  {"T", 0.1},
                  {"init", {{"type", "barenblatt"}, {"t0", 1.0}}},
                  {"tolerances", {{"prox_tol", 1e-11}}}};
    RunConfig cfg = config_from_json(j);
    auto eps_rows = run_sweep(cfg, "epsilon", 3);
    const bool eps_dec =
        eps_rows[0].metric > eps_rows[1].metric && eps_rows[1].metric > eps_rows[2].metric;
    criterion(11, "|u_eps(T) - u_0(T)|_2 strictly decreasing over eps in {1e-1,1e-2,1e-3}",
              eps_dec,
              fmt2(eps_rows[0].metric, eps_rows[1].metric) + " > " +
                  std::to_string(eps_rows[2].metric));
    auto del_rows = run_sweep(cfg, "delta", 3);
    const bool del_dec =
        del_rows[0].metric > del_rows[1].metric && del_rows[1].metric > del_rows[2].metric;
    criterion(11, "delta-sweep analogously strictly decreasing", del_dec,
              fmt2(del_rows[0].metric, del_rows[1].metric) + " > " +
                  std::to_string(del_rows[2].metric));
}

TEST_CASE("criterion 12: reproducibility") {
    // identical configs give identical trajectories (bitwise), and particle
    // snapshots do not depend on the worker count
    Problem prob = nominal().prob;
    prob.T = 0.02;
    BarenblattProfile b = make_barenblatt(4.0, 1);
    ScalarField u0 = b.sample(prob.grid(), 1.0);
    ProxConfig cfg;
    cfg.tol = 1e-12;
    FlowTrajectory t1 = evolve(u0, prob, cfg);
    FlowTrajectory t2 = evolve(u0, prob, cfg);
    bool same = true;
    for (long k = 0; k <= t1.steps(); ++k) {
        same = same && t1.fields[k].v == t2.fields[k].v;
        same = same && t1.diag[k].mass == t2.diag[k].mass &&
               t1.diag[k].phi == t2.diag[k].phi;
    }
    criterion(12, "re-running the solver is bit-identical", same,
              same ? "all fields and diagnostics equal" : "difference found");

    CoefficientField coeff = make_coefficients(t1.fields.back(), 4.0, prob.delta, 0.0);
    ParticleEnsemble e1 = sample_initial(u0, 50000, 4242);
    ParticleEnsemble e2 = e1;
    for (int k = 0; k < 10; ++k) {
        em_step_inplace(e1, coeff, 1e-3, 1);
        em_step_inplace(e2, coeff, 1e-3, 4);
    }
    criterion(12, "particle positions are bit-identical across worker counts",
              e1.pos == e2.pos, "1 thread vs 4 threads, 10 steps, N=5e4");
}

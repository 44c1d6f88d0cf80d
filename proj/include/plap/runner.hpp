#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plap/barenblatt.hpp"
#include "plap/evolve.hpp"
#include "plap/io.hpp"
#include "plap/marginals.hpp"
#include "plap/particles.hpp"
#include "plap/verifier.hpp"

namespace plap {

inline constexpr const char* kToolVersion = "0.1.0";

struct InitConfig {
    std::string type = "barenblatt";  // barenblatt | bump | file
    double t0 = 1.0;                  // barenblatt: self-similar start time
    double mass = 1.0;
    double radius = 1.0;              // bump: support radius
    std::string shape = "cos2";       // bump: cos2 | box
    std::string path;                 // file: field csv
};

struct ParticlesConfig {
    long N = 100000;
    uint64_t seed = 42;
    int substeps = 1;
};

struct SolverConfig {
    double prox_tol = 1e-10;
    int max_iter = 60;
    std::string inner = "newton";  // newton | fixed_point
};

struct RunConfig {
    Problem prob;
    bool delta_auto = true;  // delta = 1e-8 |grad u0|_inf unless given
    InitConfig init;
    ParticlesConfig particles;
    SolverConfig solver;
    long snapshot_every = 1;
    int threads = 0;
};

// ---- config json -----------------------------------------------------------

namespace detail {
inline double num_at(const json& j, const std::string& key, double fallback, bool required,
                     const std::string& path) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(path, "missing required field");
        return fallback;
    }
    if (!j.at(key).is_number()) throw ConfigError(path, "must be a number");
    return j.at(key).get<double>();
}
}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    cfg.prob.p = detail::num_at(j, "p", 4.0, false, "p");
    cfg.prob.d = static_cast<int>(detail::num_at(j, "d", 1, false, "d"));
    cfg.prob.L = detail::num_at(j, "L", 6.0, false, "L");
    cfg.prob.n = static_cast<int>(detail::num_at(j, "n", 256, false, "n"));
    cfg.prob.dt = detail::num_at(j, "dt", 1e-3, false, "dt");
    cfg.prob.T = detail::num_at(j, "T", 0.5, false, "T");
    cfg.prob.epsilon = detail::num_at(j, "epsilon", 0.0, false, "epsilon");
    if (j.contains("delta") && !j.at("delta").is_null()) {
        if (!j.at("delta").is_number()) throw ConfigError("delta", "must be a number or null");
        cfg.prob.delta = j.at("delta").get<double>();
        cfg.delta_auto = false;
    }
    validate_problem(cfg.prob);

    if (j.contains("init")) {
        const json& ji = j.at("init");
        cfg.init.type = ji.value("type", cfg.init.type);
        if (cfg.init.type != "barenblatt" && cfg.init.type != "bump" && cfg.init.type != "file")
            throw ConfigError("init.type", "must be barenblatt, bump or file");
        cfg.init.t0 = detail::num_at(ji, "t0", cfg.init.t0, false, "init.t0");
        if (!(cfg.init.t0 > 0.0)) throw ConfigError("init.t0", "must be positive");
        cfg.init.mass = detail::num_at(ji, "mass", cfg.init.mass, false, "init.mass");
        if (!(cfg.init.mass > 0.0)) throw ConfigError("init.mass", "must be positive");
        cfg.init.radius = detail::num_at(ji, "radius", cfg.init.radius, false, "init.radius");
        if (!(cfg.init.radius > 0.0)) throw ConfigError("init.radius", "must be positive");
        cfg.init.shape = ji.value("shape", cfg.init.shape);
        if (cfg.init.shape != "cos2" && cfg.init.shape != "box")
            throw ConfigError("init.shape", "must be cos2 or box");
        cfg.init.path = ji.value("path", cfg.init.path);
        if (cfg.init.type == "file" && cfg.init.path.empty())
            throw ConfigError("init.path", "required for init.type = file");
    }
    if (j.contains("particles")) {
        const json& jp = j.at("particles");
        cfg.particles.N = static_cast<long>(detail::num_at(jp, "N", 100000, false, "particles.N"));
        if (cfg.particles.N < 0) throw ConfigError("particles.N", "must be nonnegative");
        cfg.particles.seed =
            static_cast<uint64_t>(detail::num_at(jp, "seed", 42, false, "particles.seed"));
        cfg.particles.substeps =
            static_cast<int>(detail::num_at(jp, "substeps", 1, false, "particles.substeps"));
        if (cfg.particles.substeps < 1) throw ConfigError("particles.substeps", "must be >= 1");
    }
    if (j.contains("tolerances")) {
        const json& jt = j.at("tolerances");
        cfg.solver.prox_tol =
            detail::num_at(jt, "prox_tol", cfg.solver.prox_tol, false, "tolerances.prox_tol");
        if (!(cfg.solver.prox_tol > 0.0))
            throw ConfigError("tolerances.prox_tol", "must be positive");
        cfg.solver.max_iter = static_cast<int>(
            detail::num_at(jt, "max_iter", cfg.solver.max_iter, false, "tolerances.max_iter"));
        if (cfg.solver.max_iter < 1) throw ConfigError("tolerances.max_iter", "must be >= 1");
        cfg.solver.inner = jt.value("inner", cfg.solver.inner);
        if (cfg.solver.inner != "newton" && cfg.solver.inner != "fixed_point")
            throw ConfigError("tolerances.inner", "must be newton or fixed_point");
    }
    cfg.snapshot_every =
        static_cast<long>(detail::num_at(j, "snapshot_every", 1, false, "snapshot_every"));
    if (cfg.snapshot_every < 1) throw ConfigError("snapshot_every", "must be >= 1");
    cfg.threads = static_cast<int>(detail::num_at(j, "threads", 0, false, "threads"));
    return cfg;
}

inline json config_to_json(const RunConfig& cfg) {
    json j{{"p", cfg.prob.p},
           {"d", cfg.prob.d},
           {"L", cfg.prob.L},
           {"n", cfg.prob.n},
           {"dt", cfg.prob.dt},
           {"T", cfg.prob.T},
           {"epsilon", cfg.prob.epsilon},
           {"delta", cfg.prob.delta},
           {"snapshot_every", cfg.snapshot_every},
           {"threads", cfg.threads}};
    j["init"] = {{"type", cfg.init.type}, {"t0", cfg.init.t0},     {"mass", cfg.init.mass},
                 {"radius", cfg.init.radius}, {"shape", cfg.init.shape}, {"path", cfg.init.path}};
    j["particles"] = {{"N", cfg.particles.N},
                      {"seed", cfg.particles.seed},
                      {"substeps", cfg.particles.substeps}};
    j["tolerances"] = {{"prox_tol", cfg.solver.prox_tol},
                       {"max_iter", cfg.solver.max_iter},
                       {"inner", cfg.solver.inner}};
    return j;
}

inline ProxConfig prox_config(const SolverConfig& s) {
    ProxConfig cfg;
    cfg.tol = s.prox_tol;
    cfg.max_iter = s.max_iter;
    cfg.inner = s.inner == "newton" ? ProxConfig::Inner::newton : ProxConfig::Inner::fixed_point;
    return cfg;
}

// ---- initial data ------------------------------------------------------------

struct InitialData {
    ScalarField u0;
    double t_offset = 0.0;
    bool barenblatt = false;
};

inline InitialData make_initial(const RunConfig& cfg) {
    const Grid g = cfg.prob.grid();
    InitialData out;
    if (cfg.init.type == "barenblatt") {
        BarenblattProfile b = make_barenblatt(cfg.prob.p, cfg.prob.d, cfg.init.mass);
        out.u0 = b.sample(g, cfg.init.t0);
        out.t_offset = cfg.init.t0;
        out.barenblatt = true;
    } else if (cfg.init.type == "bump") {
        const double R = cfg.init.radius;
        out.u0 = sample_function(g, [&](double x, double y) {
            const double r = g.dim == 1 ? std::abs(x) : std::hypot(x, y);
            if (r >= R) return 0.0;
            if (cfg.init.shape == "box") return 1.0;
            const double c = std::cos(0.5 * M_PI * r / R);
            return c * c;
        });
        const double m = mass(out.u0);
        if (!(m > 0.0)) throw ConfigError("init.radius", "bump has no mass on this grid");
        for (auto& v : out.u0.v) v *= cfg.init.mass / m;
    } else {
        out.u0 = io::read_field_csv(cfg.init.path, g);
    }
    return out;
}

/// delta default: 1e-8 x the sup of the initial face gradients.
inline double resolve_delta(const RunConfig& cfg, const ScalarField& u0) {
    if (!cfg.delta_auto) return cfg.prob.delta;
    auto gs = gradient_sup_per_axis(u0);
    return 1e-8 * std::max(gs[0], gs[1]);
}

// ---- oracle calibration --------------------------------------------------------

namespace detail {
inline SupportRun measured_support_run(const BarenblattProfile& b, double t0, double t_end,
                                       int n, double dt) {
    Problem prob;
    prob.p = b.p;
    prob.d = b.d;
    prob.n = n;
    prob.L = 1.4 * b.radius(t_end) + 0.5;
    prob.dt = dt;
    prob.T = t_end - t0;
    prob.delta = 1e-10;
    ProxConfig cfg;
    cfg.tol = 1e-10;
    const Grid g = prob.grid();
    ScalarField u0 = b.sample(g, t0);
    const double thr = 1e-8 * sup_norm(u0);
    SupportRun run;
    run.init_mass = b.total_mass;
    evolve(u0, prob, cfg, false, [&](long, double t, const ScalarField& u) {
        run.times.push_back(t0 + t);
        run.radii.push_back(support_radius(u, thr));
    });
    return run;
}
}  // namespace detail

/// Builds the per-(p,d) oracle constants: q and C1 from the profile, the
/// free-boundary constant, and the support constant measured from two short
/// runs on distinct time grids.  Returns nothing when the profile fails its
/// own residual refinement check (the oracle is then unavailable for this p).
inline std::optional<OracleConstants> calibrate_oracle(double p, int d) {
    BarenblattProfile b = make_barenblatt(p, d);
    const int nv = d == 1 ? 192 : 128;
    Grid gv1 = make_grid(d, nv, 1.3 * b.radius(1.0));
    Grid gv2 = make_grid(d, 2 * nv, 1.3 * b.radius(1.0));
    const double r1 = pde_residual(b, 1.0, gv1);
    const double r2 = pde_residual(b, 1.0, gv2);
    if (!(r1 > 0.0) || !(r2 > 0.0) || r1 / r2 < 1.8) return std::nullopt;

    try {
        const int nrun = d == 1 ? 128 : 64;
        SupportRun runA = detail::measured_support_run(b, 0.3, 1.2, nrun, d == 1 ? 3e-3 : 6e-3);
        SupportRun runB = detail::measured_support_run(b, 0.5, 1.5, nrun, d == 1 ? 5e-3 : 1e-2);
        OracleConstants oc;
        oc.p = p;
        oc.d = d;
        oc.q = b.q;
        oc.C1 = b.C1;
        oc.c_fb = b.c_fb;
        oc.C_support = calibrate_support_constant({runA, runB}, p, d);
        return oc;
    } catch (const NonConvergenceError&) {
        return std::nullopt;
    }
}

// ---- solve -------------------------------------------------------------------

inline std::string step_name(long k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "field_%06ld.csv", k);
    return buf;
}

inline void cmd_solve(const std::filesystem::path& config_path,
                      const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& constants_path = {},
                      bool export_coefficients = false) {
    const auto t_start = std::chrono::steady_clock::now();
    RunConfig cfg = config_from_json(io::read_json(config_path));
    if (std::filesystem::exists(out_dir / "manifest.json"))
        throw Error("refusing to write into an existing run directory: " + out_dir.string());

    InitialData init = make_initial(cfg);
    cfg.prob.delta = resolve_delta(cfg, init.u0);
    const double sup0 = sup_norm(init.u0);
    cfg.prob.R = sup0 > 0.0
                     ? support_radius(init.u0, 1e-8 * sup0)
                     : 0.0;

    std::optional<OracleConstants> oc;
    if (constants_path) {
        oc = oracle_constants_from_json(io::read_json(*constants_path));
        if (oc->p != cfg.prob.p || oc->d != cfg.prob.d)
            throw ConfigError("constants", "constants file is for a different (p, d)");
    } else {
        oc = calibrate_oracle(cfg.prob.p, cfg.prob.d);
    }
    const double m0 = mass(init.u0);
    if (oc && cfg.prob.R > 0.0 && !box_invariant_holds(cfg.prob, oc->C_support, m0))
        throw ConfigError("L", "box too small: 2R + R(T) = " +
                                   std::to_string(support_bound(cfg.prob, oc->C_support,
                                                                cfg.prob.T, m0)) +
                                   " must stay below L = " + std::to_string(cfg.prob.L));

    FlowTrajectory traj =
        evolve(init.u0, cfg.prob, prox_config(cfg.solver), false,
               [&](long k, double t, const ScalarField& u) {
                   const long K = static_cast<long>(std::ceil(cfg.prob.T / cfg.prob.dt - 1e-12));
                   if (k % cfg.snapshot_every != 0 && k != K) return;
                   io::write_field_csv(out_dir / "fields" / step_name(k), u);
                   if (export_coefficients)
                       io::write_coefficients_csv(
                           out_dir / "coefficients" / ("coeff_" + step_name(k).substr(6)),
                           make_coefficients(u, cfg.prob.p, cfg.prob.delta, t));
               });

    io::write_diagnostics_csv(out_dir / "diagnostics.csv", traj.times, traj.diag);
    io::write_estimators_csv(out_dir / "estimators.csv", cfg.prob.d, traj.times, traj.diag);
    if (oc) io::write_json(out_dir / "oracle_constants.json", to_json(*oc));

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    json manifest{{"config", config_to_json(cfg)},
                  {"tool", {{"name", "plap"}, {"version", kToolVersion}}},
                  {"wall_time_s", wall},
                  {"steps", traj.steps()},
                  {"R", cfg.prob.R},
                  {"init_mass", m0},
                  {"t_offset", init.t_offset},
                  {"barenblatt_init", init.barenblatt},
                  {"warnings", traj.warnings}};
    io::write_json(out_dir / "manifest.json", manifest);
}

// ---- simulate ------------------------------------------------------------------

inline std::string ensemble_name(long k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ensemble_%06ld.csv", k);
    return buf;
}

inline std::filesystem::path particles_dir_name(const std::filesystem::path& run_dir, long N,
                                                uint64_t seed, int substeps) {
    return run_dir / ("particles_N" + std::to_string(N) + "_seed" + std::to_string(seed) +
                      "_sub" + std::to_string(substeps));
}

inline json load_manifest(const std::filesystem::path& run_dir) {
    if (!std::filesystem::exists(run_dir / "manifest.json"))
        throw MissingRunError(run_dir.string());
    return io::read_json(run_dir / "manifest.json");
}

inline void cmd_simulate(const std::filesystem::path& run_dir, long N, uint64_t seed,
                         int substeps, int threads = 0, long snapshot_every = 0) {
    json manifest = load_manifest(run_dir);
    RunConfig cfg = config_from_json(manifest.at("config"));
    if (cfg.snapshot_every != 1)
        throw Error("simulate needs a run saved with snapshot_every = 1 (fields at every step)");
    if (substeps < 1) throw ConfigError("substeps", "must be >= 1");

    std::vector<double> times;
    std::vector<StepDiagnostics> diag;
    io::read_run_history(run_dir, cfg.prob.d, times, diag);
    const long K = static_cast<long>(times.size()) - 1;
    if (snapshot_every <= 0) snapshot_every = std::max<long>(1, K / 10);

    const std::filesystem::path pdir = particles_dir_name(run_dir, N, seed, substeps);
    if (std::filesystem::exists(pdir))
        throw Error("particle snapshots already exist (runs are append-only): " + pdir.string());

    const Grid g = cfg.prob.grid();
    ScalarField current;
    long cached = -1;
    auto field_at = [&](long k) -> const ScalarField& {
        if (k != cached) {
            current = io::read_field_csv(run_dir / "fields" / step_name(k), g);
            cached = k;
        }
        return current;
    };
    const int nthreads = resolve_threads(threads > 0 ? threads : cfg.threads);
    simulate(field_at, times, cfg.prob.p, cfg.prob.delta, N, seed, substeps,
             [&](long k, const ParticleEnsemble& e) {
                 if (k % snapshot_every == 0 || k == K)
                     io::write_ensemble_csv(pdir / ensemble_name(k), e);
             },
             nthreads);

    io::write_json(pdir / "simulate_manifest.json",
                   json{{"N", N},
                        {"seed", seed},
                        {"substeps", substeps},
                        {"dt", cfg.prob.dt / substeps},
                        {"snapshot_every", snapshot_every},
                        {"steps", K}});
}

// ---- compare -------------------------------------------------------------------

inline std::filesystem::path find_particles_dir(const std::filesystem::path& run_dir,
                                                const std::string& requested) {
    if (!requested.empty()) {
        std::filesystem::path p = run_dir / requested;
        if (!std::filesystem::exists(p / "simulate_manifest.json"))
            throw MissingRunError(p.string());
        return p;
    }
    std::vector<std::filesystem::path> found;
    for (const auto& e : std::filesystem::directory_iterator(run_dir))
        if (e.is_directory() && e.path().filename().string().rfind("particles_", 0) == 0)
            found.push_back(e.path());
    if (found.empty()) throw MissingRunError("no particle snapshots under " + run_dir.string());
    if (found.size() > 1)
        throw Error("several particle snapshot sets exist; pass --particles <dir>");
    return found.front();
}

inline void cmd_compare(const std::filesystem::path& run_dir,
                        const std::string& particles_subdir = {}) {
    json manifest = load_manifest(run_dir);
    RunConfig cfg = config_from_json(manifest.at("config"));
    const Grid g = cfg.prob.grid();
    std::vector<double> times;
    std::vector<StepDiagnostics> diag;
    io::read_run_history(run_dir, cfg.prob.d, times, diag);

    const std::filesystem::path pdir = find_particles_dir(run_dir, particles_subdir);
    json rows = json::array();
    std::vector<long> ks;
    for (const auto& e : std::filesystem::directory_iterator(pdir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("ensemble_", 0) == 0) ks.push_back(std::stol(name.substr(9, 6)));
    }
    std::sort(ks.begin(), ks.end());
    for (long k : ks) {
        ParticleEnsemble ens = io::read_ensemble_csv(pdir / ensemble_name(k), cfg.prob.d);
        ScalarField field = io::read_field_csv(run_dir / "fields" / step_name(k), g);
        double dist;
        if (cfg.prob.d == 1) {
            dist = w1_distance_1d(ens, field);
        } else {
            const double m = mass(field);
            ScalarField norm = field;
            if (m > 0.0)
                for (auto& v : norm.v) v /= m;
            dist = l1_distance(histogram_density(ens, g), norm);
        }
        rows.push_back(json{{"t", times[k]},
                            {"metric", cfg.prob.d == 1 ? "w1" : "l1"},
                            {"value", dist},
                            {"N_effective", ens.size()}});
    }
    io::write_json(run_dir / "comparison.json",
                   json{{"snapshots", rows}, {"particles", pdir.filename().string()}});
}

// ---- verify --------------------------------------------------------------------

inline int cmd_verify(const std::filesystem::path& run_dir, bool print = true) {
    json manifest = load_manifest(run_dir);
    RunConfig cfg = config_from_json(manifest.at("config"));

    RunRecord run;
    run.prob = cfg.prob;
    run.prob.R = manifest.value("R", 0.0);
    io::read_run_history(run_dir, cfg.prob.d, run.times, run.diag);
    run.init_mass = manifest.value("init_mass", run.diag.front().mass);
    run.t_offset = manifest.value("t_offset", 0.0);
    run.barenblatt_init = manifest.value("barenblatt_init", false);
    if (std::filesystem::exists(run_dir / "oracle_constants.json"))
        run.c_support =
            oracle_constants_from_json(io::read_json(run_dir / "oracle_constants.json"))
                .C_support;

    std::vector<SuperpositionSample> sup_samples;
    long n_particles = 0;
    if (std::filesystem::exists(run_dir / "comparison.json")) {
        json cmp = io::read_json(run_dir / "comparison.json");
        for (const auto& row : cmp.at("snapshots")) {
            sup_samples.push_back({row.at("t").get<double>(), row.at("value").get<double>()});
            n_particles = row.at("N_effective").get<long>();
        }
    }

    EstimateReport rep = run_all_checks(run, sup_samples, n_particles);
    json jc = json::array();
    for (const auto& c : rep.checks) {
        jc.push_back(json{{"name", c.name},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"relation", c.relation},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"statement", c.statement},
                          {"detail", c.detail}});
        if (print)
            std::printf("%s %-32s lhs=%.6g %s rhs=%.6g%s\n", c.pass ? "PASS" : "FAIL",
                        c.name.c_str(), c.lhs, c.relation.c_str(), c.rhs,
                        c.relation == "=tol"
                            ? (" tol=" + std::to_string(c.tolerance)).c_str()
                            : "");
    }
    io::write_json(run_dir / "report.json",
                   json{{"checks", jc},
                        {"out_of_theory", rep.out_of_theory},
                        {"n_failed", rep.failed()}});
    return rep.failed();
}

// ---- sweep ---------------------------------------------------------------------

namespace detail {
inline double l2_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField w(a.grid);
    for (long c = 0; c < a.size(); ++c) w[c] = a[c] - b[c];
    return l2_norm(w);
}

/// 2:1 cell-average restriction onto the coarser dyadic grid.
inline ScalarField restrict_field(const ScalarField& fine, const Grid& coarse) {
    ScalarField out(coarse);
    const Grid& gf = fine.grid;
    if (coarse.dim == 1) {
        for (int i = 0; i < coarse.n; ++i) out[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
    } else {
        for (int ix = 0; ix < coarse.n; ++ix)
            for (int iy = 0; iy < coarse.n; ++iy)
                out[coarse.index(ix, iy)] =
                    0.25 * (fine[gf.index(2 * ix, 2 * iy)] + fine[gf.index(2 * ix + 1, 2 * iy)] +
                            fine[gf.index(2 * ix, 2 * iy + 1)] +
                            fine[gf.index(2 * ix + 1, 2 * iy + 1)]);
    }
    return out;
}

inline ScalarField final_field(const RunConfig& cfg, const ScalarField& u0) {
    ScalarField last;
    evolve(u0, cfg.prob, prox_config(cfg.solver), false,
           [&](long, double, const ScalarField& u) { last = u; });
    return last;
}

inline double terminal_marginal_distance(const RunConfig& cfg, const FlowTrajectory& traj,
                                         long N, uint64_t seed, int threads) {
    double dist = 0.0;
    const long K = traj.steps();
    simulate([&](long k) -> const ScalarField& { return traj.fields[k]; }, traj.times,
             cfg.prob.p, cfg.prob.delta, N, seed, cfg.particles.substeps,
             [&](long k, const ParticleEnsemble& e) {
                 if (k != K) return;
                 if (cfg.prob.d == 1) {
                     dist = w1_distance_1d(e, traj.fields[k]);
                 } else {
                     const double m = mass(traj.fields[k]);
                     ScalarField norm = traj.fields[k];
                     for (auto& v : norm.v) v /= m;
                     dist = l1_distance(histogram_density(e, cfg.prob.grid()), norm);
                 }
             },
             threads);
    return dist;
}
}  // namespace detail

struct SweepRow {
    int level;
    double value;
    double metric;
};

inline std::vector<SweepRow> run_sweep(RunConfig cfg, const std::string& axis, int levels,
                                       int threads = 0) {
    if (levels < 2) throw ConfigError("levels", "need at least 2 levels");
    InitialData init = make_initial(cfg);
    cfg.prob.delta = resolve_delta(cfg, init.u0);
    const int nthreads = resolve_threads(threads > 0 ? threads : cfg.threads);
    std::vector<SweepRow> rows;

    if (axis == "dt") {
        RunConfig ref = cfg;
        ref.prob.dt = cfg.prob.dt / std::pow(2.0, levels);
        const ScalarField u_ref = detail::final_field(ref, init.u0);
        for (int i = 0; i < levels; ++i) {
            RunConfig v = cfg;
            v.prob.dt = cfg.prob.dt / std::pow(2.0, i);
            rows.push_back({i, v.prob.dt,
                            detail::l2_diff(detail::final_field(v, init.u0), u_ref)});
        }
    } else if (axis == "n") {
        std::vector<ScalarField> finals;
        for (int i = 0; i <= levels; ++i) {
            RunConfig v = cfg;
            v.prob.n = cfg.prob.n * (1 << i);
            InitialData vi = make_initial(v);
            v.prob.delta = resolve_delta(v, vi.u0);
            finals.push_back(detail::final_field(v, vi.u0));
        }
        for (int i = 0; i < levels; ++i) {
            double metric;
            if (init.barenblatt) {
                BarenblattProfile b = make_barenblatt(cfg.prob.p, cfg.prob.d, cfg.init.mass);
                metric = l1_distance(finals[i],
                                     b.sample(finals[i].grid, cfg.init.t0 + cfg.prob.T));
            } else {
                metric = detail::l2_diff(detail::restrict_field(finals[i + 1], finals[i].grid),
                                         finals[i]);
            }
            rows.push_back({i, static_cast<double>(cfg.prob.n * (1 << i)), metric});
        }
    } else if (axis == "N") {
        FlowTrajectory traj = evolve(init.u0, cfg.prob, prox_config(cfg.solver), true);
        for (int i = 0; i < levels; ++i) {
            const long Ni = std::max<long>(
                1, static_cast<long>(cfg.particles.N / std::pow(10.0, levels - 1 - i)));
            std::vector<double> d;
            for (int s = 0; s < 3; ++s)
                d.push_back(detail::terminal_marginal_distance(
                    cfg, traj, Ni, cfg.particles.seed + 101 * s, nthreads));
            std::sort(d.begin(), d.end());
            rows.push_back({i, static_cast<double>(Ni), d[1]});  // median of 3 seeds
        }
    } else if (axis == "delta" || axis == "epsilon") {
        const ScalarField u_ref = detail::final_field(cfg, init.u0);
        for (int i = 0; i < levels; ++i) {
            RunConfig v = cfg;
            const double value = std::pow(10.0, -(i + 1));
            if (axis == "delta")
                v.prob.delta = value;
            else
                v.prob.epsilon = value;
            rows.push_back({i, value, detail::l2_diff(detail::final_field(v, init.u0), u_ref)});
        }
    } else {
        throw ConfigError("axis", "must be one of n, dt, N, delta, epsilon");
    }
    return rows;
}

inline void cmd_sweep(const std::filesystem::path& config_path, const std::string& axis,
                      int levels, const std::filesystem::path& out_dir, int threads = 0) {
    RunConfig cfg = config_from_json(io::read_json(config_path));
    std::vector<SweepRow> rows = run_sweep(cfg, axis, levels, threads);
    std::ofstream out = io::open_out(out_dir / "sweep.csv");
    out << "axis,level,value,metric\n";
    for (const auto& r : rows)
        out << axis << ',' << r.level << ',' << io::fmt(r.value) << ',' << io::fmt(r.metric)
            << '\n';
}

}  // namespace plap

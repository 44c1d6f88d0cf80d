// Command-line front end: solve the p-Laplace gradient flow, extract the
// drift/diffusion coefficients, run the particle ensemble, and verify the
// quantitative estimates on the finished run.
//
// Exit codes: 0 success, 1 configuration error, 2 convergence failure or a
// particle escaping the box; verify exits 2 + (number of failed checks) when
// any check fails.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "plap/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"p-Laplace gradient flow laboratory: proximal PDE solver, "
                 "Fokker-Planck coefficients, particle ensembles, estimate checks"};
    app.require_subcommand(1);

    std::string config_path, run_dir, out_dir, constants_path, particles_subdir, axis;
    long N = 100000;
    uint64_t seed = 42;
    int substeps = 1, threads = 0, levels = 3;
    long snapshot_every = 0;

    bool export_coefficients = false;
    auto* solve = app.add_subcommand("solve", "evolve the PDE and write a run directory");
    solve->add_option("-c,--config", config_path, "config json")->required();
    solve->add_option("-o,--out", out_dir, "output run directory")->required();
    solve->add_option("--constants", constants_path, "oracle constants json (skips calibration)");
    solve->add_flag("--coefficients", export_coefficients,
                    "also export drift/diffusion snapshots as csv");

    auto* simulate = app.add_subcommand("simulate", "propagate a particle ensemble along a run");
    simulate->add_option("-r,--run", run_dir, "run directory")->required();
    simulate->add_option("-N,--particles", N, "particle count");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--substeps", substeps, "EM substeps per PDE step");
    simulate->add_option("--threads", threads, "worker threads (0 = auto)");
    simulate->add_option("--snapshot-every", snapshot_every, "ensemble export stride (0 = auto)");

    auto* verify = app.add_subcommand("verify", "check the estimates on a finished run");
    verify->add_option("-r,--run", run_dir, "run directory")->required();

    auto* compare = app.add_subcommand("compare", "marginal-law distances per snapshot");
    compare->add_option("-r,--run", run_dir, "run directory")->required();
    compare->add_option("--particles", particles_subdir, "particle snapshot subdirectory");

    auto* sweep = app.add_subcommand("sweep", "convergence study along one axis");
    sweep->add_option("-c,--config", config_path, "config json")->required();
    sweep->add_option("--axis", axis, "one of n, dt, N, delta, epsilon")->required();
    sweep->add_option("--levels", levels, "number of levels");
    sweep->add_option("-o,--out", out_dir, "output directory (default sweep_out)");
    sweep->add_option("--threads", threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            plap::cmd_solve(config_path, out_dir,
                            constants_path.empty()
                                ? std::nullopt
                                : std::optional<std::filesystem::path>(constants_path),
                            export_coefficients);
        } else if (simulate->parsed()) {
            plap::cmd_simulate(run_dir, N, seed, substeps, threads, snapshot_every);
        } else if (verify->parsed()) {
            const int failed = plap::cmd_verify(run_dir);
            return failed == 0 ? 0 : 2 + failed;
        } else if (compare->parsed()) {
            plap::cmd_compare(run_dir, particles_subdir);
        } else if (sweep->parsed()) {
            plap::cmd_sweep(config_path, axis, levels,
                            out_dir.empty() ? "sweep_out" : out_dir, threads);
        }
    } catch (const plap::NonConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const plap::EscapedDomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

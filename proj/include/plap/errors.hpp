#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration rejected; `field` holds the offending key path.
struct ConfigError : Error {
    std::string field;
    ConfigError(std::string field_, const std::string& what_)
        : Error("config error at '" + field_ + "': " + what_), field(std::move(field_)) {}
};

/// Inner solver hit max_iter without reaching the residual tolerance.
struct NonConvergenceError : Error {
    double residual;
    int iterations;
    long step_index;  // -1 when not raised from a time loop
    NonConvergenceError(double res, int iters, long step = -1)
        : Error("prox step did not converge: residual " + std::to_string(res) + " after " +
                std::to_string(iters) + " iterations" +
                (step >= 0 ? " (time step " + std::to_string(step) + ")" : "")),
          residual(res), iterations(iters), step_index(step) {}
};

/// A particle left the computational box; the box is too small for the run.
struct EscapedDomainError : Error {
    long particle;
    long step;
    EscapedDomainError(long particle_, long step_)
        : Error("particle " + std::to_string(particle_) + " escaped the domain at step " +
                std::to_string(step_)),
          particle(particle_), step(step_) {}
};

struct ZeroMassError : Error {
    ZeroMassError() : Error("cannot sample from a field with nonpositive mass") {}
};

struct DegenerateSampleError : Error {
    DegenerateSampleError() : Error("automatic bandwidth undefined: sample has zero spread") {}
};

struct NotOneDimensionalError : Error {
    NotOneDimensionalError() : Error("W1 distance is only defined for d = 1; use the L1 histogram distance") {}
};

struct MissingCalibrationError : Error {
    MissingCalibrationError() : Error("support-growth constant not calibrated; run with a calibrated constants file") {}
};

struct MissingRunError : Error {
    explicit MissingRunError(const std::string& path) : Error("run directory not found or incomplete: " + path) {}
};

}  // namespace plap

#pragma once

#include <stdexcept>
#include <string>

namespace hsim {

/// Total network admittance magnitude below threshold; the bus voltage
/// equation has no solution.
struct SingularNetwork : std::runtime_error {
    explicit SingularNetwork(const std::string& what)
        : std::runtime_error(what) {}
};

/// The power-factor-angle linearization denominator vanished (zero-load
/// degenerate case).
struct DegenerateLinearization : std::runtime_error {
    explicit DegenerateLinearization(const std::string& what)
        : std::runtime_error(what) {}
};

/// Integrator detected |ddelta/dt| beyond the runaway threshold.
struct NumericalBlowup : std::runtime_error {
    NumericalBlowup(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_index(step) {}
    std::size_t step_index;
};

/// Linearization requested at a state that is not an equilibrium.
struct NotAnEquilibrium : std::runtime_error {
    explicit NotAnEquilibrium(const std::string& what)
        : std::runtime_error(what) {}
};

/// Scenario file could not be parsed.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario parsed but violates a model invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Analysis requested on a topology with per-string admittance differences.
struct HeterogeneousLines : std::runtime_error {
    explicit HeterogeneousLines(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace hsim

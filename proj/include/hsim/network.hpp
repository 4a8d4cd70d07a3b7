#pragma once

#include <cstddef>
#include <vector>

#include "hsim/phasor.hpp"

namespace hsim {

/// N parallel strings of M series modules feeding one AC bus through
/// per-string line admittances Y_i and a load admittance Y_L.
struct GridTopology {
    std::size_t n_strings = 1;           // N
    std::size_t modules_per_string = 1;  // M
    std::vector<Admittance> string_admittance;  // size N
    Admittance load_admittance;

    /// Throws ValidationError / SingularNetwork on invariant violations.
    void validate() const;

    [[nodiscard]] bool equal_lines(double tol = 0.0) const;

    bool operator==(const GridTopology&) const = default;
};

/// Module phase angles and voltage amplitudes, N x M row-major.
struct SystemState {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<double> delta;      // radians
    std::vector<double> amplitude;  // per-unit volts

    SystemState() = default;
    SystemState(std::size_t n_, std::size_t m_, double v = 1.0)
        : n(n_), m(m_), delta(n_ * m_, 0.0), amplitude(n_ * m_, v) {}

    [[nodiscard]] double& d(std::size_t i, std::size_t j) { return delta[i * m + j]; }
    [[nodiscard]] double d(std::size_t i, std::size_t j) const { return delta[i * m + j]; }
    [[nodiscard]] double& v(std::size_t i, std::size_t j) { return amplitude[i * m + j]; }
    [[nodiscard]] double v(std::size_t i, std::size_t j) const { return amplitude[i * m + j]; }
    [[nodiscard]] std::size_t size() const { return n * m; }
};

/// Per-string voltage-distribution factors Y'_a = Y_a / (sum_c Y_c + Y_L).
struct DistributionFactors {
    std::vector<Admittance> y_prime;
};

/// Active/reactive power and power factor angle of one module.
struct PowerReading {
    double p = 0.0;    // per-unit watts
    double q = 0.0;    // per-unit vars
    double phi = 0.0;  // radians; 0 when degenerate
    bool degenerate = false;  // apparent power below s_epsilon
};

/// Apparent-power threshold below which the power factor angle is undefined.
inline constexpr double s_epsilon = 1e-9;

/// Threshold on |sum Y_c + Y_L| below which the network is singular.
inline constexpr double singular_epsilon = 1e-12;

/// Build a PowerReading from P and Q, handling the degenerate no-load case.
PowerReading make_power_reading(double p, double q);

/// Equal-line reduction: every string shares y_line, and the distribution
/// factor collapses to y_eq = y_line / (N*y_line + Y_L).
struct EqualLineModel {
    Admittance y_line;
    Admittance y_eq;
};

/// Derive the equal-line model from a topology (requires equal strings).
EqualLineModel make_equal_line_model(const GridTopology& topology);

DistributionFactors distribution_factors(const GridTopology& topology);

/// Bus voltage V_P e^{j theta_P} as the distribution-weighted double sum of
/// module voltages.
Phasor bus_voltage(const GridTopology& topology, const SystemState& state);

/// Per-module power by the general trigonometric expansion over arbitrary
/// per-string admittances.
PowerReading module_power(const GridTopology& topology, const SystemState& state,
                          std::size_t i, std::size_t j);

/// All N*M module powers in one pass (row-major); the distribution factors
/// are computed once instead of per module.
std::vector<PowerReading> all_module_powers(const GridTopology& topology,
                                            const SystemState& state);

/// Per-module power under the equal-line reduction: literal double
/// trigonometric sums in the phase angles.
PowerReading equal_line_power(const EqualLineModel& model, double v_ref,
                              const SystemState& state, std::size_t i,
                              std::size_t j);

/// Full circuit solution by direct nodal analysis; shares no code path with
/// bus_voltage / module_power beyond the phasor primitives.
struct OracleSolution {
    Phasor bus;
    std::vector<PowerReading> module_powers;  // row-major N x M
    std::vector<Complex> string_currents;     // size N
    Complex load_power;                       // complex power into the load
    std::vector<Complex> line_losses;         // complex power per line branch
};

OracleSolution oracle_solve(const GridTopology& topology,
                            const SystemState& state);

}  // namespace hsim

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsim/droop.hpp"
#include "hsim/network.hpp"

namespace hsim {

enum class Frame { rotating_at_omega_star, absolute };

struct SimConfig {
    double dt = 1e-4;       // s, fixed RK4 step
    double t_end = 2.0;     // s
    double delta0 = 0.0;    // rad, initial-angle spread (uniform in [-d0, d0])
    std::uint64_t seed = 0;
    double sync_tol = 1e-6; // rad
    Frame frame = Frame::rotating_at_omega_star;
    std::size_t decimation = 1;  // snapshot every k-th step

    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SystemState> states;
    std::vector<std::vector<PowerReading>> powers;   // N x M, row-major
    std::vector<std::vector<double>> frequencies;    // rad/s, row-major
    std::optional<double> sync_time;
    bool synchronized = false;
};

/// Closed-loop phase velocities: entry (i,j) is the droop frequency from the
/// module's power reading; in the rotating frame omega_star is subtracted.
std::vector<double> rhs(const GridTopology& topology, const DroopParams& params,
                        const SystemState& state,
                        Frame frame = Frame::rotating_at_omega_star);

/// Maximum pairwise angle-wrapped difference of the delta entries.
double synchronization_metric(const SystemState& state);

/// Draw initial angles uniformly from [-delta0, delta0] with a seeded
/// generator; amplitudes fixed at v_ref.
SystemState random_initial_state(const GridTopology& topology,
                                 const DroopParams& params,
                                 const SimConfig& config);

/// Fixed-step classical RK4 on rhs. Throws NumericalBlowup if any phase
/// velocity exceeds 1e6 rad/s.
Trajectory integrate(const GridTopology& topology, const DroopParams& params,
                     const SimConfig& config, const SystemState& initial);

}  // namespace hsim

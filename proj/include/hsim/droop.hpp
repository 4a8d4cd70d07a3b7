#pragma once

#include <numbers>

#include "hsim/network.hpp"

namespace hsim {

/// Droop law parameters: omega = omega_star - m*P - k_phi*phi, V = v_ref.
struct DroopParams {
    double omega_star = 2.0 * std::numbers::pi * 50.0;  // rad/s
    double m = 0.01;    // rad/s per per-unit watt
    double k_phi = 0.1; // 1/s
    double v_ref = 1.0; // per-unit volts

    bool operator==(const DroopParams&) const = default;
};

inline double droop_frequency(const DroopParams& params,
                              const PowerReading& reading) {
    return params.omega_star - params.m * reading.p -
           params.k_phi * reading.phi;
}

inline double voltage_reference(const DroopParams& params) {
    return params.v_ref;
}

}  // namespace hsim

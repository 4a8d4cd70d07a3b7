#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hsim/dynamics.hpp"
#include "hsim/droop.hpp"
#include "hsim/network.hpp"
#include "hsim/stability.hpp"

namespace hsim {

/// Largest accepted module count, N*M.
inline constexpr std::size_t max_modules = 10'000;

struct Scenario {
    GridTopology topology;
    DroopParams droop;
    SimConfig sim;

    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Parse and validate a scenario. Missing sections take the documented
/// defaults. Throws ParseError on malformed JSON, ValidationError on
/// invariant violations.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& scenario);

/// Trajectory CSV: t, delta_i_j (row-major), p_i_j, q_i_j, phi_i_j,
/// omega_i_j.
std::string trajectory_csv_header(std::size_t n, std::size_t m);
std::string trajectory_to_csv(const Trajectory& traj, std::size_t n,
                              std::size_t m);

/// Post-run summary: synchronized flag, sync time, final sync metric, and
/// the spread of m*P + k_phi*phi across modules at the final snapshot.
nlohmann::json trajectory_summary(const Trajectory& traj,
                                  const DroopParams& droop);

nlohmann::json stability_report_to_json(const StabilityReport& report);

}  // namespace hsim

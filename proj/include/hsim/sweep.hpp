#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hsim/scenario.hpp"

namespace hsim {

enum class SweepMode { analytic_only, with_simulation };

struct SweepAxis {
    std::string parameter;  // m, k_phi, N, M, line_magnitude, line_angle,
                            // load_magnitude, load_angle
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 2;  // >= 2
};

struct SweepSpec {
    SweepAxis axis1;
    SweepAxis axis2;
    Scenario fixed;
    SweepMode mode = SweepMode::analytic_only;

    void validate() const;
};

struct SweepRow {
    double value1 = 0.0;
    double value2 = 0.0;
    double lambda_p = 0.0;
    double lambda_c = 0.0;
    bool stable = false;
    std::optional<bool> synchronized;  // with_simulation only
    std::optional<double> sync_time;
    std::string error;  // empty on success
};

SweepSpec sweep_spec_from_json(const nlohmann::json& j);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Evaluate the grid in row-major axis1-then-axis2 order. Per-point errors
/// land in the row's error column; the sweep itself never aborts. Rows are
/// returned in deterministic order regardless of worker count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t jobs = 0);

std::string sweep_csv_header(SweepMode mode);
std::string sweep_to_csv(const SweepSpec& spec,
                         const std::vector<SweepRow>& rows);

}  // namespace hsim

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hsim/errors.hpp"
#include "hsim/scenario.hpp"
#include "hsim/sweep.hpp"

namespace {

constexpr const char* version = "1.0.0";

// Exit codes: 0 success, 2 parse error, 3 validation error, 4 numerical
// failure, 1 anything else.
constexpr int exit_parse = 2;
constexpr int exit_validation = 3;
constexpr int exit_numerical = 4;

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    hsim::Scenario scenario = hsim::load_scenario(scenario_path);
    if (seed_override) scenario.sim.seed = *seed_override;

    hsim::SystemState initial = hsim::random_initial_state(
        scenario.topology, scenario.droop, scenario.sim);
    hsim::Trajectory traj = hsim::integrate(scenario.topology, scenario.droop,
                                            scenario.sim, initial);

    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "trajectory.csv",
               hsim::trajectory_to_csv(traj, scenario.topology.n_strings,
                                       scenario.topology.modules_per_string));
    nlohmann::json summary = hsim::trajectory_summary(traj, scenario.droop);
    write_file(std::filesystem::path(out_dir) / "summary.json",
               summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_analyze(const std::string& scenario_path,
                const std::string& json_out) {
    hsim::Scenario scenario = hsim::load_scenario(scenario_path);
    hsim::StabilityReport report =
        hsim::analyze(scenario.topology, scenario.droop);

    // Self-check: the two spectra must agree or the command fails.
    if (report.max_spectrum_discrepancy > 1e-9) {
        std::cerr << "error: closed-form and numerical spectra disagree ("
                  << report.max_spectrum_discrepancy << ")\n";
        return exit_numerical;
    }
    nlohmann::json j = hsim::stability_report_to_json(report);
    if (!json_out.empty()) write_file(json_out, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_sweep_cmd(const std::string& spec_path, const std::string& out_path,
                  std::size_t jobs) {
    hsim::SweepSpec spec = hsim::load_sweep_spec(spec_path);
    std::vector<hsim::SweepRow> rows = hsim::run_sweep(spec, jobs);
    std::string csv = hsim::sweep_to_csv(spec, rows);
    if (out_path.empty() || out_path == "-")
        std::cout << csv;
    else
        write_file(out_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Phasor-domain simulator and small-signal stability analyzer for "
        "droop-controlled series-parallel inverter networks"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    auto* simulate = app.add_subcommand(
        "simulate", "Integrate the closed-loop phase dynamics and write "
                    "trajectory.csv + summary.json");
    simulate->add_option("scenario", scenario_path, "scenario JSON file")
        ->required();
    simulate->add_option("--out-dir", out_dir, "output directory");
    simulate->add_option("--seed", seed_override,
                         "override the scenario RNG seed");

    std::string analyze_path;
    std::string json_out;
    auto* analyze = app.add_subcommand(
        "analyze", "Small-signal stability report (eta coefficients, "
                   "spectra, verdict)");
    analyze->add_option("scenario", analyze_path, "scenario JSON file")
        ->required();
    analyze->add_option("--json", json_out, "also write the report here");

    std::string sweep_path;
    std::string sweep_out;
    std::size_t jobs = 0;
    auto* sweep = app.add_subcommand(
        "sweep", "Map the stability region over a 2-axis parameter grid");
    sweep->add_option("spec", sweep_path, "sweep spec JSON file")->required();
    sweep->add_option("--out", sweep_out, "grid CSV path (default stdout)");
    sweep->add_option("--jobs", jobs,
                      "worker threads (default: hardware parallelism)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return run_simulate(scenario_path, out_dir, seed_override);
        if (analyze->parsed()) return run_analyze(analyze_path, json_out);
        if (sweep->parsed()) return run_sweep_cmd(sweep_path, sweep_out, jobs);
    } catch (const hsim::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    } catch (const hsim::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const hsim::HeterogeneousLines& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const hsim::NumericalBlowup& e) {
        std::cerr << "numerical failure at step " << e.step_index << ": "
                  << e.what() << "\n";
        return exit_numerical;
    } catch (const hsim::SingularNetwork& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const hsim::DegenerateLinearization& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

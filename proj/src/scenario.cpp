#include "hsim/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsim/errors.hpp"

namespace hsim {

using nlohmann::json;

void Scenario::validate() const {
    topology.validate();
    sim.validate();
    if (droop.omega_star <= 0.0)
        throw ValidationError("omega_star must be > 0");
    if (droop.v_ref <= 0.0) throw ValidationError("v_ref must be > 0");
    if (!std::isfinite(droop.m) || !std::isfinite(droop.k_phi))
        throw ValidationError("droop gains must be finite");
    if (topology.n_strings * topology.modules_per_string > max_modules)
        throw ValidationError("N*M exceeds the 10000-module limit");
}

namespace {

Admittance admittance_from_json(const json& j, const std::string& what) {
    if (!j.is_object())
        throw ParseError(what + ": expected an object");
    if (j.contains("real") || j.contains("imag")) {
        Complex c{j.value("real", 0.0), j.value("imag", 0.0)};
        return Admittance::from_complex(c);
    }
    if (!j.contains("magnitude"))
        throw ParseError(what + ": need magnitude/angle or real/imag");
    return {j.at("magnitude").get<double>(), j.value("angle", 0.0)};
}

json admittance_to_json(const Admittance& y) {
    return json{{"magnitude", y.magnitude}, {"angle", y.angle}};
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    Scenario s;
    if (!j.is_object()) throw ParseError("scenario root must be an object");

    const json& topo = j.value("topology", json::object());
    s.topology.n_strings = topo.value("n_strings", std::size_t{1});
    s.topology.modules_per_string =
        topo.value("modules_per_string", std::size_t{1});
    if (topo.contains("n_strings") &&
        topo.at("n_strings").get<long long>() < 1)
        throw ValidationError("n_strings must be >= 1");
    if (topo.contains("modules_per_string") &&
        topo.at("modules_per_string").get<long long>() < 1)
        throw ValidationError("modules_per_string must be >= 1");

    if (topo.contains("lines")) {
        for (const auto& entry : topo.at("lines"))
            s.topology.string_admittance.push_back(
                admittance_from_json(entry, "topology.lines[]"));
    } else {
        Admittance line{1.0, 0.0};
        if (topo.contains("line"))
            line = admittance_from_json(topo.at("line"), "topology.line");
        s.topology.string_admittance.assign(s.topology.n_strings, line);
    }
    if (topo.contains("load"))
        s.topology.load_admittance =
            admittance_from_json(topo.at("load"), "topology.load");
    else
        s.topology.load_admittance = {1.0, 0.0};

    const json& droop = j.value("droop", json::object());
    s.droop.omega_star = droop.value("omega_star", s.droop.omega_star);
    s.droop.m = droop.value("m", s.droop.m);
    s.droop.k_phi = droop.value("k_phi", s.droop.k_phi);
    s.droop.v_ref = droop.value("v_ref", s.droop.v_ref);

    const json& sim = j.value("sim", json::object());
    s.sim.dt = sim.value("dt", s.sim.dt);
    s.sim.t_end = sim.value("t_end", s.sim.t_end);
    s.sim.delta0 = sim.value("delta0", s.sim.delta0);
    s.sim.seed = sim.value("seed", s.sim.seed);
    s.sim.sync_tol = sim.value("sync_tol", s.sim.sync_tol);
    s.sim.decimation = sim.value("decimation", s.sim.decimation);
    std::string frame = sim.value("frame", std::string{"rotating"});
    if (frame == "rotating" || frame == "rotating_at_omega_star")
        s.sim.frame = Frame::rotating_at_omega_star;
    else if (frame == "absolute")
        s.sim.frame = Frame::absolute;
    else
        throw ParseError("sim.frame must be \"rotating\" or \"absolute\"");

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string{"scenario JSON parse error: "} + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string{"scenario field error: "} + e.what());
    }
}

json scenario_to_json(const Scenario& s) {
    json topo{{"n_strings", s.topology.n_strings},
              {"modules_per_string", s.topology.modules_per_string},
              {"load", admittance_to_json(s.topology.load_admittance)}};
    if (s.topology.equal_lines())
        topo["line"] = admittance_to_json(s.topology.string_admittance.at(0));
    else {
        json lines = json::array();
        for (const auto& y : s.topology.string_admittance)
            lines.push_back(admittance_to_json(y));
        topo["lines"] = lines;
    }
    return json{
        {"topology", topo},
        {"droop",
         {{"omega_star", s.droop.omega_star},
          {"m", s.droop.m},
          {"k_phi", s.droop.k_phi},
          {"v_ref", s.droop.v_ref}}},
        {"sim",
         {{"dt", s.sim.dt},
          {"t_end", s.sim.t_end},
          {"delta0", s.sim.delta0},
          {"seed", s.sim.seed},
          {"sync_tol", s.sim.sync_tol},
          {"decimation", s.sim.decimation},
          {"frame", s.sim.frame == Frame::absolute ? "absolute" : "rotating"}}}};
}

namespace {

// Fixed-width scientific formatting keeps trajectory CSVs byte-stable
// across runs with identical seeds.
void append_value(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string trajectory_csv_header(std::size_t n, std::size_t m) {
    std::string header = "t";
    auto block = [&](const char* prefix) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                header += "," + std::string{prefix} + "_" +
                          std::to_string(i + 1) + "_" + std::to_string(j + 1);
    };
    block("delta");
    block("p");
    block("q");
    block("phi");
    block("omega");
    return header;
}

std::string trajectory_to_csv(const Trajectory& traj, std::size_t n,
                              std::size_t m) {
    std::string out = trajectory_csv_header(n, m);
    out += '\n';
    for (std::size_t row = 0; row < traj.times.size(); ++row) {
        append_value(out, traj.times[row]);
        for (double d : traj.states[row].delta) {
            out += ',';
            append_value(out, d);
        }
        for (const auto& p : traj.powers[row]) {
            out += ',';
            append_value(out, p.p);
        }
        for (const auto& p : traj.powers[row]) {
            out += ',';
            append_value(out, p.q);
        }
        for (const auto& p : traj.powers[row]) {
            out += ',';
            append_value(out, p.phi);
        }
        for (double w : traj.frequencies[row]) {
            out += ',';
            append_value(out, w);
        }
        out += '\n';
    }
    return out;
}

json trajectory_summary(const Trajectory& traj, const DroopParams& droop) {
    json summary;
    summary["synchronized"] = traj.synchronized;
    if (traj.sync_time)
        summary["sync_time"] = *traj.sync_time;
    else
        summary["sync_time"] = nullptr;

    const auto& final_state = traj.states.back();
    summary["final_sync_metric"] = synchronization_metric(final_state);

    // Spread of the steady-state quantity m*P + k_phi*phi across modules.
    const auto& powers = traj.powers.back();
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < powers.size(); ++k) {
        double v = droop.m * powers[k].p + droop.k_phi * powers[k].phi;
        if (k == 0) lo = hi = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    summary["steady_state_droop_spread"] = hi - lo;
    summary["steps"] = traj.times.size();
    summary["t_end"] = traj.times.back();
    return summary;
}

json stability_report_to_json(const StabilityReport& report) {
    return json{
        {"eta",
         {{"eta_p1", report.eta.eta_p1},
          {"eta_p2", report.eta.eta_p2},
          {"eta_phi1", report.eta.eta_phi1},
          {"eta_phi2", report.eta.eta_phi2},
          {"eta_1", report.eta.eta_1},
          {"eta_2", report.eta.eta_2}}},
        {"lambda_p", report.lambda_p},
        {"lambda_c", report.lambda_c},
        {"stable", report.stable},
        {"closed_form_spectrum", report.closed_form_spectrum},
        {"numerical_spectrum", report.numerical_spectrum},
        {"max_spectrum_discrepancy", report.max_spectrum_discrepancy}};
}

}  // namespace hsim

#include "hsim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hsim/errors.hpp"

namespace hsim {

using nlohmann::json;

namespace {

const std::vector<std::string> known_parameters = {
    "m",      "k_phi",          "N",          "M",
    "line_magnitude", "line_angle", "load_magnitude", "load_angle"};

void apply_parameter(Scenario& s, const std::string& name, double value) {
    if (name == "m") {
        s.droop.m = value;
    } else if (name == "k_phi") {
        s.droop.k_phi = value;
    } else if (name == "N") {
        auto n = static_cast<std::size_t>(std::llround(value));
        if (n < 1) throw ValidationError("swept N must be >= 1");
        s.topology.n_strings = n;
        s.topology.string_admittance.assign(n,
                                            s.topology.string_admittance.at(0));
    } else if (name == "M") {
        auto m = static_cast<std::size_t>(std::llround(value));
        if (m < 1) throw ValidationError("swept M must be >= 1");
        s.topology.modules_per_string = m;
    } else if (name == "line_magnitude") {
        for (auto& y : s.topology.string_admittance) y.magnitude = value;
    } else if (name == "line_angle") {
        for (auto& y : s.topology.string_admittance) y.angle = value;
    } else if (name == "load_magnitude") {
        s.topology.load_admittance.magnitude = value;
    } else if (name == "load_angle") {
        s.topology.load_admittance.angle = value;
    } else {
        throw ValidationError("unknown sweep parameter: " + name);
    }
}

double axis_value(const SweepAxis& axis, std::size_t k) {
    return axis.min + (axis.max - axis.min) * static_cast<double>(k) /
                          static_cast<double>(axis.steps - 1);
}

SweepAxis axis_from_json(const json& j, const char* which) {
    if (!j.is_object())
        throw ParseError(std::string{which} + ": expected an object");
    SweepAxis axis;
    axis.parameter = j.at("parameter").get<std::string>();
    axis.min = j.at("min").get<double>();
    axis.max = j.at("max").get<double>();
    axis.steps = j.at("steps").get<std::size_t>();
    return axis;
}

void format_value(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void SweepSpec::validate() const {
    for (const SweepAxis* axis : {&axis1, &axis2}) {
        if (axis->steps < 2)
            throw ValidationError("sweep axis needs at least 2 steps");
        bool known = false;
        for (const auto& p : known_parameters)
            if (p == axis->parameter) known = true;
        if (!known)
            throw ValidationError("unknown sweep parameter: " + axis->parameter);
    }
    fixed.validate();
}

SweepSpec sweep_spec_from_json(const json& j) {
    SweepSpec spec;
    spec.axis1 = axis_from_json(j.at("axis1"), "axis1");
    spec.axis2 = axis_from_json(j.at("axis2"), "axis2");
    spec.fixed = scenario_from_json(j.value("fixed", json::object()));
    std::string mode = j.value("mode", std::string{"analytic_only"});
    if (mode == "analytic_only")
        spec.mode = SweepMode::analytic_only;
    else if (mode == "with_simulation")
        spec.mode = SweepMode::with_simulation;
    else
        throw ParseError("mode must be analytic_only or with_simulation");
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sweep file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string{"sweep JSON parse error: "} + e.what());
    }
    try {
        return sweep_spec_from_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string{"sweep field error: "} + e.what());
    }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t jobs) {
    spec.validate();
    const std::size_t total = spec.axis1.steps * spec.axis2.steps;
    std::vector<SweepRow> rows(total);

    if (jobs == 0) {
        jobs = std::thread::hardware_concurrency();
        if (jobs == 0) jobs = 1;
    }
    jobs = std::min(jobs, total);

    auto evaluate = [&](std::size_t index) {
        SweepRow& row = rows[index];
        std::size_t k1 = index / spec.axis2.steps;
        std::size_t k2 = index % spec.axis2.steps;
        row.value1 = axis_value(spec.axis1, k1);
        row.value2 = axis_value(spec.axis2, k2);
        try {
            Scenario point = spec.fixed;
            apply_parameter(point, spec.axis1.parameter, row.value1);
            apply_parameter(point, spec.axis2.parameter, row.value2);
            point.validate();

            StabilityReport report = analyze(point.topology, point.droop);
            row.lambda_p = report.lambda_p;
            row.lambda_c = report.lambda_c;
            row.stable = report.stable;

            if (spec.mode == SweepMode::with_simulation) {
                SystemState initial = random_initial_state(
                    point.topology, point.droop, point.sim);
                Trajectory traj = integrate(point.topology, point.droop,
                                            point.sim, initial);
                row.synchronized = traj.synchronized;
                row.sync_time = traj.sync_time;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    // Deterministic row order: rows are indexed by grid position, so
    // completion order does not matter.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t index = next.fetch_add(1);
            if (index >= total) return;
            evaluate(index);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string sweep_csv_header(SweepMode mode) {
    std::string header = "axis1,axis2,lambda_p,lambda_c,stable";
    if (mode == SweepMode::with_simulation) header += ",synchronized,sync_time";
    header += ",error";
    return header;
}

std::string sweep_to_csv(const SweepSpec& spec,
                         const std::vector<SweepRow>& rows) {
    std::string out = sweep_csv_header(spec.mode);
    out += '\n';
    for (const auto& row : rows) {
        format_value(out, row.value1);
        out += ',';
        format_value(out, row.value2);
        out += ',';
        format_value(out, row.lambda_p);
        out += ',';
        format_value(out, row.lambda_c);
        out += ',';
        out += row.stable ? "1" : "0";
        if (spec.mode == SweepMode::with_simulation) {
            out += ',';
            if (row.synchronized) out += *row.synchronized ? "1" : "0";
            out += ',';
            if (row.sync_time) format_value(out, *row.sync_time);
        }
        out += ',';
        // Commas inside error messages would break the column layout.
        std::string err = row.error;
        for (auto& c : err)
            if (c == ',' || c == '\n') c = ';';
        out += err;
        out += '\n';
    }
    return out;
}

}  // namespace hsim

#include <doctest.h>

#include <nlohmann/json.hpp>
#include <numbers>

#include "hsim/errors.hpp"
#include "hsim/scenario.hpp"

using namespace hsim;
using nlohmann::json;
using std::numbers::pi;

TEST_CASE("minimal scenario gets the documented defaults") {
    json j = json::parse(R"({
      "topology": {
        "n_strings": 1, "modules_per_string": 1,
        "line": {"magnitude": 1.0, "angle": 0.0},
        "load": {"magnitude": 1.0, "angle": 0.0}
      }
    })");
    Scenario s = scenario_from_json(j);
    CHECK(s.droop.omega_star == doctest::Approx(2.0 * pi * 50.0));
    CHECK(s.droop.v_ref == 1.0);
    CHECK(s.droop.m == 0.01);
    CHECK(s.droop.k_phi == 0.1);
    CHECK(s.sim.dt == 1e-4);
    CHECK(s.sim.t_end == 2.0);
    CHECK(s.sim.sync_tol == 1e-6);
    CHECK(s.sim.frame == Frame::rotating_at_omega_star);
    CHECK(s.topology.string_admittance.size() == 1);
}

TEST_CASE("invalid scenarios are rejected with named invariants") {
    json j = json::parse(R"({"topology": {"n_strings": 0}})");
    CHECK_THROWS_WITH_AS(scenario_from_json(j), "n_strings must be >= 1",
                         ValidationError);

    json singular = json::parse(R"({
      "topology": {
        "n_strings": 1, "modules_per_string": 1,
        "line": {"magnitude": 0.0, "angle": 0.0},
        "load": {"magnitude": 0.0, "angle": 0.0}
      }
    })");
    CHECK_THROWS_AS(scenario_from_json(singular), ValidationError);

    json bad_frame = json::parse(R"({"sim": {"frame": "sidereal"}})");
    CHECK_THROWS_AS(scenario_from_json(bad_frame), ParseError);

    json huge = json::parse(R"({
      "topology": {"n_strings": 200, "modules_per_string": 200}
    })");
    CHECK_THROWS_AS(scenario_from_json(huge), ValidationError);
}

TEST_CASE("rectangular admittance keys are accepted") {
    json j = json::parse(R"({
      "topology": {
        "n_strings": 1, "modules_per_string": 1,
        "line": {"real": 0.0, "imag": -1.0},
        "load": {"magnitude": 1.0, "angle": 0.0}
      }
    })");
    Scenario s = scenario_from_json(j);
    CHECK(s.topology.string_admittance[0].magnitude == doctest::Approx(1.0));
    CHECK(s.topology.string_admittance[0].angle == doctest::Approx(-pi / 2));
}

TEST_CASE("scenario serialization round-trips") {
    json j = json::parse(R"({
      "topology": {
        "n_strings": 3, "modules_per_string": 2,
        "line": {"magnitude": 1.4, "angle": -1.1},
        "load": {"magnitude": 0.6, "angle": 0.2}
      },
      "droop": {"omega_star": 314.0, "m": 0.5, "k_phi": 0.8, "v_ref": 0.97},
      "sim": {"dt": 5e-5, "t_end": 1.5, "delta0": 0.07, "seed": 99,
              "sync_tol": 1e-7, "frame": "absolute"}
    })");
    Scenario s = scenario_from_json(j);
    Scenario again = scenario_from_json(scenario_to_json(s));
    CHECK(s == again);
}

TEST_CASE("per-string admittance lists are honored") {
    json j = json::parse(R"({
      "topology": {
        "n_strings": 2, "modules_per_string": 1,
        "lines": [{"magnitude": 1.0, "angle": -0.2},
                  {"magnitude": 2.0, "angle": -0.4}],
        "load": {"magnitude": 1.0, "angle": 0.0}
      }
    })");
    Scenario s = scenario_from_json(j);
    CHECK_FALSE(s.topology.equal_lines());
    Scenario again = scenario_from_json(scenario_to_json(s));
    CHECK(s == again);
}

TEST_CASE("trajectory CSV header matches the documented schema") {
    CHECK(trajectory_csv_header(1, 1) ==
          "t,delta_1_1,p_1_1,q_1_1,phi_1_1,omega_1_1");
    CHECK(trajectory_csv_header(2, 2) ==
          "t,delta_1_1,delta_1_2,delta_2_1,delta_2_2,"
          "p_1_1,p_1_2,p_2_1,p_2_2,"
          "q_1_1,q_1_2,q_2_1,q_2_2,"
          "phi_1_1,phi_1_2,phi_2_1,phi_2_2,"
          "omega_1_1,omega_1_2,omega_2_1,omega_2_2");
}

TEST_CASE("trajectory CSV and summary carry the run results") {
    GridTopology t;
    t.n_strings = 2;
    t.modules_per_string = 2;
    t.string_admittance.assign(2, {1.0, -1.47});
    t.load_admittance = {0.3, 0.2};
    DroopParams droop;
    droop.m = 50.0;
    droop.k_phi = 50.0;
    SimConfig config;
    config.delta0 = 0.1;
    config.seed = 5;
    config.t_end = 1.0;
    config.decimation = 100;

    Trajectory traj =
        integrate(t, droop, config, random_initial_state(t, droop, config));
    std::string csv = trajectory_to_csv(traj, 2, 2);
    CHECK(csv.substr(0, csv.find('\n')) == trajectory_csv_header(2, 2));
    // Header plus one line per snapshot.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == traj.times.size() + 1);

    json summary = trajectory_summary(traj, droop);
    CHECK(summary.at("synchronized").get<bool>());
    CHECK(summary.at("final_sync_metric").get<double>() < config.sync_tol);
    CHECK(summary.at("steady_state_droop_spread").get<double>() < 1e-8);
}

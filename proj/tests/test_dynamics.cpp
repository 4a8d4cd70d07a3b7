#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hsim/dynamics.hpp"
#include "hsim/errors.hpp"
#include "hsim/stability.hpp"

using namespace hsim;
using std::numbers::pi;

namespace {

GridTopology reference_topology(std::size_t n = 2, std::size_t m = 2) {
    GridTopology t;
    t.n_strings = n;
    t.modules_per_string = m;
    t.string_admittance.assign(n, {1.0, -1.47});
    t.load_admittance = {0.3, 0.2};
    return t;
}

DroopParams stable_gains() {
    DroopParams p;
    p.m = 50.0;
    p.k_phi = 50.0;
    return p;
}

}  // namespace

TEST_CASE("rhs: equal angles and equal lines give a common drift") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    SystemState s(2, 2, params.v_ref);
    for (auto& d : s.delta) d = 0.3;
    auto v = rhs(t, params, s);
    for (double x : v) CHECK(x == doctest::Approx(v[0]).epsilon(1e-14));
}

TEST_CASE("rhs: no-load single string sits at the rated frequency") {
    GridTopology t;
    t.n_strings = 1;
    t.modules_per_string = 2;
    t.string_admittance.assign(1, {1.0, -0.5});
    t.load_admittance = {0.0, 0.0};
    DroopParams params;
    std::mt19937_64 rng(2);
    SystemState s(1, 2, params.v_ref);
    std::uniform_real_distribution<double> dist(-0.4, 0.4);
    for (auto& d : s.delta) d = dist(rng);

    for (double x : rhs(t, params, s, Frame::absolute))
        CHECK(x == doctest::Approx(params.omega_star));
    for (double x : rhs(t, params, s, Frame::rotating_at_omega_star))
        CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rhs entries match the oracle power path") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        SystemState s(2, 2, params.v_ref);
        for (auto& d : s.delta) d = dist(rng);
        auto v = rhs(t, params, s, Frame::absolute);
        OracleSolution sol = oracle_solve(t, s);
        for (std::size_t k = 0; k < v.size(); ++k) {
            double expect = droop_frequency(params, sol.module_powers[k]);
            CHECK(std::abs(v[k] - expect) < 1e-10);
        }
    }
}

TEST_CASE("synchronization metric") {
    SystemState s(1, 2, 1.0);
    CHECK(synchronization_metric(s) == 0.0);
    s.delta = {0.0, 0.1};
    CHECK(synchronization_metric(s) == doctest::Approx(0.1));
    s.delta = {0.0, 2.0 * pi};
    CHECK(synchronization_metric(s) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("equal-angle start is an equilibrium of the relative dynamics") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    SimConfig config;
    config.t_end = 0.1;
    SystemState initial(2, 2, params.v_ref);

    Trajectory traj = integrate(t, params, config, initial);
    CHECK(traj.synchronized);
    CHECK(*traj.sync_time == 0.0);
    for (const auto& s : traj.states)
        CHECK(synchronization_metric(s) < 1e-12);
}

TEST_CASE("stable gains synchronize from a 0.1 rad spread") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();

    // The predicate is computed, not assumed.
    EqualLineModel model = make_equal_line_model(t);
    EtaCoefficients eta =
        eta_coefficients(model, params.v_ref, params.m, params.k_phi, 2, 2);
    REQUIRE(stability_verdict(eta, params.m, params.k_phi, 2).stable);

    SimConfig config;
    config.delta0 = 0.1;
    config.seed = 42;
    SystemState initial = random_initial_state(t, params, config);
    Trajectory traj = integrate(t, params, config, initial);
    CHECK(traj.synchronized);
    CHECK(synchronization_metric(traj.states.back()) < config.sync_tol);
}

TEST_CASE("once synchronized the droop quantity is uniform") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    SimConfig config;
    config.delta0 = 0.1;
    config.seed = 4;
    Trajectory traj =
        integrate(t, params, config, random_initial_state(t, params, config));
    REQUIRE(traj.synchronized);
    const auto& powers = traj.powers.back();
    double ref = params.m * powers[0].p + params.k_phi * powers[0].phi;
    for (const auto& r : powers)
        CHECK(params.m * r.p + params.k_phi * r.phi ==
              doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("halving dt barely changes the final angles") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    SimConfig config;
    config.delta0 = 0.1;
    config.seed = 11;
    config.t_end = 0.5;
    config.decimation = 1000;
    SystemState initial = random_initial_state(t, params, config);

    Trajectory coarse = integrate(t, params, config, initial);
    SimConfig fine = config;
    fine.dt = config.dt / 2.0;
    Trajectory refined = integrate(t, params, fine, initial);

    for (std::size_t k = 0; k < initial.size(); ++k)
        CHECK(std::abs(coarse.states.back().delta[k] -
                       refined.states.back().delta[k]) < 1e-8);
}

TEST_CASE("absolute and rotating frames differ by the omega_star ramp") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    SimConfig config;
    config.delta0 = 0.05;
    config.seed = 9;
    config.t_end = 0.05;
    SystemState initial = random_initial_state(t, params, config);

    Trajectory rot = integrate(t, params, config, initial);
    SimConfig abs_cfg = config;
    abs_cfg.frame = Frame::absolute;
    Trajectory abs = integrate(t, params, abs_cfg, initial);

    for (std::size_t row = 0; row < rot.times.size(); ++row) {
        double ramp = params.omega_star * rot.times[row];
        for (std::size_t k = 0; k < initial.size(); ++k)
            CHECK(std::abs(abs.states[row].delta[k] -
                           rot.states[row].delta[k] - ramp) < 1e-9);
    }
}

TEST_CASE("identical seed and config reproduce the trajectory exactly") {
    GridTopology t = reference_topology();
    DroopParams params = stable_gains();
    SimConfig config;
    config.delta0 = 0.1;
    config.seed = 123;
    config.t_end = 0.2;

    Trajectory a =
        integrate(t, params, config, random_initial_state(t, params, config));
    Trajectory b =
        integrate(t, params, config, random_initial_state(t, params, config));
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t row = 0; row < a.states.size(); ++row)
        for (std::size_t k = 0; k < a.states[row].delta.size(); ++k)
            CHECK(a.states[row].delta[k] == b.states[row].delta[k]);
}

TEST_CASE("runaway gains trigger a blowup error") {
    GridTopology t = reference_topology();
    DroopParams params;
    params.m = 1e8;
    params.k_phi = 0.0;
    SimConfig config;
    config.t_end = 0.01;
    SystemState initial(2, 2, params.v_ref);
    CHECK_THROWS_AS(integrate(t, params, config, initial), NumericalBlowup);
}

TEST_CASE("config invariants are enforced") {
    SimConfig config;
    config.dt = 0.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config = SimConfig{};
    config.t_end = 1e-6;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config = SimConfig{};
    config.sync_tol = 0.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
}

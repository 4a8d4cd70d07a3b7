#include "hsim/dynamics.hpp"

#include <cmath>
#include <random>

#include "hsim/errors.hpp"

namespace hsim {

namespace {
constexpr double blowup_threshold = 1e6;  // rad/s
}

void SimConfig::validate() const {
    if (dt <= 0.0) throw ValidationError("dt must be > 0");
    if (t_end < dt) throw ValidationError("t_end must be >= dt");
    if (sync_tol <= 0.0) throw ValidationError("sync_tol must be > 0");
    if (delta0 < 0.0) throw ValidationError("delta0 must be >= 0");
    if (decimation < 1) throw ValidationError("decimation must be >= 1");
}

std::vector<double> rhs(const GridTopology& topology, const DroopParams& params,
                        const SystemState& state, Frame frame) {
    std::vector<PowerReading> powers = all_module_powers(topology, state);
    std::vector<double> out(powers.size());
    // In the rotating frame omega_star never enters the arithmetic, so the
    // small droop terms are not computed atop the large rated frequency.
    const double base =
        frame == Frame::rotating_at_omega_star ? 0.0 : params.omega_star;
    for (std::size_t k = 0; k < powers.size(); ++k)
        out[k] = base - params.m * powers[k].p - params.k_phi * powers[k].phi;
    return out;
}

double synchronization_metric(const SystemState& state) {
    double worst = 0.0;
    for (std::size_t a = 0; a < state.delta.size(); ++a)
        for (std::size_t b = a + 1; b < state.delta.size(); ++b)
            worst = std::max(
                worst, std::abs(wrap_angle(state.delta[a] - state.delta[b])));
    return worst;
}

SystemState random_initial_state(const GridTopology& topology,
                                 const DroopParams& params,
                                 const SimConfig& config) {
    SystemState state(topology.n_strings, topology.modules_per_string,
                      params.v_ref);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-config.delta0, config.delta0);
    for (auto& d : state.delta) d = dist(rng);
    return state;
}

Trajectory integrate(const GridTopology& topology, const DroopParams& params,
                     const SimConfig& config, const SystemState& initial) {
    config.validate();
    topology.validate();
    if (initial.n != topology.n_strings ||
        initial.m != topology.modules_per_string)
        throw ValidationError("initial state dimensions do not match topology");

    const std::size_t dim = initial.size();
    const auto n_steps =
        static_cast<std::size_t>(std::llround(config.t_end / config.dt));

    SystemState state = initial;
    Trajectory traj;

    auto check_velocity = [](const std::vector<double>& v, std::size_t step) {
        for (double x : v)
            if (!std::isfinite(x) || std::abs(x) > blowup_threshold)
                throw NumericalBlowup("phase velocity exceeded 1e6 rad/s", step);
    };

    std::vector<double> sync_metrics;
    auto snapshot = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(state);
        traj.powers.push_back(all_module_powers(topology, state));
        auto& p = traj.powers.back();
        std::vector<double> freq(dim);
        for (std::size_t k = 0; k < dim; ++k)
            freq[k] = droop_frequency(params, p[k]);
        traj.frequencies.push_back(std::move(freq));
        sync_metrics.push_back(synchronization_metric(state));
    };

    snapshot(0.0);

    SystemState scratch = state;
    std::vector<double> k2(dim), k3(dim), k4(dim);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double h = config.dt;

        std::vector<double> k1 = rhs(topology, params, state, config.frame);
        check_velocity(k1, step);

        for (std::size_t k = 0; k < dim; ++k)
            scratch.delta[k] = state.delta[k] + 0.5 * h * k1[k];
        k2 = rhs(topology, params, scratch, config.frame);

        for (std::size_t k = 0; k < dim; ++k)
            scratch.delta[k] = state.delta[k] + 0.5 * h * k2[k];
        k3 = rhs(topology, params, scratch, config.frame);

        for (std::size_t k = 0; k < dim; ++k)
            scratch.delta[k] = state.delta[k] + h * k3[k];
        k4 = rhs(topology, params, scratch, config.frame);
        check_velocity(k4, step);

        for (std::size_t k = 0; k < dim; ++k)
            state.delta[k] +=
                h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);

        if ((step + 1) % config.decimation == 0 || step + 1 == n_steps)
            snapshot(static_cast<double>(step + 1) * config.dt);
    }

    // Synchronized iff the metric stays below tolerance from some snapshot
    // through the end of the run; sync_time is the first such snapshot.
    std::size_t first_good = sync_metrics.size();
    for (std::size_t k = sync_metrics.size(); k-- > 0;) {
        if (sync_metrics[k] < config.sync_tol)
            first_good = k;
        else
            break;
    }
    if (first_good < sync_metrics.size()) {
        traj.synchronized = true;
        traj.sync_time = traj.times[first_good];
    }
    return traj;
}

}  // namespace hsim

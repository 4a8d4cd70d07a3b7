#include "hsim/network.hpp"

#include <cmath>
#include <stdexcept>

#include "hsim/errors.hpp"

namespace hsim {

void GridTopology::validate() const {
    if (n_strings < 1) throw ValidationError("n_strings must be >= 1");
    if (modules_per_string < 1)
        throw ValidationError("modules_per_string must be >= 1");
    if (string_admittance.size() != n_strings)
        throw ValidationError("string_admittance size must equal n_strings");
    for (const auto& y : string_admittance) {
        if (y.magnitude < 0.0)
            throw ValidationError("admittance magnitude must be >= 0");
        if (!y.passive())
            throw ValidationError(
                "string admittance angle must lie in [-pi/2, pi/2]");
    }
    if (load_admittance.magnitude < 0.0)
        throw ValidationError("load admittance magnitude must be >= 0");
    if (!load_admittance.passive())
        throw ValidationError("load admittance angle must lie in [-pi/2, pi/2]");

    Complex total = load_admittance.to_complex();
    for (const auto& y : string_admittance) total += y.to_complex();
    if (std::abs(total) < singular_epsilon)
        throw ValidationError(
            "total admittance (sum of string admittances plus load) is "
            "singular: bus voltage is undefined");
}

bool GridTopology::equal_lines(double tol) const {
    for (std::size_t i = 1; i < string_admittance.size(); ++i) {
        if (std::abs(string_admittance[i].magnitude -
                     string_admittance[0].magnitude) > tol ||
            std::abs(wrap_angle(string_admittance[i].angle -
                                string_admittance[0].angle)) > tol)
            return false;
    }
    return true;
}

PowerReading make_power_reading(double p, double q) {
    PowerReading r;
    r.p = p;
    r.q = q;
    if (std::hypot(p, q) < s_epsilon) {
        r.phi = 0.0;
        r.degenerate = true;
    } else {
        // Four-quadrant angle of P + jQ; coincides with arctan(Q/P) for P > 0.
        r.phi = std::atan2(q, p);
    }
    return r;
}

namespace {

Complex total_admittance(const GridTopology& topology) {
    Complex total = topology.load_admittance.to_complex();
    for (const auto& y : topology.string_admittance) total += y.to_complex();
    return total;
}

void check_state_dims(const GridTopology& topology, const SystemState& state) {
    if (state.n != topology.n_strings || state.m != topology.modules_per_string)
        throw ValidationError("state dimensions do not match topology");
}

PowerReading power_at(const GridTopology& topology, const SystemState& state,
                      const DistributionFactors& f, std::size_t i,
                      std::size_t j) {
    const double vij = state.v(i, j);
    const double dij = state.d(i, j);
    const double y_mag = topology.string_admittance[i].magnitude;
    const double y_ang = topology.string_admittance[i].angle;

    double p = 0.0, q = 0.0;
    for (std::size_t b = 0; b < state.m; ++b) {
        double arg = dij - state.d(i, b) - y_ang;
        p += state.v(i, b) * std::cos(arg);
        q += state.v(i, b) * std::sin(arg);
    }
    for (std::size_t a = 0; a < state.n; ++a) {
        for (std::size_t b = 0; b < state.m; ++b) {
            double arg = dij - state.d(a, b) - f.y_prime[a].angle - y_ang;
            p -= f.y_prime[a].magnitude * state.v(a, b) * std::cos(arg);
            q -= f.y_prime[a].magnitude * state.v(a, b) * std::sin(arg);
        }
    }
    return make_power_reading(vij * y_mag * p, vij * y_mag * q);
}

}  // namespace

EqualLineModel make_equal_line_model(const GridTopology& topology) {
    if (!topology.equal_lines(1e-12))
        throw HeterogeneousLines(
            "equal-line model requires identical string admittances");
    EqualLineModel model;
    model.y_line = topology.string_admittance.at(0);
    Complex denom = static_cast<double>(topology.n_strings) *
                        model.y_line.to_complex() +
                    topology.load_admittance.to_complex();
    if (std::abs(denom) < singular_epsilon)
        throw SingularNetwork("total admittance is singular");
    model.y_eq = Admittance::from_complex(model.y_line.to_complex() / denom);
    return model;
}

DistributionFactors distribution_factors(const GridTopology& topology) {
    Complex total = total_admittance(topology);
    if (std::abs(total) < singular_epsilon)
        throw SingularNetwork("|sum Y_c + Y_L| below 1e-12");
    DistributionFactors f;
    f.y_prime.reserve(topology.string_admittance.size());
    for (const auto& y : topology.string_admittance)
        f.y_prime.push_back(Admittance::from_complex(y.to_complex() / total));
    return f;
}

Phasor bus_voltage(const GridTopology& topology, const SystemState& state) {
    check_state_dims(topology, state);
    DistributionFactors f = distribution_factors(topology);
    Complex acc{0.0, 0.0};
    for (std::size_t a = 0; a < state.n; ++a) {
        for (std::size_t b = 0; b < state.m; ++b) {
            acc += f.y_prime[a].magnitude * state.v(a, b) *
                   std::polar(1.0, state.d(a, b) + f.y_prime[a].angle);
        }
    }
    return Phasor::from_complex(acc);
}

PowerReading module_power(const GridTopology& topology, const SystemState& state,
                          std::size_t i, std::size_t j) {
    check_state_dims(topology, state);
    if (i >= state.n || j >= state.m)
        throw std::out_of_range("module index out of range");
    return power_at(topology, state, distribution_factors(topology), i, j);
}

std::vector<PowerReading> all_module_powers(const GridTopology& topology,
                                            const SystemState& state) {
    check_state_dims(topology, state);
    DistributionFactors f = distribution_factors(topology);
    std::vector<PowerReading> out;
    out.reserve(state.size());
    for (std::size_t i = 0; i < state.n; ++i)
        for (std::size_t j = 0; j < state.m; ++j)
            out.push_back(power_at(topology, state, f, i, j));
    return out;
}

PowerReading equal_line_power(const EqualLineModel& model, double v_ref,
                              const SystemState& state, std::size_t i,
                              std::size_t j) {
    if (i >= state.n || j >= state.m)
        throw std::out_of_range("module index out of range");
    const double dij = state.d(i, j);
    const double phi_line = model.y_line.angle;
    const double y_eq = model.y_eq.magnitude;
    const double phi_eq = model.y_eq.angle;

    double p = 0.0, q = 0.0;
    for (std::size_t b = 0; b < state.m; ++b) {
        double arg = dij - state.d(i, b) - phi_line;
        p += std::cos(arg);
        q += std::sin(arg);
    }
    for (std::size_t a = 0; a < state.n; ++a) {
        for (std::size_t b = 0; b < state.m; ++b) {
            double arg = dij - state.d(a, b) - phi_eq - phi_line;
            p -= y_eq * std::cos(arg);
            q -= y_eq * std::sin(arg);
        }
    }
    const double scale = v_ref * v_ref * model.y_line.magnitude;
    return make_power_reading(scale * p, scale * q);
}

OracleSolution oracle_solve(const GridTopology& topology,
                            const SystemState& state) {
    check_state_dims(topology, state);
    Complex total = total_admittance(topology);
    if (std::abs(total) < singular_epsilon)
        throw SingularNetwork("|sum Y_c + Y_L| below 1e-12");

    const std::size_t n = state.n;
    const std::size_t m = state.m;

    // String EMFs: E_a = sum_b V_ab e^{j delta_ab}.
    std::vector<Complex> emf(n, Complex{0.0, 0.0});
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < m; ++b)
            emf[a] += std::polar(state.v(a, b), state.d(a, b));

    // Single-node equation: V_P = (sum_a Y_a E_a) / (sum_c Y_c + Y_L).
    Complex numer{0.0, 0.0};
    for (std::size_t a = 0; a < n; ++a)
        numer += topology.string_admittance[a].to_complex() * emf[a];
    Complex vp = numer / total;

    OracleSolution sol;
    sol.bus = Phasor::from_complex(vp);
    sol.string_currents.resize(n);
    sol.line_losses.resize(n);
    sol.module_powers.reserve(n * m);
    for (std::size_t a = 0; a < n; ++a) {
        Complex drop = emf[a] - vp;
        Complex current = drop * topology.string_admittance[a].to_complex();
        sol.string_currents[a] = current;
        sol.line_losses[a] = drop * std::conj(current);
        for (std::size_t b = 0; b < m; ++b) {
            Complex s = std::polar(state.v(a, b), state.d(a, b)) *
                        std::conj(current);
            sol.module_powers.push_back(make_power_reading(s.real(), s.imag()));
        }
    }
    Complex load_current = vp * topology.load_admittance.to_complex();
    sol.load_power = vp * std::conj(load_current);
    return sol;
}

}  // namespace hsim

#include "hsim/stability.hpp"

#include <algorithm>
#include <cmath>

#include "hsim/errors.hpp"

namespace hsim {

EtaCoefficients eta_coefficients(const EqualLineModel& model, double v_ref,
                                 double m, double k_phi, std::size_t n,
                                 std::size_t mods) {
    const double y_line = model.y_line.magnitude;
    const double phi_line = model.y_line.angle;
    const double y_eq = model.y_eq.magnitude;
    const double phi_eq = model.y_eq.angle;
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(mods);
    const double v2 = v_ref * v_ref;

    const double denom =
        mm + nn * nn * mm * y_eq * y_eq - 2.0 * nn * mm * y_eq * std::cos(phi_eq);
    if (denom < 1e-12)
        throw DegenerateLinearization(
            "power-factor-angle linearization denominator below 1e-12");

    EtaCoefficients eta;
    eta.eta_p1 = v2 * y_line * y_eq * std::sin(phi_eq + phi_line);
    eta.eta_p2 = -v2 * y_line * std::sin(phi_line);
    eta.eta_phi1 = (std::cos(phi_eq) - nn * y_eq) * y_eq / denom;
    eta.eta_phi2 = (nn * y_eq * std::cos(phi_eq) - 1.0) / denom;
    eta.eta_1 = m * eta.eta_p1 + k_phi * eta.eta_phi1;
    eta.eta_2 = m * eta.eta_p2 + k_phi * eta.eta_phi2;
    return eta;
}

LaplacianPair build_laplacians(std::size_t n, std::size_t mods) {
    const auto dim = static_cast<Eigen::Index>(n * mods);
    const auto mi = static_cast<Eigen::Index>(mods);

    LaplacianPair pair;
    pair.l_global = static_cast<double>(dim) *
                        Eigen::MatrixXd::Identity(dim, dim) -
                    Eigen::MatrixXd::Ones(dim, dim);
    pair.l_string = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd block = static_cast<double>(mods) *
                                Eigen::MatrixXd::Identity(mi, mi) -
                            Eigen::MatrixXd::Ones(mi, mi);
    for (std::size_t i = 0; i < n; ++i)
        pair.l_string.block(static_cast<Eigen::Index>(i) * mi,
                            static_cast<Eigen::Index>(i) * mi, mi, mi) = block;
    return pair;
}

SystemMatrix build_system_matrix(const EtaCoefficients& eta, double m,
                                 double k_phi, std::size_t n,
                                 std::size_t mods) {
    LaplacianPair lap = build_laplacians(n, mods);
    SystemMatrix sys;
    sys.a_p = eta.eta_p1 * lap.l_global + eta.eta_p2 * lap.l_string;
    sys.a_phi = eta.eta_phi1 * lap.l_global + eta.eta_phi2 * lap.l_string;
    sys.a = m * sys.a_p + k_phi * sys.a_phi;
    return sys;
}

std::vector<double> closed_form_spectrum(const EtaCoefficients& eta,
                                         std::size_t n, std::size_t mods) {
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(mods);
    std::vector<double> spectrum;
    spectrum.reserve(n * mods);
    spectrum.push_back(0.0);
    for (std::size_t k = 1; k < n; ++k)
        spectrum.push_back(mm * nn * eta.eta_1);
    for (std::size_t k = 0; k < n * (mods - 1); ++k)
        spectrum.push_back(mm * (nn * eta.eta_1 + eta.eta_2));
    std::sort(spectrum.begin(), spectrum.end());
    return spectrum;
}

StabilityVerdict stability_verdict(const EtaCoefficients& eta, double m,
                                   double k_phi, std::size_t n) {
    const double nn = static_cast<double>(n);
    StabilityVerdict v;
    // lambda_p = m*eta_p1 + k_phi*eta_phi1 and lambda_c = m*(N*eta_p1 +
    // eta_p2) + k_phi*(N*eta_phi1 + eta_phi2) regroup algebraically into the
    // eta composites; evaluating through them keeps the eigenvalue
    // identities MN*eta_1 = MN*lambda_p and M(N*eta_1 + eta_2) = M*lambda_c
    // exact in floating point as well.
    v.lambda_p = eta.eta_1;
    v.lambda_c = nn * eta.eta_1 + eta.eta_2;
    v.stable = v.lambda_p < 0.0 && v.lambda_c < 0.0;
    return v;
}

Eigen::MatrixXd numerical_linearization(const GridTopology& topology,
                                        const DroopParams& params,
                                        const SystemState& equilibrium,
                                        double h) {
    std::vector<double> base =
        rhs(topology, params, equilibrium, Frame::rotating_at_omega_star);
    double lo = *std::min_element(base.begin(), base.end());
    double hi = *std::max_element(base.begin(), base.end());
    // A common drift is fine; a spread in velocities is not an equilibrium.
    if (hi - lo > 1e-9)
        throw NotAnEquilibrium("phase-velocity spread exceeds 1e-9 rad/s");

    const auto dim = static_cast<Eigen::Index>(equilibrium.size());
    Eigen::MatrixXd jac(dim, dim);
    SystemState plus = equilibrium;
    SystemState minus = equilibrium;
    for (Eigen::Index c = 0; c < dim; ++c) {
        plus.delta[static_cast<std::size_t>(c)] += h;
        minus.delta[static_cast<std::size_t>(c)] -= h;
        std::vector<double> fp =
            rhs(topology, params, plus, Frame::rotating_at_omega_star);
        std::vector<double> fm =
            rhs(topology, params, minus, Frame::rotating_at_omega_star);
        for (Eigen::Index r = 0; r < dim; ++r)
            jac(r, c) = (fp[static_cast<std::size_t>(r)] -
                         fm[static_cast<std::size_t>(r)]) /
                        (2.0 * h);
        plus.delta[static_cast<std::size_t>(c)] = equilibrium.delta[static_cast<std::size_t>(c)];
        minus.delta[static_cast<std::size_t>(c)] = equilibrium.delta[static_cast<std::size_t>(c)];
    }
    return jac;
}

StabilityReport analyze(const GridTopology& topology,
                        const DroopParams& params) {
    topology.validate();
    EqualLineModel model = make_equal_line_model(topology);
    const std::size_t n = topology.n_strings;
    const std::size_t mods = topology.modules_per_string;

    StabilityReport report;
    report.eta = eta_coefficients(model, params.v_ref, params.m, params.k_phi,
                                  n, mods);
    report.closed_form_spectrum = closed_form_spectrum(report.eta, n, mods);

    SystemMatrix sys =
        build_system_matrix(report.eta, params.m, params.k_phi, n, mods);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sys.a);
    report.numerical_spectrum.assign(
        solver.eigenvalues().data(),
        solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(report.numerical_spectrum.begin(),
              report.numerical_spectrum.end());

    for (std::size_t k = 0; k < report.numerical_spectrum.size(); ++k) {
        double cf = report.closed_form_spectrum[k];
        double nu = report.numerical_spectrum[k];
        double scale = std::max(1.0, std::abs(cf));
        report.max_spectrum_discrepancy =
            std::max(report.max_spectrum_discrepancy, std::abs(cf - nu) / scale);
    }

    StabilityVerdict verdict =
        stability_verdict(report.eta, params.m, params.k_phi, n);
    report.lambda_p = verdict.lambda_p;
    report.lambda_c = verdict.lambda_c;
    report.stable = verdict.stable;
    return report;
}

}  // namespace hsim

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsim/dynamics.hpp"
#include "hsim/network.hpp"

namespace hsim {

/// Sensitivities of module power (eta_p*) and power factor angle (eta_phi*)
/// to phase perturbations around the equal-angle equilibrium, plus the
/// droop-weighted composites eta_1 = m*eta_p1 + k_phi*eta_phi1 and
/// eta_2 = m*eta_p2 + k_phi*eta_phi2.
struct EtaCoefficients {
    double eta_p1 = 0.0;
    double eta_p2 = 0.0;
    double eta_phi1 = 0.0;
    double eta_phi2 = 0.0;
    double eta_1 = 0.0;
    double eta_2 = 0.0;
};

/// L1 = NM*I - J (all-to-all) and L2 = I_N kron (M*I - J) (intra-string,
/// block diagonal), both NM x NM symmetric zero-row-sum Laplacians.
struct LaplacianPair {
    Eigen::MatrixXd l_global;
    Eigen::MatrixXd l_string;
};

struct SystemMatrix {
    Eigen::MatrixXd a_p;    // eta_p1*L1 + eta_p2*L2
    Eigen::MatrixXd a_phi;  // eta_phi1*L1 + eta_phi2*L2
    Eigen::MatrixXd a;      // m*a_p + k_phi*a_phi
};

struct StabilityReport {
    EtaCoefficients eta;
    std::vector<double> closed_form_spectrum;  // sorted ascending
    std::vector<double> numerical_spectrum;    // sorted ascending
    double lambda_p = 0.0;
    double lambda_c = 0.0;
    bool stable = false;
    double max_spectrum_discrepancy = 0.0;
};

/// Evaluate the four eta closed forms from the equal-line model. Throws
/// DegenerateLinearization when the phi-sensitivity denominator vanishes
/// (N|Y_eq| = 1 with phi_eq = 0, i.e. zero load).
EtaCoefficients eta_coefficients(const EqualLineModel& model, double v_ref,
                                 double m, double k_phi, std::size_t n,
                                 std::size_t mods);

LaplacianPair build_laplacians(std::size_t n, std::size_t mods);

SystemMatrix build_system_matrix(const EtaCoefficients& eta, double m,
                                 double k_phi, std::size_t n,
                                 std::size_t mods);

/// {0} x1, {MN*eta_1} x(N-1), {M(N*eta_1 + eta_2)} x N(M-1), sorted.
std::vector<double> closed_form_spectrum(const EtaCoefficients& eta,
                                         std::size_t n, std::size_t mods);

/// lambda_p = m*eta_p1 + k_phi*eta_phi1,
/// lambda_c = m*(N*eta_p1 + eta_p2) + k_phi*(N*eta_phi1 + eta_phi2);
/// stable iff both are negative.
struct StabilityVerdict {
    double lambda_p = 0.0;
    double lambda_c = 0.0;
    bool stable = false;
};

StabilityVerdict stability_verdict(const EtaCoefficients& eta, double m,
                                   double k_phi, std::size_t n);

/// Central finite-difference Jacobian of the rotating-frame phase dynamics
/// at an equal-angle equilibrium. Throws NotAnEquilibrium if the phase
/// velocities at the point spread by more than 1e-9 rad/s.
Eigen::MatrixXd numerical_linearization(const GridTopology& topology,
                                        const DroopParams& params,
                                        const SystemState& equilibrium,
                                        double h = 1e-7);

/// Full report: eta coefficients, both spectra, eigenvalue scales, verdict.
StabilityReport analyze(const GridTopology& topology,
                        const DroopParams& params);

}  // namespace hsim

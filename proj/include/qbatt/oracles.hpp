#ifndef QBATT_ORACLES_HPP
#define QBATT_ORACLES_HPP

#include <array>
#include <optional>

#include "qbatt/types.hpp"

namespace qbatt::oracles {

/// Closed-form results for the two-site XXX chain and the finite-temperature
/// model. All functions are plain scalar formula evaluations, independent of
/// the matrix machinery, and double as oracles for the numerical modules.

struct Populations4 {
    double p11, p22, p33, p44;
};

/// Zero-temperature steady-state populations as functions of
/// (chi = f/Gamma, alpha, eta).
Populations4 xxx2_steady_populations(double chi, double alpha, double eta);

struct Rho11Max {
    double value;
    double chi_opt;  // -1/cos(alpha)
};

/// Maximum of rho_11(inf) over chi at fixed (eta, alpha); rejects cos(alpha)=0.
Rho11Max rho11_max(double eta, double alpha);

/// Finite-temperature steady-state populations (y-direction feedback,
/// alpha = pi convention).
Populations4 thermal_steady_populations(double f, double gamma, double eta, double eta_c,
                                        double n_thermal);

/// Optimal feedback strength f/Gamma for stored energy at finite temperature.
double optimal_f_thermal(double n_thermal, double eta, double eta_c);

/// Maximum rho_11(inf) at finite temperature, mu = 4 n_T eta (1 - eta_c).
double rho11_max_thermal(double eta, double mu);

/// Critical coupling J_c/h beyond which feedback fails (N=2, stored energy);
/// empty at eta = 1 where no critical value exists.
std::optional<double> critical_j_n2(double eta);

struct StoredEnergyBranches {
    double delta_e1;  // ground state |dd>, J < h/4
    double delta_e2;  // singlet ground state, J > h/4
};

/// Steady-state stored energy for both N=2 ground-state branches.
StoredEnergyBranches delta_e_branches(double chi, double alpha, double eta, double j, double h);

/// Top of the XXX spectrum: N h / 2 + (N - 1) J.
double xxx_highest_energy(int n_sites, double h, double j);

/// Transcription of the full N=2 XXX master-equation component ODEs
/// (diagonals, off-diagonals, and conjugate pairs). Independent route used to
/// cross-check the operator-algebra generator.
Eigen::Matrix4cd xxx2_ode_rhs(const Eigen::Matrix4cd& rho, const ChainSpec& chain,
                              const ControlSpec& ctrl);

/// Stored energy of the two-site XXX battery from state components.
double xxx2_stored_energy(const Eigen::Matrix4cd& rho_inf, const Eigen::Matrix4cd& rho_0,
                          double h, double j);

}  // namespace qbatt::oracles

#endif

#ifndef QBATT_METRICS_HPP
#define QBATT_METRICS_HPP

#include <optional>

#include "qbatt/types.hpp"

namespace qbatt {

struct MetricsRecord {
    double stored_energy = 0.0;               // Delta E
    double ergotropy = 0.0;                   // script E
    double capacity = 0.0;                    // C_max
    double utilization = 0.0;                 // R = Delta E / C_max
    std::optional<double> extraction_ratio;   // ergotropy / Delta E, absent when |Delta E| tiny
};

/// Tr[H rho_t] - Tr[H rho_0].
double stored_energy(const Matrix& rho_t, const Matrix& rho_0, const Matrix& h);

/// Maximum unitarily extractable energy: Tr[H rho] - sum_k r_k eps_k with
/// populations r sorted descending against energies eps ascending.
double ergotropy(const Matrix& rho, const Matrix& h);

/// Spectral width E_max - E_min of the battery Hamiltonian.
double capacity(const Matrix& h);

/// R = Delta E / C_max; rejects C_max <= 0.
double utilization(double delta_e, double c_max);

MetricsRecord compute_metrics(const Matrix& rho_t, const Matrix& rho_0, const Matrix& h);

}  // namespace qbatt

#endif

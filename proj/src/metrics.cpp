#include "qbatt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qbatt/operators.hpp"

namespace qbatt {

double stored_energy(const Matrix& rho_t, const Matrix& rho_0, const Matrix& h) {
    if (rho_t.rows() != h.rows() || rho_0.rows() != h.rows())
        throw ValidationError("stored_energy: dimension mismatch");
    return ((rho_t - rho_0) * h).trace().real();
}

double ergotropy(const Matrix& rho, const Matrix& h) {
    if (rho.rows() != h.rows())
        throw ValidationError("ergotropy: dimension mismatch");
    Spectrum hs = spectrum(h);
    Eigen::SelfAdjointEigenSolver<Matrix> rs(rho);
    if (rs.info() != Eigen::Success)
        throw NumericalError("ergotropy: state eigensolver failed");
    // Populations descending against energies ascending gives the passive energy.
    const long d = rho.rows();
    double passive = 0.0;
    for (long k = 0; k < d; ++k)
        passive += rs.eigenvalues()(d - 1 - k) * hs.eigenvalues(k);
    return (h * rho).trace().real() - passive;
}

double capacity(const Matrix& h) {
    Spectrum s = spectrum(h);
    return s.eigenvalues(s.eigenvalues.size() - 1) - s.eigenvalues(0);
}

double utilization(double delta_e, double c_max) {
    if (!(c_max > 0.0))
        throw ValidationError("utilization: capacity must be > 0");
    return delta_e / c_max;
}

MetricsRecord compute_metrics(const Matrix& rho_t, const Matrix& rho_0, const Matrix& h) {
    MetricsRecord rec;
    rec.stored_energy = stored_energy(rho_t, rho_0, h);
    rec.ergotropy = ergotropy(rho_t, h);
    rec.capacity = capacity(h);
    rec.utilization = utilization(rec.stored_energy, rec.capacity);
    if (std::abs(rec.stored_energy) >= 1e-12)
        rec.extraction_ratio = rec.ergotropy / rec.stored_energy;
    return rec;
}

}  // namespace qbatt

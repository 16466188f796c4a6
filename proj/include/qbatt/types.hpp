#ifndef QBATT_TYPES_HPP
#define QBATT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <Eigen/Dense>

namespace qbatt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Spin-chain battery parameters (units h = 1 by convention).
/// H_B = (h/2) sum_j sigma_j^z
///     + sum_j J [(1+gamma) sx sx + (1-gamma) sy sy + delta sz sz].
struct ChainSpec {
    int n_sites = 2;
    double field = 1.0;     // h > 0
    double coupling = 0.0;  // J >= 0
    double gamma = 0.0;     // anisotropy, gamma=0 & delta=1 -> XXX
    double delta = 1.0;     // delta=0 -> XY, delta=1 & gamma>0 -> XYZ

    int dim() const { return 1 << n_sites; }

    void validate() const {
        if (n_sites < 1) throw ValidationError("n_sites must be >= 1");
        if (n_sites > 10) throw ValidationError("n_sites capped at 10 (dense operators)");
        if (!(field > 0.0)) throw ValidationError("field strength h must be > 0");
        if (coupling < 0.0) throw ValidationError("coupling J must be >= 0");
    }
};

/// Feedback / measurement parameters.
/// F_j = f (sigma_j^x sin(alpha) + sigma_j^y cos(alpha)); chi = f / Gamma.
struct ControlSpec {
    double feedback = 0.0;    // f, in units of h
    double alpha = kPi;       // feedback direction, radians in (-pi, pi]
    double decay = 1.0;       // Gamma > 0
    double eta_d = 1.0;       // detector efficiency
    double eta_c = 1.0;       // collection efficiency
    double n_thermal = 0.0;   // reservoir occupation n_T

    double eta() const { return eta_c * eta_d; }
    double chi() const { return feedback / decay; }

    void validate() const {
        if (!(decay > 0.0)) throw ValidationError("decay rate Gamma must be > 0");
        if (eta_d < 0.0 || eta_d > 1.0) throw ValidationError("eta_d must lie in [0, 1]");
        if (eta_c < 0.0 || eta_c > 1.0) throw ValidationError("eta_c must lie in [0, 1]");
        if (n_thermal < 0.0) throw ValidationError("n_T must be >= 0");
        // The measurement back-action terms carry 1/(eta Gamma); they only
        // appear once feedback is switched on.
        if (feedback != 0.0 && !(eta() > 0.0))
            throw ValidationError("total efficiency eta must be > 0 when feedback is active");
    }
};

}  // namespace qbatt

#endif

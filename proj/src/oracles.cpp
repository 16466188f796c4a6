#include "qbatt/oracles.hpp"

#include <cmath>

namespace qbatt::oracles {

Populations4 xxx2_steady_populations(double chi, double alpha, double eta) {
    const double c = std::cos(alpha);
    const double den = 2.0 * chi * chi + 2.0 * chi * eta * c + eta;
    if (std::abs(den) < 1e-14)
        throw ValidationError("xxx2_steady_populations: singular parameters");
    const double den2 = den * den;
    const double a = chi * chi + 2.0 * chi * eta * c + eta;
    Populations4 p;
    p.p11 = std::pow(chi, 4) / den2;
    p.p22 = chi * chi * a / den2;
    p.p33 = p.p22;
    p.p44 = a * a / den2;
    return p;
}

Rho11Max rho11_max(double eta, double alpha) {
    const double c = std::cos(alpha);
    if (std::abs(c) < 1e-14)
        throw ValidationError("rho11_max: no finite optimum at cos(alpha) = 0");
    const double d = 2.0 - eta * c * c;
    return Rho11Max{1.0 / (d * d), -1.0 / c};
}

Populations4 thermal_steady_populations(double f, double gamma, double eta, double eta_c,
                                        double n_thermal) {
    const double g2 = gamma * gamma;
    const double den = 2.0 * f * f - 2.0 * f * gamma * eta +
                       (1.0 + 2.0 * n_thermal) * g2 * eta - 2.0 * n_thermal * g2 * eta * eta_c;
    if (std::abs(den) < 1e-14)
        throw ValidationError("thermal_steady_populations: singular parameters");
    const double den2 = den * den;
    Populations4 p;
    const double a = f * f + n_thermal * g2 * eta - n_thermal * g2 * eta * eta_c;
    p.p11 = a * a / den2;
    p.p22 = -g2 * (gamma - 2.0 * f) * (gamma - 2.0 * f) * eta * eta / (4.0 * den2) + 0.25;
    p.p33 = p.p22;
    const double b = f * f - 2.0 * f * gamma * eta + (1.0 + n_thermal) * g2 * eta -
                     n_thermal * g2 * eta * eta_c;
    p.p44 = b * b / den2;
    return p;
}

double optimal_f_thermal(double n_thermal, double eta, double eta_c) {
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * n_thermal * eta * (1.0 - eta_c)));
}

double rho11_max_thermal(double eta, double mu) {
    if (mu < 0.0) throw ValidationError("rho11_max_thermal: mu must be >= 0");
    const double s = std::sqrt(1.0 + mu);
    const double t = 1.0 + eta * s / (1.0 + mu + (1.0 - eta) * s);
    return 0.25 * t * t;
}

std::optional<double> critical_j_n2(double eta) {
    if (eta <= 0.0 || eta > 1.0)
        throw ValidationError("critical_j_n2: eta must lie in (0, 1]");
    if (eta >= 1.0 - 1e-14) return std::nullopt;  // diverges at perfect measurement
    return (2.0 - eta) / (2.0 * (1.0 - eta));
}

StoredEnergyBranches delta_e_branches(double chi, double alpha, double eta, double j, double h) {
    const double c = std::cos(alpha);
    const double den = 2.0 * chi * chi + 2.0 * chi * eta * c + eta;
    if (std::abs(den) < 1e-14)
        throw ValidationError("delta_e_branches: singular parameters");
    const double theta = chi * chi / den;
    StoredEnergyBranches r;
    r.delta_e1 = 2.0 * (h - 2.0 * j) * theta * (eta + 2.0 * chi * eta * c) / den +
                 4.0 * (h - j) * theta * theta;
    r.delta_e2 = -h + 4.0 * j + 4.0 * j * theta * theta + 2.0 * (h - 2.0 * j) * theta;
    return r;
}

double xxx_highest_energy(int n_sites, double h, double j) {
    if (n_sites < 1) throw ValidationError("xxx_highest_energy: n_sites must be >= 1");
    return n_sites * h / 2.0 + (n_sites - 1) * j;
}

Eigen::Matrix4cd xxx2_ode_rhs(const Eigen::Matrix4cd& rho, const ChainSpec& chain,
                              const ControlSpec& ctrl) {
    if (chain.n_sites != 2 || chain.gamma != 0.0 || chain.delta != 1.0)
        throw ValidationError("xxx2_ode_rhs: requires the N=2 XXX model");
    const Complex i(0.0, 1.0);
    const double h = chain.field;
    const double j = chain.coupling;
    const double g = ctrl.decay;
    const double f = ctrl.feedback;
    const double ca = std::cos(ctrl.alpha);
    const double sa = std::sin(ctrl.alpha);
    const double fb = ctrl.feedback == 0.0 ? 0.0 : f * f / (g * ctrl.eta());
    const Complex e1a = std::exp(i * ctrl.alpha);
    const Complex e2a = std::exp(2.0 * i * ctrl.alpha);
    const Complex e4a = std::exp(4.0 * i * ctrl.alpha);

    const Complex r11 = rho(0, 0), r12 = rho(0, 1), r13 = rho(0, 2), r14 = rho(0, 3);
    const Complex r21 = rho(1, 0), r22 = rho(1, 1), r23 = rho(1, 2), r24 = rho(1, 3);
    const Complex r31 = rho(2, 0), r32 = rho(2, 1), r33 = rho(2, 2), r34 = rho(2, 3);
    const Complex r41 = rho(3, 0), r42 = rho(3, 1), r43 = rho(3, 2), r44 = rho(3, 3);

    Eigen::Matrix4cd d;

    d(0, 0) = -2.0 * g * r11 - 4.0 * f * ca * r11 + fb * (r22 + r33 - 2.0 * r11);
    d(1, 1) = 2.0 * i * j * (r23 - r32) + (g + 2.0 * f * ca) * (r11 - r22) +
              fb * (r11 - 2.0 * r22 + r44);
    d(2, 2) = -2.0 * i * j * (r23 - r32) + (g + 2.0 * f * ca) * (r11 - r33) +
              fb * (r11 - 2.0 * r33 + r44);
    d(3, 3) = -d(0, 0) - d(1, 1) - d(2, 2);

    d(0, 1) = -i * (h * r12 + 2.0 * j * (r12 - r13)) -
              f * ((3.0 * r12 + r21) * ca + i * (r12 + r21) * sa) -
              fb * (2.0 * r12 + e2a * r21 - r34) - 1.5 * g * r12;
    d(0, 2) = -i * (h * r13 + 2.0 * j * (r13 - r12)) -
              f * ((3.0 * r13 + r31) * ca + i * (r13 + r31) * sa) -
              fb * (2.0 * r13 + e2a * r31 - r24) - 1.5 * g * r13;
    d(0, 3) = -e1a * f * (2.0 * r14 + r23 + r32) - 2.0 * i * h * r14 - g * r14 -
              fb * (2.0 * r14 + e2a * (r23 + r32));
    d(1, 2) = 2.0 * i * j * (r22 - r33) - g * r23 +
              fb * (-2.0 * r23 - std::conj(e2a) * (r14 + e4a * r41)) -
              f * ca * (r14 + 2.0 * r23 + r41) + i * f * sa * (r14 - r41);
    d(1, 3) = (r13 - 0.5 * r24) * g - i * (h * r24 + 2.0 * j * (r34 - r24)) +
              fb * (r13 - 2.0 * r24 - e2a * r42) +
              f * ((2.0 * r13 - r24 - r42) * ca - i * (r24 + r42) * sa);
    d(2, 3) = (r12 - 0.5 * r34) * g - i * (h * r34 + 2.0 * j * (r24 - r34)) +
              fb * (r12 - 2.0 * r34 - e2a * r43) +
              f * ((2.0 * r12 - r34 - r43) * ca - i * (r34 + r43) * sa);

    d(1, 0) = std::conj(d(0, 1));
    d(2, 0) = std::conj(d(0, 2));
    d(3, 0) = std::conj(d(0, 3));
    d(2, 1) = std::conj(d(1, 2));
    d(3, 1) = std::conj(d(1, 3));
    d(3, 2) = std::conj(d(2, 3));
    return d;
}

double xxx2_stored_energy(const Eigen::Matrix4cd& rho_inf, const Eigen::Matrix4cd& rho_0,
                          double h, double j) {
    auto energy = [&](const Eigen::Matrix4cd& r) {
        return (j + h) * r(0, 0).real() - j * r(1, 1).real() + 2.0 * j * r(2, 1).real() +
               2.0 * j * r(1, 2).real() - j * r(2, 2).real() + (j - h) * r(3, 3).real();
    };
    return energy(rho_inf) - energy(rho_0);
}

}  // namespace qbatt::oracles

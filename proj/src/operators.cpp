#include "qbatt/operators.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace qbatt {

Matrix pauli2(PauliAxis axis) {
    Matrix m = Matrix::Zero(2, 2);
    const Complex i(0.0, 1.0);
    switch (axis) {
        case PauliAxis::X:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case PauliAxis::Y:
            m(0, 1) = -i;
            m(1, 0) = i;
            break;
        case PauliAxis::Z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        case PauliAxis::Plus:
            m(0, 1) = 1.0;  // sigma^+ |down> = |up>
            break;
        case PauliAxis::Minus:
            m(1, 0) = 1.0;  // sigma^- |up> = |down>
            break;
    }
    return m;
}

Matrix build_pauli(int site, PauliAxis axis, int n_sites) {
    if (site < 1 || site > n_sites)
        throw ValidationError("site index out of range");
    const long dim_left = 1L << (site - 1);
    const long dim_right = 1L << (n_sites - site);
    Matrix left = Matrix::Identity(dim_left, dim_left);
    Matrix right = Matrix::Identity(dim_right, dim_right);
    return Eigen::kroneckerProduct(left, Eigen::kroneckerProduct(pauli2(axis), right).eval()).eval();
}

Matrix build_battery_hamiltonian(const ChainSpec& chain) {
    chain.validate();
    const int n = chain.n_sites;
    const int d = chain.dim();
    Matrix h = Matrix::Zero(d, d);
    for (int j = 1; j <= n; ++j)
        h += 0.5 * chain.field * build_pauli(j, PauliAxis::Z, n);
    for (int j = 1; j <= n - 1; ++j) {
        h += chain.coupling * (1.0 + chain.gamma) *
             (build_pauli(j, PauliAxis::X, n) * build_pauli(j + 1, PauliAxis::X, n));
        h += chain.coupling * (1.0 - chain.gamma) *
             (build_pauli(j, PauliAxis::Y, n) * build_pauli(j + 1, PauliAxis::Y, n));
        h += chain.coupling * chain.delta *
             (build_pauli(j, PauliAxis::Z, n) * build_pauli(j + 1, PauliAxis::Z, n));
    }
    return h;
}

Matrix build_feedback_operator(int site, const ControlSpec& ctrl, int n_sites) {
    ctrl.validate();
    return ctrl.feedback * (std::sin(ctrl.alpha) * build_pauli(site, PauliAxis::X, n_sites) +
                            std::cos(ctrl.alpha) * build_pauli(site, PauliAxis::Y, n_sites));
}

double hermiticity_defect(const Matrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Spectrum spectrum(const Matrix& h) {
    if (hermiticity_defect(h) > 1e-10)
        throw ValidationError("spectrum: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw NumericalError("spectrum: eigensolver failed");
    return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

Vector basis_state(const std::vector<int>& bits) {
    const int n = static_cast<int>(bits.size());
    long index = 0;
    for (int b : bits) index = (index << 1) | (b ? 1 : 0);
    Vector v = Vector::Zero(1L << n);
    v(index) = 1.0;
    return v;
}

Vector all_up_state(int n_sites) { return basis_state(std::vector<int>(n_sites, 0)); }

Vector all_down_state(int n_sites) { return basis_state(std::vector<int>(n_sites, 1)); }

Matrix pure_density(const Vector& psi) { return psi * psi.adjoint(); }

Matrix ground_state_density(const ChainSpec& chain) {
    Spectrum s = spectrum(build_battery_hamiltonian(chain));
    Vector g = s.eigenvectors.col(0);
    return pure_density(g);
}

}  // namespace qbatt

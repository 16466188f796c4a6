#ifndef QBATT_OPERATORS_HPP
#define QBATT_OPERATORS_HPP

#include <vector>

#include "qbatt/types.hpp"

namespace qbatt {

enum class PauliAxis { X, Y, Z, Plus, Minus };

/// 2x2 Pauli matrix in the {|up>, |down>} basis (sigma_z |up> = +|up>).
Matrix pauli2(PauliAxis axis);

/// I (x) ... (x) sigma^axis (x) ... (x) I with the Pauli at slot `site`
/// (1-based, site 1 is the leftmost tensor factor). Dimension 2^n_sites.
Matrix build_pauli(int site, PauliAxis axis, int n_sites);

/// Open-boundary chain Hamiltonian H_B for the given spec.
Matrix build_battery_hamiltonian(const ChainSpec& chain);

/// Local feedback Hamiltonian F_j = f (sx sin(alpha) + sy cos(alpha)) at slot j.
Matrix build_feedback_operator(int site, const ControlSpec& ctrl, int n_sites);

struct Spectrum {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns, orthonormal
};

/// Eigendecomposition of a Hermitian operator; rejects non-Hermitian input.
Spectrum spectrum(const Matrix& h);

/// Max-norm of A - A^dagger.
double hermiticity_defect(const Matrix& a);

/// Computational basis state |b_1 b_2 ... b_N> with bit 0 = up, 1 = down.
Vector basis_state(const std::vector<int>& bits);
Vector all_up_state(int n_sites);
Vector all_down_state(int n_sites);

/// Ground state of H_B as a pure density matrix.
Matrix ground_state_density(const ChainSpec& chain);

/// |psi><psi| for a normalized vector.
Matrix pure_density(const Vector& psi);

}  // namespace qbatt

#endif

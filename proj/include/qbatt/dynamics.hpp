#ifndef QBATT_DYNAMICS_HPP
#define QBATT_DYNAMICS_HPP

#include <map>
#include <mutex>
#include <vector>

#include "qbatt/metrics.hpp"
#include "qbatt/types.hpp"

namespace qbatt {

/// Lindblad dissipator D[o] rho = o rho o+ - (o+ o rho + rho o+ o)/2.
Matrix dissipator(const Matrix& o, const Matrix& rho);

/// Precomputed operators for one (chain, ctrl) pair. rhs() applies the
/// ensemble-averaged feedback master equation: at n_T = 0 and eta_c = 1 the
/// spontaneous-emission channel, otherwise the split collected/thermal form.
class Generator {
  public:
    Generator(const ChainSpec& chain, const ControlSpec& ctrl);

    Matrix rhs(const Matrix& rho) const;

    const Matrix& hamiltonian() const { return h_; }
    const Matrix& lowering(int site) const { return lowering_[site - 1]; }           // 1-based
    const Matrix& feedback_op(int site) const { return feedback_[site - 1]; }        // 1-based

    /// exp(-i H dt / 2), built from the eigendecomposition of H and cached per
    /// dt (thread-safe). Used by the split-step stochastic integrator.
    const Matrix& half_step_propagator(double dt) const;

    const ChainSpec& chain() const { return chain_; }
    const ControlSpec& ctrl() const { return ctrl_; }
    int dim() const { return static_cast<int>(h_.rows()); }

  private:
    ChainSpec chain_;
    ControlSpec ctrl_;
    Matrix h_;
    std::vector<Matrix> lowering_;
    std::vector<Matrix> raising_;
    std::vector<Matrix> feedback_;
    Eigen::VectorXd h_eigenvalues_;
    Matrix h_eigenvectors_;
    mutable std::map<double, Matrix> propagator_cache_;
    mutable std::mutex propagator_mutex_;
};

/// Zero-temperature feedback master equation (rejects n_T != 0 or eta_c != 1).
Matrix feedback_me_rhs(const Matrix& rho, const ChainSpec& chain, const ControlSpec& ctrl);

/// Finite-temperature master equation; reduces to feedback_me_rhs at
/// n_T = 0, eta_c = 1.
Matrix thermal_me_rhs(const Matrix& rho, const ChainSpec& chain, const ControlSpec& ctrl);

struct EvolutionResult {
    std::vector<double> gamma_t;        // strictly increasing time grid (Gamma*t)
    std::vector<Matrix> states;
    std::vector<MetricsRecord> metrics; // relative to the initial state
    double trace_drift = 0.0;           // max |Tr rho - 1| along the run
    double used_dt_gamma = 0.0;         // step after any refinement
};

struct EvolveOptions {
    int record_stride = 10;      // snapshot every `stride` steps (plus first/last)
    double positivity_floor = -1e-6;
    int max_refinements = 4;
};

/// Fixed-step RK4 propagation of the (thermal) feedback master equation.
/// Time arguments are in units of 1/Gamma. On a positivity violation the run
/// restarts with dt halved, up to max_refinements times.
EvolutionResult evolve(const Matrix& rho0, const ChainSpec& chain, const ControlSpec& ctrl,
                       double t_final_gamma, double dt_gamma = 1e-2,
                       const EvolveOptions& opts = {});

/// Dense matrix of the generator acting on vec(rho) (column stacking).
Matrix build_liouvillian(const ChainSpec& chain, const ControlSpec& ctrl);

struct SteadyStateResult {
    Matrix rho;
    double residual = 0.0;       // ||rhs(rho)||_F
    int null_multiplicity = 1;   // count of |lambda| < 1e-9 * Gamma (eigen path)
    bool via_integration = false;
    bool multiplicity_checked = true;
};

/// Stationary state of the generator. For Liouvillian dimension <= 1024 the
/// full spectrum is computed and the zero mode extracted with a uniqueness
/// count; larger systems use a trace-constrained linear solve. A degenerate
/// null space falls back to integration from the maximally mixed state.
SteadyStateResult steady_state(const ChainSpec& chain, const ControlSpec& ctrl);

}  // namespace qbatt

#endif

#ifndef QBATT_TRAJECTORIES_HPP
#define QBATT_TRAJECTORIES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qbatt/dynamics.hpp"
#include "qbatt/noise.hpp"
#include "qbatt/types.hpp"

namespace qbatt {

/// Homodyne photocurrent J_j = <sigma_j^x> + (dw/dt) / sqrt(eta Gamma).
double homodyne_current(const Matrix& rho, int site, const ControlSpec& ctrl, double dw,
                        double dt);

struct SmeStepResult {
    Matrix rho;
    bool accepted = true;  // false when the positivity guard tripped
};

/// One step of the conditional feedback master equation, taken as a
/// composition of completely positive maps: half-step Hamiltonian propagator,
/// measurement Kraus update, exact feedback unitary, half-step propagator
/// (see trajectories.cpp for the scheme and its weak-error properties).
/// dw spans one Wiener increment per site (variance dt, physical time).
/// Output is Hermitized and trace-renormalized; a minimum eigenvalue below
/// -1e-4 rejects the step.
SmeStepResult sme_step(const Matrix& rho, const Generator& gen, std::span<const double> dw,
                       double dt);

/// Finite-temperature variant; identical to sme_step at n_T = 0, eta_c = 1.
SmeStepResult thermal_sme_step(const Matrix& rho, const Generator& gen,
                               std::span<const double> dw, double dt);

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<double> gamma_t;
    std::vector<double> stored_energy;
    std::vector<std::vector<double>> homodyne;  // per site, when recorded
    bool flagged = false;                       // step-halving budget exhausted
};

struct EnsembleOptions {
    int record_stride = 100;
    bool parallel = true;        // OpenMP over trajectories; serial path is the reference
    bool record_homodyne = false;
    bool zero_noise = false;     // test hook: dw stream identically 0
    int substeps = 4;            // internal substeps per nominal step (weak-bias control)
    int max_halvings = 4;
};

struct EnsembleResult {
    std::vector<TrajectoryRecord> trajectories;
    std::vector<double> gamma_t;
    std::vector<double> mean;        // over non-flagged trajectories, fixed index order
    std::vector<double> std_error;
    int flagged_count = 0;
};

/// Ensemble of stochastic charging trajectories. Trajectory i is driven by
/// NoiseStream(base_seed + i); results are deterministic for fixed seeds
/// regardless of thread count.
EnsembleResult run_ensemble(const Matrix& rho0, const ChainSpec& chain, const ControlSpec& ctrl,
                            double t_final_gamma, double dt_gamma, int n_traj,
                            std::uint64_t base_seed, const EnsembleOptions& opts = {});

}  // namespace qbatt

#endif

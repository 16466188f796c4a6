#include "qbatt/trajectories.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qbatt/operators.hpp"

namespace qbatt {

double homodyne_current(const Matrix& rho, int site, const ControlSpec& ctrl, double dw,
                        double dt) {
    ctrl.validate();
    if (!(ctrl.eta() > 0.0))
        throw ValidationError("homodyne_current: eta must be > 0");
    const int n = static_cast<int>(std::log2(static_cast<double>(rho.rows())) + 0.5);
    Matrix sx = build_pauli(site, PauliAxis::X, n);
    double mean = (sx * rho).trace().real();
    return mean + (dw / dt) / std::sqrt(ctrl.eta() * ctrl.decay);
}

namespace {

// One conditional step of the diffusive stochastic master equation.
//
// The update composes completely positive maps so eigenvalues cannot leave
// the positive cone by O(dt) amounts that accumulate over a run (a raw
// Euler-Maruyama update does exactly that near pure states):
//
//   rho' = V [ U ( M rho_h M^+ + completion terms ) U^+ ] V^+ ,  rho_h = V rho V^+
//   V    = exp(-i H dt / 2)                          (split-step propagator)
//   M    = prod_j [ 1 - ((Gd/2) s_j^+ s_j + (Gu/2) s_j s_j^+) dt
//                     + sqrt(eta*G) dy_j s_j ]       (commuting site factors)
//   dy_j = dw_j + sqrt(eta*G) <x_j> dt
//   completion terms = sum_j [(Gd - eta*G) dt s_j rho_h s_j^+ + Gu dt s_j^+ rho_h s_j]
//   U_j  = exp(-i F_j theta_j),
//   theta_j = <x_j> dt + atan(sqrt(eta*G) dw_j / (1 - Gd dt/2)) / (eta*G)
//
// where Gd = G*(eta_c + (1-eta_c)(1+n_T)) and Gu = G*(1-eta_c)*n_T are the
// total downward/upward rates, s_j is the lowering operator, <x_j> = <sx_j>.
// Expanding the composition reproduces the Ito stochastic master equation to
// O(dt). The symmetric Hamiltonian split makes the weak error O(dt^2), and
// the product Kraus form plus the arctan angle make the fully charged pure
// state an exact fixed point of the discrete map whenever it is one of the
// continuous equation (perfect detection, optimal feedback), so late-time
// trajectory statistics collapse onto the correct value instead of a biased
// one. The feedback unitary has the closed form cos(f*theta) - i sin(f*theta)
// F_j / f because F_j^2 = f^2 * identity.
SmeStepResult em_step(const Matrix& rho, const Generator& gen, std::span<const double> dw,
                      double dt) {
    if (static_cast<int>(dw.size()) != gen.chain().n_sites)
        throw ValidationError("sme_step: one Wiener increment per site required");
    const ControlSpec& ctrl = gen.ctrl();
    const int n_sites = gen.chain().n_sites;
    const double g = ctrl.decay;
    const double eg = ctrl.eta() * g;
    const double rate_down = g * (ctrl.eta_c + (1.0 - ctrl.eta_c) * (1.0 + ctrl.n_thermal));
    const double rate_up = g * (1.0 - ctrl.eta_c) * ctrl.n_thermal;
    const Complex i(0.0, 1.0);

    const Matrix& v = gen.half_step_propagator(dt);
    Matrix half = v * rho * v.adjoint();

    std::vector<double> mean_x(n_sites);
    for (int j = 1; j <= n_sites; ++j) {
        const Matrix& low = gen.lowering(j);
        mean_x[j - 1] = (half * (low + low.adjoint())).trace().real();
    }

    // Product of commuting single-site Kraus factors: at the fully charged
    // pure state the post-measurement state then factorizes exactly per site,
    // which lets the feedback rotation below undo the measurement kick
    // exactly there (the continuous equation leaves that state invariant
    // pathwise, so the discrete map should too).
    Matrix kraus = Matrix::Identity(rho.rows(), rho.cols());
    std::vector<double> dy(n_sites, 0.0);
    for (int j = 1; j <= n_sites; ++j) {
        const Matrix& low = gen.lowering(j);
        Matrix factor = Matrix::Identity(rho.rows(), rho.cols()) -
                        0.5 * rate_down * dt * (low.adjoint() * low);
        if (rate_up != 0.0) factor -= 0.5 * rate_up * dt * (low * low.adjoint());
        if (eg > 0.0) {
            dy[j - 1] = dw[j - 1] + std::sqrt(eg) * mean_x[j - 1] * dt;
            factor += std::sqrt(eg) * dy[j - 1] * low;
        }
        kraus = (kraus * factor).eval();
    }
    Matrix next = kraus * half * kraus.adjoint();
    for (int j = 1; j <= n_sites; ++j) {
        const Matrix& low = gen.lowering(j);
        if (rate_down > eg) next += (rate_down - eg) * dt * (low * half * low.adjoint());
        if (rate_up != 0.0) next += rate_up * dt * (low.adjoint() * half * low);
    }

    if (ctrl.feedback != 0.0) {
        const double f = ctrl.feedback;
        for (int j = 1; j <= n_sites; ++j) {
            // Noise part of the angle: arctan of the per-site amplitude ratio
            // produced by the Kraus factor; equals dw/sqrt(eta G) + O(dt^{3/2}).
            const double ratio =
                std::sqrt(eg) * dw[j - 1] / (1.0 - 0.5 * rate_down * dt);
            const double theta = mean_x[j - 1] * dt + std::atan(ratio) / eg;
            Matrix u = std::cos(f * theta) * Matrix::Identity(rho.rows(), rho.cols()) -
                       i * (std::sin(f * theta) / f) * gen.feedback_op(j);
            next = u * next * u.adjoint();
        }
    }

    next = (v * next * v.adjoint()).eval();
    next = 0.5 * (next + next.adjoint()).eval();
    next /= next.trace().real();

    Eigen::SelfAdjointEigenSolver<Matrix> es(next, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-4) return SmeStepResult{rho, false};
    return SmeStepResult{std::move(next), true};
}

}  // namespace

SmeStepResult sme_step(const Matrix& rho, const Generator& gen, std::span<const double> dw,
                       double dt) {
    if (gen.ctrl().n_thermal != 0.0)
        throw ValidationError("sme_step: n_T must be 0 (use thermal_sme_step)");
    return em_step(rho, gen, dw, dt);
}

SmeStepResult thermal_sme_step(const Matrix& rho, const Generator& gen,
                               std::span<const double> dw, double dt) {
    return em_step(rho, gen, dw, dt);
}

namespace {

TrajectoryRecord run_one(const Matrix& rho0, const Generator& gen, const Matrix& h,
                         double t_final_gamma, double dt_gamma, std::uint64_t seed,
                         const EnsembleOptions& opts) {
    const ChainSpec& chain = gen.chain();
    const ControlSpec& ctrl = gen.ctrl();
    NoiseStream noise(seed);
    const double dt = dt_gamma / ctrl.decay;  // physical time step
    const long n_steps = static_cast<long>(std::ceil(t_final_gamma / dt_gamma - 1e-12));
    const double e0 = (h * rho0).trace().real();

    TrajectoryRecord rec;
    rec.seed = seed;
    if (opts.record_homodyne) rec.homodyne.resize(chain.n_sites);

    Matrix rho = rho0;
    std::vector<double> dw(chain.n_sites);

    auto record = [&](long step) {
        rec.gamma_t.push_back(step * dt_gamma);
        rec.stored_energy.push_back((h * rho).trace().real() - e0);
        if (opts.record_homodyne) {
            for (int j = 1; j <= chain.n_sites; ++j) {
                double inc = opts.zero_noise ? 0.0 : noise.wiener(j, step, dt, 0);
                rec.homodyne[j - 1].push_back(homodyne_current(rho, j, ctrl, inc, dt));
            }
        }
    };
    record(0);

    // Each nominal step is taken as opts.substeps internal substeps. A
    // rejected substep halves this trajectory's internal dt permanently: at
    // halving level L the step uses n_sub = substeps * 2^L increments indexed
    // by (site, step, n_sub + k), keeping the stream deterministic and
    // non-overlapping across levels.
    int level = 0;
    const int base_sub = std::max(1, opts.substeps);
    for (long s = 1; s <= n_steps && !rec.flagged; ++s) {
        for (;;) {
            const int n_sub = base_sub << level;
            const double dts = dt / n_sub;
            Matrix sub_rho = rho;
            bool accepted = true;
            for (int k = 0; k < n_sub && accepted; ++k) {
                for (int j = 0; j < chain.n_sites; ++j)
                    dw[j] = opts.zero_noise
                                ? 0.0
                                : noise.wiener(j + 1, s, dts,
                                               static_cast<std::uint32_t>(n_sub + k));
                SmeStepResult sub = em_step(sub_rho, gen, dw, dts);
                accepted = sub.accepted;
                sub_rho = std::move(sub.rho);
            }
            if (accepted) {
                rho = std::move(sub_rho);
                break;
            }
            if (level >= opts.max_halvings) {
                rec.flagged = true;
                break;
            }
            ++level;
        }
        if (!rec.flagged && (s % opts.record_stride == 0 || s == n_steps)) record(s);
    }
    return rec;
}

}  // namespace

EnsembleResult run_ensemble(const Matrix& rho0, const ChainSpec& chain, const ControlSpec& ctrl,
                            double t_final_gamma, double dt_gamma, int n_traj,
                            std::uint64_t base_seed, const EnsembleOptions& opts) {
    if (n_traj < 1) throw ValidationError("run_ensemble: n_traj must be >= 1");
    Generator gen(chain, ctrl);
    const Matrix h = gen.hamiltonian();

    EnsembleResult res;
    res.trajectories.resize(n_traj);

    if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n_traj; ++i)
            res.trajectories[i] =
                run_one(rho0, gen, h, t_final_gamma, dt_gamma, base_seed + i, opts);
    } else {
        for (int i = 0; i < n_traj; ++i)
            res.trajectories[i] =
                run_one(rho0, gen, h, t_final_gamma, dt_gamma, base_seed + i, opts);
    }

    // Merge in fixed trajectory-index order.
    std::size_t n_points = 0;
    for (const auto& t : res.trajectories)
        if (!t.flagged) n_points = std::max(n_points, t.gamma_t.size());
    for (const auto& t : res.trajectories) {
        if (!t.flagged && t.gamma_t.size() == n_points) {
            res.gamma_t = t.gamma_t;
            break;
        }
    }
    res.mean.assign(n_points, 0.0);
    res.std_error.assign(n_points, 0.0);
    int m = 0;
    for (const auto& t : res.trajectories) {
        if (t.flagged) {
            ++res.flagged_count;
            continue;
        }
        ++m;
        for (std::size_t k = 0; k < n_points; ++k) res.mean[k] += t.stored_energy[k];
    }
    if (m == 0) throw NumericalError("run_ensemble: every trajectory was flagged");
    for (auto& v : res.mean) v /= m;
    if (m > 1) {
        for (const auto& t : res.trajectories) {
            if (t.flagged) continue;
            for (std::size_t k = 0; k < n_points; ++k) {
                double d = t.stored_energy[k] - res.mean[k];
                res.std_error[k] += d * d;
            }
        }
        for (auto& v : res.std_error) v = std::sqrt(v / (m - 1)) / std::sqrt(double(m));
    }
    return res;
}

}  // namespace qbatt

#include "qbatt/dynamics.hpp"

#include <cmath>

#include "qbatt/operators.hpp"

namespace qbatt {

Matrix dissipator(const Matrix& o, const Matrix& rho) {
    if (o.rows() != rho.rows())
        throw ValidationError("dissipator: dimension mismatch");
    Matrix odo = o.adjoint() * o;
    return o * rho * o.adjoint() - 0.5 * (odo * rho + rho * odo);
}

Generator::Generator(const ChainSpec& chain, const ControlSpec& ctrl)
    : chain_(chain), ctrl_(ctrl) {
    chain.validate();
    ctrl.validate();
    h_ = build_battery_hamiltonian(chain);
    for (int j = 1; j <= chain.n_sites; ++j) {
        lowering_.push_back(build_pauli(j, PauliAxis::Minus, chain.n_sites));
        raising_.push_back(build_pauli(j, PauliAxis::Plus, chain.n_sites));
        feedback_.push_back(build_feedback_operator(j, ctrl, chain.n_sites));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_);
    h_eigenvalues_ = es.eigenvalues();
    h_eigenvectors_ = es.eigenvectors();
}

const Matrix& Generator::half_step_propagator(double dt) const {
    std::lock_guard<std::mutex> lock(propagator_mutex_);
    auto it = propagator_cache_.find(dt);
    if (it != propagator_cache_.end()) return it->second;
    const Complex i(0.0, 1.0);
    Vector phases = (-i * 0.5 * dt * h_eigenvalues_.cast<Complex>().array()).exp();
    Matrix v = h_eigenvectors_ * phases.asDiagonal() * h_eigenvectors_.adjoint();
    return propagator_cache_.emplace(dt, std::move(v)).first->second;
}

Matrix Generator::rhs(const Matrix& rho) const {
    if (rho.rows() != h_.rows())
        throw ValidationError("Generator::rhs: dimension mismatch");
    const Complex i(0.0, 1.0);
    const double g = ctrl_.decay;

    Matrix out = -i * (h_ * rho - rho * h_);

    const double down_rate = g * (ctrl_.eta_c + (1.0 - ctrl_.eta_c) * (1.0 + ctrl_.n_thermal));
    const double up_rate = g * (1.0 - ctrl_.eta_c) * ctrl_.n_thermal;
    for (int j = 0; j < chain_.n_sites; ++j) {
        out += down_rate * dissipator(lowering_[j], rho);
        if (up_rate != 0.0) out += up_rate * dissipator(raising_[j], rho);
    }

    if (ctrl_.feedback != 0.0) {
        const double back_action = 1.0 / (2.0 * ctrl_.eta() * g);
        for (int j = 0; j < chain_.n_sites; ++j) {
            const Matrix& f = feedback_[j];
            Matrix drive = lowering_[j] * rho + rho * raising_[j];
            out += -i * (f * drive - drive * f);
            Matrix inner = f * rho - rho * f;
            out += -back_action * (f * inner - inner * f);
        }
    }
    return out;
}

Matrix feedback_me_rhs(const Matrix& rho, const ChainSpec& chain, const ControlSpec& ctrl) {
    if (ctrl.n_thermal != 0.0)
        throw ValidationError("feedback_me_rhs: n_T must be 0 (use thermal_me_rhs)");
    return Generator(chain, ctrl).rhs(rho);
}

Matrix thermal_me_rhs(const Matrix& rho, const ChainSpec& chain, const ControlSpec& ctrl) {
    return Generator(chain, ctrl).rhs(rho);
}

namespace {

Matrix rk4_step(const Generator& gen, const Matrix& rho, double dt) {
    Matrix k1 = gen.rhs(rho);
    Matrix k2 = gen.rhs(rho + 0.5 * dt * k1);
    Matrix k3 = gen.rhs(rho + 0.5 * dt * k2);
    Matrix k4 = gen.rhs(rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double min_eigenvalue(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace

EvolutionResult evolve(const Matrix& rho0, const ChainSpec& chain, const ControlSpec& ctrl,
                       double t_final_gamma, double dt_gamma, const EvolveOptions& opts) {
    if (hermiticity_defect(rho0) > 1e-10)
        throw ValidationError("evolve: initial state is not Hermitian");
    if (std::abs(rho0.trace().real() - 1.0) > 1e-10)
        throw ValidationError("evolve: initial state trace must be 1");
    if (!(dt_gamma > 0.0) || !(t_final_gamma > 0.0))
        throw ValidationError("evolve: time step and horizon must be > 0");

    Generator gen(chain, ctrl);
    const Matrix h = gen.hamiltonian();
    const double dt_phys_scale = 1.0 / ctrl.decay;  // gamma-time -> physical time

    double dt = dt_gamma;
    for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
        EvolutionResult res;
        res.used_dt_gamma = dt;
        const long n_steps = static_cast<long>(std::ceil(t_final_gamma / dt - 1e-12));
        Matrix rho = rho0;
        bool violated = false;

        auto record = [&](long step) {
            res.gamma_t.push_back(step * dt);
            res.states.push_back(rho);
            res.metrics.push_back(compute_metrics(rho, rho0, h));
        };
        record(0);

        for (long s = 1; s <= n_steps; ++s) {
            rho = rk4_step(gen, rho, dt * dt_phys_scale);
            rho = 0.5 * (rho + rho.adjoint()).eval();
            res.trace_drift = std::max(res.trace_drift, std::abs(rho.trace().real() - 1.0));
            if (s % opts.record_stride == 0 || s == n_steps) {
                if (min_eigenvalue(rho) < opts.positivity_floor) {
                    violated = true;
                    break;
                }
                record(s);
            }
        }
        if (!violated) return res;
        dt *= 0.5;
    }
    throw NumericalError("evolve: positivity violation persisted after step refinement");
}

Matrix build_liouvillian(const ChainSpec& chain, const ControlSpec& ctrl) {
    Generator gen(chain, ctrl);
    const long d = gen.dim();
    Matrix liou(d * d, d * d);
    Matrix basis = Matrix::Zero(d, d);
    for (long j = 0; j < d; ++j) {
        for (long i = 0; i < d; ++i) {
            basis(i, j) = 1.0;
            Matrix col = gen.rhs(basis);
            basis(i, j) = 0.0;
            liou.col(j * d + i) = Eigen::Map<Vector>(col.data(), d * d);
        }
    }
    return liou;
}

namespace {

// The generator maps Hermitian operators to Hermitian operators, so in an
// orthonormal Hermitian operator basis it is a real d^2 x d^2 matrix with the
// same spectrum as the complex Liouvillian. Coordinates: the d diagonal
// entries, then (sqrt(2) Re a_ij, sqrt(2) Im a_ij) for each pair i < j.

Eigen::VectorXd hermitian_coords(const Matrix& a) {
    const long d = a.rows();
    Eigen::VectorXd c(d * d);
    for (long i = 0; i < d; ++i) c(i) = a(i, i).real();
    long k = d;
    const double s = std::sqrt(2.0);
    for (long i = 0; i < d; ++i) {
        for (long j = i + 1; j < d; ++j) {
            c(k++) = s * a(i, j).real();
            c(k++) = s * a(i, j).imag();
        }
    }
    return c;
}

Matrix hermitian_from_coords(const Eigen::VectorXd& c, long d) {
    Matrix a(d, d);
    for (long i = 0; i < d; ++i) a(i, i) = c(i);
    long k = d;
    const double s = 1.0 / std::sqrt(2.0);
    for (long i = 0; i < d; ++i) {
        for (long j = i + 1; j < d; ++j) {
            Complex v(s * c(k), s * c(k + 1));
            k += 2;
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    return a;
}

Eigen::MatrixXd build_real_generator(const Generator& gen) {
    const long d = gen.dim();
    const long n = d * d;
    Eigen::MatrixXd rep(n, n);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    for (long k = 0; k < n; ++k) {
        unit(k) = 1.0;
        rep.col(k) = hermitian_coords(gen.rhs(hermitian_from_coords(unit, d)));
        unit(k) = 0.0;
    }
    return rep;
}

/// Replace the first row with the trace functional and solve R x = e_1.
Matrix trace_constrained_solve(const Eigen::MatrixXd& rep, long d) {
    Eigen::MatrixXd a = rep;
    a.row(0).setZero();
    a.row(0).head(d).setOnes();  // trace = sum of the diagonal coordinates
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d * d);
    b(0) = 1.0;
    Eigen::VectorXd x = a.partialPivLu().solve(b);
    Matrix rho = hermitian_from_coords(x, d);
    double tr = rho.trace().real();
    if (std::abs(tr) < 1e-12)
        throw NumericalError("steady_state: trace-constrained solve degenerated");
    return rho / tr;
}

/// Count eigenvalue moduli below tol from the real Schur quasi-triangular
/// form (1x1 blocks are real eigenvalues, 2x2 blocks complex pairs with
/// |lambda|^2 = det).
int null_count(const Eigen::MatrixXd& t, double tol) {
    const long n = t.rows();
    int count = 0;
    long k = 0;
    while (k < n) {
        if (k + 1 < n && t(k + 1, k) != 0.0) {
            double det = t(k, k) * t(k + 1, k + 1) - t(k, k + 1) * t(k + 1, k);
            if (std::sqrt(std::max(det, 0.0)) < tol) count += 2;
            k += 2;
        } else {
            if (std::abs(t(k, k)) < tol) ++count;
            ++k;
        }
    }
    return count;
}

}  // namespace

SteadyStateResult steady_state(const ChainSpec& chain, const ControlSpec& ctrl) {
    Generator gen(chain, ctrl);
    const long d = gen.dim();
    const double tol = 1e-9 * ctrl.decay;
    Eigen::MatrixXd rep = build_real_generator(gen);

    SteadyStateResult res;
    if (d * d <= 1024) {
        Eigen::RealSchur<Eigen::MatrixXd> schur(rep, /*computeU=*/false);
        if (schur.info() != Eigen::Success)
            throw NumericalError("steady_state: Liouvillian Schur decomposition failed");
        res.null_multiplicity = null_count(schur.matrixT(), tol);
        if (res.null_multiplicity > 1) {
            // Degenerate null space: the zero-mode choice is ambiguous, so
            // integrate from the maximally mixed state instead.
            Matrix mixed = Matrix::Identity(d, d) / static_cast<double>(d);
            EvolveOptions opts;
            opts.record_stride = 1000;
            EvolutionResult ev = evolve(mixed, chain, ctrl, 400.0, 1e-2, opts);
            res.rho = ev.states.back();
            res.via_integration = true;
            res.residual = gen.rhs(res.rho).norm();
            return res;
        }
        res.rho = trace_constrained_solve(rep, d);
        res.residual = gen.rhs(res.rho).norm();
    } else {
        res.rho = trace_constrained_solve(rep, d);
        res.residual = gen.rhs(res.rho).norm();
        res.multiplicity_checked = false;
    }

    if (res.residual >= tol)
        throw NumericalError("steady_state: stationarity residual above tolerance");
    return res;
}

}  // namespace qbatt

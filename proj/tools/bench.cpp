// Timing comparison of the serial reference paths against the OpenMP kernels
// for trajectory ensembles and steady-state grid sweeps.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qbatt/operators.hpp"
#include "qbatt/sweeps.hpp"
#include "qbatt/trajectories.hpp"

using namespace qbatt;

namespace {

template <typename F>
double time_s(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled\n");
#endif

    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    ControlSpec ctrl;
    ctrl.feedback = 1.0;
    ctrl.alpha = kPi;
    Matrix rho0 = ground_state_density(chain);

    EnsembleOptions serial_opts;
    serial_opts.parallel = false;
    EnsembleOptions par_opts;

    double t_serial = time_s([&] {
        run_ensemble(rho0, chain, ctrl, 10.0, 1e-3, 64, 7, serial_opts);
    });
    double t_parallel = time_s([&] {
        run_ensemble(rho0, chain, ctrl, 10.0, 1e-3, 64, 7, par_opts);
    });
    std::printf("ensemble (64 traj, N=2): serial %.3fs, openmp %.3fs, speedup %.2fx\n", t_serial,
                t_parallel, t_serial / t_parallel);

    ChainSpec chain4{4, 1.0, 1.0, 0.0, 1.0};
    Axis alpha_axis{"alpha", -kPi, kPi, 9};
    Axis chi_axis{"chi", 0.0, 2.0, 9};
    SweepOptions sw_serial;
    sw_serial.parallel = false;
    SweepOptions sw_par;

    double s_serial = time_s([&] {
        grid_sweep(chain4, ctrl, alpha_axis, chi_axis, Metric::StoredEnergy, sw_serial);
    });
    double s_parallel = time_s([&] {
        grid_sweep(chain4, ctrl, alpha_axis, chi_axis, Metric::StoredEnergy, sw_par);
    });
    std::printf("sweep (9x9 grid, N=4): serial %.3fs, openmp %.3fs, speedup %.2fx\n", s_serial,
                s_parallel, s_serial / s_parallel);
    return 0;
}

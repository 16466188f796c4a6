#ifndef QBATT_SWEEPS_HPP
#define QBATT_SWEEPS_HPP

#include <functional>
#include <string>
#include <vector>

#include "qbatt/dynamics.hpp"
#include "qbatt/types.hpp"

namespace qbatt {

enum class Metric { StoredEnergy, Ergotropy, Utilization, Ratio, TopPopulation };
enum class InitState { Ground, AllDown, MaximallyMixed };

std::string metric_name(Metric m);
Metric parse_metric(const std::string& name);
InitState parse_init(const std::string& name);

/// Metric evaluated at the steady state for the given control parameters.
double steady_metric(const ChainSpec& chain, const ControlSpec& ctrl, Metric metric,
                     InitState init);

struct Axis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    double at(int k) const {
        return count <= 1 ? min : min + (max - min) * k / double(count - 1);
    }
};

struct SweepSurface {
    Axis alpha_axis;
    Axis chi_axis;
    Metric metric = Metric::StoredEnergy;
    std::vector<std::vector<double>> values;  // [alpha index][chi index], NaN on failure
    std::vector<std::pair<int, int>> argmax;  // all grid points within 1e-9 of the max
    double max_value = 0.0;
};

struct SweepOptions {
    InitState init = InitState::Ground;
    bool parallel = true;  // OpenMP over grid points; serial path is the reference
};

/// Steady-state metric over an (alpha, chi) grid with argmax metadata.
SweepSurface grid_sweep(const ChainSpec& chain, const ControlSpec& ctrl_template,
                        const Axis& alpha_axis, const Axis& chi_axis, Metric metric,
                        const SweepOptions& opts = {});

/// Golden-section maximization of f over [lo, hi] to |dx| < tol. The bracket
/// is first scanned coarsely so a non-unimodal objective still lands in the
/// right basin.
std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo,
                                             double hi, double tol = 1e-4, int coarse_points = 41);

struct ChiOptimum {
    double chi = 0.0;
    double value = 0.0;
    bool feedback_ineffective = false;  // chi = 0 is at least as good as any chi > 0
};

/// Maximizes the steady-state metric over chi in [0, 5] at fixed alpha.
ChiOptimum optimize_chi(const ChainSpec& chain, const ControlSpec& ctrl_template, Metric metric,
                        InitState init = InitState::Ground, double chi_hi = 5.0);

/// Bisection for the coupling J_c where the optimal-feedback metric stops
/// beating the feedback-off metric. Requires a sign change over the bracket.
double find_critical_j(ChainSpec chain, const ControlSpec& ctrl_template, Metric metric,
                       double j_lo, double j_hi, InitState init = InitState::Ground,
                       double tol = 1e-3);

struct ScanRow {
    double x = 0.0;
    double chi_opt = 0.0;
    bool feedback_ineffective = false;
    bool failed = false;
    std::vector<double> metrics;
};

struct ScanTable {
    std::string axis_name;
    std::vector<Metric> metrics;
    std::vector<ScanRow> rows;
};

/// 1-D scan over one of {J, gamma, n_T, Gamma, eta}; chi is re-optimized per
/// point when reoptimize_chi is set, otherwise taken from the template.
ScanTable scan_1d(ChainSpec chain, ControlSpec ctrl_template, const std::string& axis_name,
                  const Axis& axis, const std::vector<Metric>& metrics, bool reoptimize_chi,
                  InitState init = InitState::Ground, bool parallel = true);

}  // namespace qbatt

#endif

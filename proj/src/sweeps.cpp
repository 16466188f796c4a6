#include "qbatt/sweeps.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "qbatt/metrics.hpp"
#include "qbatt/operators.hpp"

namespace qbatt {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::StoredEnergy: return "stored_energy";
        case Metric::Ergotropy: return "ergotropy";
        case Metric::Utilization: return "utilization";
        case Metric::Ratio: return "ratio";
        case Metric::TopPopulation: return "top_population";
    }
    return "?";
}

Metric parse_metric(const std::string& name) {
    if (name == "stored_energy") return Metric::StoredEnergy;
    if (name == "ergotropy") return Metric::Ergotropy;
    if (name == "utilization") return Metric::Utilization;
    if (name == "ratio") return Metric::Ratio;
    if (name == "top_population") return Metric::TopPopulation;
    throw ValidationError("unknown metric: " + name);
}

InitState parse_init(const std::string& name) {
    if (name == "ground") return InitState::Ground;
    if (name == "down") return InitState::AllDown;
    if (name == "mixed") return InitState::MaximallyMixed;
    throw ValidationError("unknown initial state: " + name);
}

namespace {

Matrix initial_density(const ChainSpec& chain, InitState init) {
    switch (init) {
        case InitState::Ground: return ground_state_density(chain);
        case InitState::AllDown: return pure_density(all_down_state(chain.n_sites));
        case InitState::MaximallyMixed:
            return Matrix::Identity(chain.dim(), chain.dim()) / double(chain.dim());
    }
    throw ValidationError("unknown initial state");
}

double evaluate_metric(const Matrix& rho_inf, const Matrix& rho0, const Matrix& h,
                       Metric metric) {
    switch (metric) {
        case Metric::StoredEnergy: return stored_energy(rho_inf, rho0, h);
        case Metric::Ergotropy: return ergotropy(rho_inf, h);
        case Metric::Utilization:
            return utilization(stored_energy(rho_inf, rho0, h), capacity(h));
        case Metric::Ratio: {
            double de = stored_energy(rho_inf, rho0, h);
            if (std::abs(de) < 1e-12) return std::numeric_limits<double>::quiet_NaN();
            return ergotropy(rho_inf, h) / de;
        }
        case Metric::TopPopulation: return rho_inf(0, 0).real();
    }
    throw ValidationError("unknown metric");
}

}  // namespace

double steady_metric(const ChainSpec& chain, const ControlSpec& ctrl, Metric metric,
                     InitState init) {
    Matrix h = build_battery_hamiltonian(chain);
    Matrix rho0 = initial_density(chain, init);
    SteadyStateResult ss = steady_state(chain, ctrl);
    return evaluate_metric(ss.rho, rho0, h, metric);
}

SweepSurface grid_sweep(const ChainSpec& chain, const ControlSpec& ctrl_template,
                        const Axis& alpha_axis, const Axis& chi_axis, Metric metric,
                        const SweepOptions& opts) {
    SweepSurface surf;
    surf.alpha_axis = alpha_axis;
    surf.chi_axis = chi_axis;
    surf.metric = metric;
    surf.values.assign(alpha_axis.count, std::vector<double>(chi_axis.count, 0.0));

    Matrix h = build_battery_hamiltonian(chain);
    Matrix rho0 = initial_density(chain, opts.init);

    const long total = long(alpha_axis.count) * chi_axis.count;
    auto eval_point = [&](long idx) {
        const int ia = int(idx / chi_axis.count);
        const int ic = int(idx % chi_axis.count);
        ControlSpec ctrl = ctrl_template;
        ctrl.alpha = alpha_axis.at(ia);
        ctrl.feedback = chi_axis.at(ic) * ctrl.decay;
        double v;
        try {
            SteadyStateResult ss = steady_state(chain, ctrl);
            v = evaluate_metric(ss.rho, rho0, h, metric);
        } catch (const NumericalError&) {
            v = std::numeric_limits<double>::quiet_NaN();
        }
        surf.values[ia][ic] = v;
    };

    if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long idx = 0; idx < total; ++idx) eval_point(idx);
    } else {
        for (long idx = 0; idx < total; ++idx) eval_point(idx);
    }

    surf.max_value = -std::numeric_limits<double>::infinity();
    for (int ia = 0; ia < alpha_axis.count; ++ia)
        for (int ic = 0; ic < chi_axis.count; ++ic)
            if (std::isfinite(surf.values[ia][ic]))
                surf.max_value = std::max(surf.max_value, surf.values[ia][ic]);
    for (int ia = 0; ia < alpha_axis.count; ++ia)
        for (int ic = 0; ic < chi_axis.count; ++ic)
            if (std::isfinite(surf.values[ia][ic]) &&
                surf.values[ia][ic] >= surf.max_value - 1e-9)
                surf.argmax.emplace_back(ia, ic);
    if (surf.argmax.empty())
        throw NumericalError("grid_sweep: every grid point failed");
    return surf;
}

std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo,
                                             double hi, double tol, int coarse_points) {
    if (!(hi > lo)) throw ValidationError("golden_section_max: empty bracket");
    // Coarse scan to locate the basin of the maximum.
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < coarse_points; ++k) {
        double x = lo + (hi - lo) * k / double(coarse_points - 1);
        double v = f(x);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    double a = lo + (hi - lo) * std::max(0, best - 1) / double(coarse_points - 1);
    double b = lo + (hi - lo) * std::min(coarse_points - 1, best + 1) / double(coarse_points - 1);

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

ChiOptimum optimize_chi(const ChainSpec& chain, const ControlSpec& ctrl_template, Metric metric,
                        InitState init, double chi_hi) {
    auto objective = [&](double chi) {
        ControlSpec ctrl = ctrl_template;
        ctrl.feedback = chi * ctrl.decay;
        return steady_metric(chain, ctrl, metric, init);
    };
    const double at_zero = objective(0.0);
    auto [chi, value] = golden_section_max(objective, 0.0, chi_hi);
    ChiOptimum res;
    if (value <= at_zero + 1e-12) {
        res.chi = 0.0;
        res.value = at_zero;
        res.feedback_ineffective = true;
    } else {
        res.chi = chi;
        res.value = value;
    }
    return res;
}

double find_critical_j(ChainSpec chain, const ControlSpec& ctrl_template, Metric metric,
                       double j_lo, double j_hi, InitState init, double tol) {
    auto gain = [&](double j) {
        chain.coupling = j;
        ControlSpec off = ctrl_template;
        off.feedback = 0.0;
        double base = steady_metric(chain, off, metric, init);
        ChiOptimum opt = optimize_chi(chain, ctrl_template, metric, init);
        return opt.value - base;
    };
    double g_lo = gain(j_lo);
    double g_hi = gain(j_hi);
    if (g_lo * g_hi > 0.0)
        throw NumericalError("find_critical_j: no sign change in bracket (gain at lo = " +
                             std::to_string(g_lo) + ", at hi = " + std::to_string(g_hi) + ")");
    const double tol_abs = tol * chain.field;
    while (j_hi - j_lo > tol_abs) {
        double mid = 0.5 * (j_lo + j_hi);
        double g_mid = gain(mid);
        if (g_lo * g_mid > 0.0) {
            j_lo = mid;
            g_lo = g_mid;
        } else {
            j_hi = mid;
        }
    }
    return 0.5 * (j_lo + j_hi);
}

ScanTable scan_1d(ChainSpec chain, ControlSpec ctrl_template, const std::string& axis_name,
                  const Axis& axis, const std::vector<Metric>& metrics, bool reoptimize_chi,
                  InitState init, bool parallel) {
    static const std::set<std::string> kAxes = {"j", "gamma", "nt", "gamma_rate", "eta"};
    if (!kAxes.count(axis_name)) throw ValidationError("scan_1d: unknown axis " + axis_name);

    ScanTable table;
    table.axis_name = axis_name;
    table.metrics = metrics;
    table.rows.resize(axis.count);

    auto eval_point = [&](int k) {
        ChainSpec c = chain;
        ControlSpec ctrl = ctrl_template;
        double x = axis.at(k);
        if (axis_name == "j") c.coupling = x;
        else if (axis_name == "gamma") c.gamma = x;
        else if (axis_name == "nt") ctrl.n_thermal = x;
        else if (axis_name == "gamma_rate") ctrl.decay = x;
        else if (axis_name == "eta") { ctrl.eta_d = x; ctrl.eta_c = 1.0; }

        ScanRow row;
        row.x = x;
        try {
            if (reoptimize_chi) {
                ChiOptimum opt = optimize_chi(c, ctrl, metrics.front(), init);
                row.chi_opt = opt.chi;
                row.feedback_ineffective = opt.feedback_ineffective;
                ctrl.feedback = opt.chi * ctrl.decay;
            } else {
                row.chi_opt = ctrl.chi();
            }
            Matrix h = build_battery_hamiltonian(c);
            Matrix rho0 = initial_density(c, init);
            SteadyStateResult ss = steady_state(c, ctrl);
            for (Metric m : metrics)
                row.metrics.push_back(evaluate_metric(ss.rho, rho0, h, m));
        } catch (const NumericalError&) {
            row.failed = true;
            row.metrics.assign(metrics.size(), std::numeric_limits<double>::quiet_NaN());
        }
        table.rows[k] = std::move(row);
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < axis.count; ++k) eval_point(k);
    } else {
        for (int k = 0; k < axis.count; ++k) eval_point(k);
    }
    return table;
}

}  // namespace qbatt

// qbatt: spin-chain battery charging simulations under homodyne feedback.
// Subcommands: hamiltonian, evolve, steady, traj, sweep, scan, critical-j.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "qbatt/config.hpp"
#include "qbatt/dynamics.hpp"
#include "qbatt/metrics.hpp"
#include "qbatt/operators.hpp"
#include "qbatt/oracles.hpp"
#include "qbatt/sweeps.hpp"
#include "qbatt/trajectories.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Options {
    // chain
    std::string n = "2", h = "1", j = "0", gamma = "0", delta = "1";
    // control
    std::string alpha = "pi", chi = "", f = "", gamma_rate = "1";
    std::string eta = "", eta_d = "1", eta_c = "1", nt = "0";
    // run
    std::string init = "ground", tfinal = "20", dt = "0.01", stride = "10";
    std::string num = "200", seed = "1";
    std::string metric = "stored_energy";
    std::string alpha_min = "-pi", alpha_max = "pi", alpha_count = "101";
    std::string chi_min = "0", chi_max = "2", chi_count = "101";
    std::string axis = "j", x_min = "0", x_max = "1", x_count = "11";
    std::string optimize = "0", serial = "0", homodyne = "0";
    std::string out;
    std::string config_path;
};

struct Entry {
    const char* key;
    std::string Options::*field;
    const char* help;
};

const std::vector<Entry> kChainEntries = {
    {"n", &Options::n, "number of spins N"},
    {"h", &Options::h, "field strength h"},
    {"j", &Options::j, "spin-spin coupling J"},
    {"gamma", &Options::gamma, "anisotropy gamma"},
    {"delta", &Options::delta, "anisotropy delta"},
};

const std::vector<Entry> kControlEntries = {
    {"alpha", &Options::alpha, "feedback angle (radians, 'pi' accepted)"},
    {"chi", &Options::chi, "dimensionless feedback strength f/Gamma"},
    {"f", &Options::f, "feedback strength f"},
    {"gamma_rate", &Options::gamma_rate, "decay rate Gamma"},
    {"eta", &Options::eta, "total efficiency (shorthand: eta_d=eta, eta_c=1)"},
    {"eta_d", &Options::eta_d, "detector efficiency"},
    {"eta_c", &Options::eta_c, "collection efficiency"},
    {"nt", &Options::nt, "thermal occupation n_T"},
};

std::vector<Entry> command_entries(const std::string& cmd) {
    std::vector<Entry> e = kChainEntries;
    if (cmd != "hamiltonian") e.insert(e.end(), kControlEntries.begin(), kControlEntries.end());
    auto add = [&](std::vector<Entry> more) { e.insert(e.end(), more.begin(), more.end()); };
    if (cmd == "evolve")
        add({{"init", &Options::init, "initial state: ground|down|mixed"},
             {"tfinal", &Options::tfinal, "horizon in units of 1/Gamma"},
             {"dt", &Options::dt, "step in units of 1/Gamma"},
             {"stride", &Options::stride, "record every k-th step"}});
    if (cmd == "steady") add({{"init", &Options::init, "reference state for Delta E"}});
    if (cmd == "traj")
        add({{"init", &Options::init, "initial state"},
             {"tfinal", &Options::tfinal, "horizon in units of 1/Gamma"},
             {"dt", &Options::dt, "step in units of 1/Gamma"},
             {"stride", &Options::stride, "record every k-th step"},
             {"num", &Options::num, "number of trajectories"},
             {"seed", &Options::seed, "base seed (trajectory i uses seed+i)"},
             {"serial", &Options::serial, "1 = disable OpenMP"},
             {"homodyne", &Options::homodyne, "1 = record homodyne currents"}});
    if (cmd == "sweep")
        add({{"init", &Options::init, "reference state for Delta E"},
             {"metric", &Options::metric, "sweep metric"},
             {"alpha_min", &Options::alpha_min, ""},
             {"alpha_max", &Options::alpha_max, ""},
             {"alpha_count", &Options::alpha_count, ""},
             {"chi_min", &Options::chi_min, ""},
             {"chi_max", &Options::chi_max, ""},
             {"chi_count", &Options::chi_count, ""},
             {"serial", &Options::serial, "1 = disable OpenMP"}});
    if (cmd == "scan")
        add({{"init", &Options::init, "reference state for Delta E"},
             {"metric", &Options::metric, "comma-separated metric list"},
             {"axis", &Options::axis, "j|gamma|nt|gamma_rate|eta"},
             {"x_min", &Options::x_min, ""},
             {"x_max", &Options::x_max, ""},
             {"x_count", &Options::x_count, ""},
             {"optimize", &Options::optimize, "1 = re-optimize chi per point"},
             {"serial", &Options::serial, "1 = disable OpenMP"}});
    if (cmd == "critical-j")
        add({{"init", &Options::init, "reference state for Delta E"},
             {"metric", &Options::metric, "metric defining the critical coupling"},
             {"x_min", &Options::x_min, "J bracket low (units of h)"},
             {"x_max", &Options::x_max, "J bracket high (units of h)"}});
    e.push_back({"out", &Options::out, "output CSV path"});
    return e;
}

struct Resolved {
    qbatt::ChainSpec chain;
    qbatt::ControlSpec ctrl;
    Options raw;
};

int to_int(const std::string& key, const std::string& value) {
    double v = qbatt::parse_real(key, value);
    long r = std::lround(v);
    if (std::abs(v - r) > 1e-9)
        throw qbatt::ValidationError("key '" + key + "': expected an integer, got " + value);
    return static_cast<int>(r);
}

Resolved resolve(const Options& o) {
    Resolved r;
    r.raw = o;
    r.chain.n_sites = to_int("n", o.n);
    r.chain.field = qbatt::parse_real("h", o.h);
    r.chain.coupling = qbatt::parse_real("j", o.j);
    r.chain.gamma = qbatt::parse_real("gamma", o.gamma);
    r.chain.delta = qbatt::parse_real("delta", o.delta);
    r.chain.validate();

    r.ctrl.alpha = qbatt::parse_real("alpha", o.alpha);
    r.ctrl.decay = qbatt::parse_real("gamma_rate", o.gamma_rate);
    if (!o.eta.empty()) {
        double eta = qbatt::parse_real("eta", o.eta);
        if (eta <= 0.0 || eta > 1.0)
            throw qbatt::ValidationError("key 'eta': must lie in (0, 1]");
        r.ctrl.eta_d = eta;
        r.ctrl.eta_c = 1.0;
    } else {
        r.ctrl.eta_d = qbatt::parse_real("eta_d", o.eta_d);
        r.ctrl.eta_c = qbatt::parse_real("eta_c", o.eta_c);
    }
    r.ctrl.n_thermal = qbatt::parse_real("nt", o.nt);
    if (!o.chi.empty())
        r.ctrl.feedback = qbatt::parse_real("chi", o.chi) * r.ctrl.decay;
    else if (!o.f.empty())
        r.ctrl.feedback = qbatt::parse_real("f", o.f);
    r.ctrl.validate();
    return r;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output file: " + path);
    out << content;
    if (!out) throw std::ios_base::failure("write failed: " + path);
}

void write_manifest(const std::string& cmd, const Options& o, const Resolved& r,
                    double duration_s, const std::vector<std::string>& outputs) {
    std::ostringstream m;
    m << "# qbatt run manifest (re-dispatchable as --config)\n";
    m << "# version = " << kVersion << "\n";
    m << "# command = " << cmd << "\n";
    m << "# duration_s = " << fmt12(duration_s) << "\n";
    for (const auto& f : outputs) m << "# output = " << f << "\n";
    for (const Entry& e : command_entries(cmd)) {
        const std::string& v = o.*(e.field);
        if (!v.empty()) m << e.key << " = " << v << "\n";
    }
    write_file(o.out + ".manifest", m.str());
    (void)r;
}

qbatt::Matrix initial_state(const Resolved& r) {
    switch (qbatt::parse_init(r.raw.init)) {
        case qbatt::InitState::Ground: return qbatt::ground_state_density(r.chain);
        case qbatt::InitState::AllDown:
            return qbatt::pure_density(qbatt::all_down_state(r.chain.n_sites));
        default:
            return qbatt::Matrix::Identity(r.chain.dim(), r.chain.dim()) /
                   double(r.chain.dim());
    }
}

int run_command(const std::string& cmd, const Options& o) {
    auto t0 = std::chrono::steady_clock::now();
    Resolved r = resolve(o);
    std::ostringstream csv;

    if (cmd == "hamiltonian") {
        qbatt::Spectrum s = qbatt::spectrum(qbatt::build_battery_hamiltonian(r.chain));
        csv << "index,eigenvalue\n";
        for (long k = 0; k < s.eigenvalues.size(); ++k)
            csv << k + 1 << "," << fmt12(s.eigenvalues(k)) << "\n";
    } else if (cmd == "steady") {
        qbatt::SteadyStateResult ss = qbatt::steady_state(r.chain, r.ctrl);
        qbatt::Matrix h = qbatt::build_battery_hamiltonian(r.chain);
        qbatt::MetricsRecord rec = qbatt::compute_metrics(ss.rho, initial_state(r), h);
        const int d = r.chain.dim();
        for (int k = 1; k <= d; ++k) csv << "pop_" << k << ",";
        csv << "delta_e,ergotropy,utilization,residual,multiplicity\n";
        for (int k = 0; k < d; ++k) csv << fmt12(ss.rho(k, k).real()) << ",";
        csv << fmt12(rec.stored_energy) << "," << fmt12(rec.ergotropy) << ","
            << fmt12(rec.utilization) << "," << fmt12(ss.residual) << ","
            << ss.null_multiplicity << "\n";
    } else if (cmd == "evolve") {
        qbatt::EvolveOptions opts;
        opts.record_stride = to_int("stride", o.stride);
        qbatt::EvolutionResult ev =
            qbatt::evolve(initial_state(r), r.chain, r.ctrl, qbatt::parse_real("tfinal", o.tfinal),
                          qbatt::parse_real("dt", o.dt), opts);
        const int d = r.chain.dim();
        csv << "gamma_t,delta_e,ergotropy,utilization";
        for (int k = 1; k <= d; ++k) csv << ",pop_" << k;
        csv << "\n";
        for (std::size_t s = 0; s < ev.gamma_t.size(); ++s) {
            csv << fmt12(ev.gamma_t[s]) << "," << fmt12(ev.metrics[s].stored_energy) << ","
                << fmt12(ev.metrics[s].ergotropy) << "," << fmt12(ev.metrics[s].utilization);
            for (int k = 0; k < d; ++k) csv << "," << fmt12(ev.states[s](k, k).real());
            csv << "\n";
        }
    } else if (cmd == "traj") {
        qbatt::EnsembleOptions opts;
        opts.record_stride = to_int("stride", o.stride);
        opts.parallel = to_int("serial", o.serial) == 0;
        opts.record_homodyne = to_int("homodyne", o.homodyne) != 0;
        qbatt::EnsembleResult ens = qbatt::run_ensemble(
            initial_state(r), r.chain, r.ctrl, qbatt::parse_real("tfinal", o.tfinal),
            qbatt::parse_real("dt", o.dt), to_int("num", o.num),
            static_cast<std::uint64_t>(to_int("seed", o.seed)), opts);
        csv << "gamma_t,mean_delta_e,se_delta_e\n";
        for (std::size_t k = 0; k < ens.gamma_t.size(); ++k)
            csv << fmt12(ens.gamma_t[k]) << "," << fmt12(ens.mean[k]) << ","
                << fmt12(ens.std_error[k]) << "\n";
        if (ens.flagged_count > 0)
            std::cerr << "traj: " << ens.flagged_count
                      << " trajectories flagged and excluded from the mean\n";
    } else if (cmd == "sweep") {
        qbatt::Axis alpha_axis{"alpha", qbatt::parse_real("alpha_min", o.alpha_min),
                               qbatt::parse_real("alpha_max", o.alpha_max),
                               to_int("alpha_count", o.alpha_count)};
        qbatt::Axis chi_axis{"chi", qbatt::parse_real("chi_min", o.chi_min),
                             qbatt::parse_real("chi_max", o.chi_max),
                             to_int("chi_count", o.chi_count)};
        qbatt::SweepOptions opts;
        opts.init = qbatt::parse_init(o.init);
        opts.parallel = to_int("serial", o.serial) == 0;
        qbatt::SweepSurface surf = qbatt::grid_sweep(r.chain, r.ctrl, alpha_axis, chi_axis,
                                                     qbatt::parse_metric(o.metric), opts);
        csv << "alpha,chi,value\n";
        for (int ia = 0; ia < alpha_axis.count; ++ia)
            for (int ic = 0; ic < chi_axis.count; ++ic)
                csv << fmt12(alpha_axis.at(ia)) << "," << fmt12(chi_axis.at(ic)) << ","
                    << fmt12(surf.values[ia][ic]) << "\n";
        std::cerr << "sweep: max " << fmt12(surf.max_value) << " at " << surf.argmax.size()
                  << " grid point(s)";
        for (auto [ia, ic] : surf.argmax)
            std::cerr << " (alpha=" << fmt12(alpha_axis.at(ia))
                      << ", chi=" << fmt12(chi_axis.at(ic)) << ")";
        std::cerr << "\n";
    } else if (cmd == "scan") {
        std::vector<qbatt::Metric> metrics;
        std::stringstream ms(o.metric);
        std::string tok;
        while (std::getline(ms, tok, ',')) metrics.push_back(qbatt::parse_metric(tok));
        qbatt::Axis axis{o.axis, qbatt::parse_real("x_min", o.x_min),
                         qbatt::parse_real("x_max", o.x_max), to_int("x_count", o.x_count)};
        qbatt::ScanTable table = qbatt::scan_1d(
            r.chain, r.ctrl, o.axis, axis, metrics, to_int("optimize", o.optimize) != 0,
            qbatt::parse_init(o.init), to_int("serial", o.serial) == 0);
        csv << o.axis << ",chi_opt";
        for (qbatt::Metric m : metrics) csv << "," << qbatt::metric_name(m);
        csv << "\n";
        int failed = 0;
        for (const auto& row : table.rows) {
            csv << fmt12(row.x) << "," << fmt12(row.chi_opt);
            for (double v : row.metrics) csv << "," << fmt12(v);
            csv << "\n";
            if (row.failed) ++failed;
        }
        if (failed > 0) {
            std::cerr << "scan: " << failed << " point(s) failed (NaN in table)\n";
            write_file(o.out, csv.str());
            return 2;
        }
    } else if (cmd == "critical-j") {
        double j_lo = qbatt::parse_real("x_min", o.x_min) * r.chain.field;
        double j_hi = qbatt::parse_real("x_max", o.x_max) * r.chain.field;
        double jc = qbatt::find_critical_j(r.chain, r.ctrl, qbatt::parse_metric(o.metric), j_lo,
                                           j_hi, qbatt::parse_init(o.init));
        csv << "metric,eta,bracket_lo,bracket_hi,j_c\n";
        csv << o.metric << "," << fmt12(r.ctrl.eta()) << "," << fmt12(j_lo) << ","
            << fmt12(j_hi) << "," << fmt12(jc) << "\n";
    } else {
        throw qbatt::ValidationError("unknown command: " + cmd);
    }

    write_file(o.out, csv.str());
    double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cmd, o, r, dur, {o.out});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-chain quantum battery charging toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // keep -h free for the field strength

    const std::vector<std::string> commands = {"hamiltonian", "evolve", "steady", "traj",
                                               "sweep",       "scan",   "critical-j"};
    Options opts;
    std::map<std::string, std::map<std::string, CLI::Option*>> bound;

    for (const std::string& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd);
        sub->set_help_flag("--help", "print help");
        for (const Entry& e : command_entries(cmd))
            bound[cmd][e.key] = sub->add_option("--" + std::string(e.key), opts.*(e.field), e.help);
        sub->add_option("--config", opts.config_path, "flat key = value config file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (opts.out.empty()) opts.out = "qbatt_" + cmd + ".csv";

#ifdef _OPENMP
    if (const char* threads = std::getenv("QBATT_THREADS")) {
        int t = std::atoi(threads);
        if (t > 0) omp_set_num_threads(t);
    }
#endif

    try {
        if (!opts.config_path.empty()) {
            std::ifstream in(opts.config_path);
            if (!in) throw std::ios_base::failure("cannot read config: " + opts.config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            std::set<std::string> allowed;
            for (const Entry& e : command_entries(cmd)) allowed.insert(e.key);
            auto file_values = qbatt::parse_config(buf.str(), allowed);
            // Command-line flags override file values.
            for (const auto& [key, value] : file_values) {
                CLI::Option* opt = bound[cmd][key];
                if (opt->count() == 0) {
                    for (const Entry& e : command_entries(cmd))
                        if (key == e.key) opts.*(e.field) = value;
                }
            }
        }
        return run_command(cmd, opts);
    } catch (const qbatt::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qbatt::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    }
}

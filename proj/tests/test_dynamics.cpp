#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qbatt/dynamics.hpp>
#include <qbatt/metrics.hpp>
#include <qbatt/operators.hpp>
#include <qbatt/oracles.hpp>

#include <random>

using namespace qbatt;

namespace {

std::mt19937 rng(29);

Matrix random_density(int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

Matrix random_hermitian(int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    return 0.5 * (a + a.adjoint()).eval();
}

ControlSpec optimal_zero_t() {
    ControlSpec ctrl;
    ctrl.feedback = 1.0;
    ctrl.alpha = kPi;
    return ctrl;
}

}  // namespace

TEST_CASE("dissipator on the excited and ground single-spin states") {
    Matrix low = pauli2(PauliAxis::Minus);
    Matrix up = pure_density(basis_state({0}));
    Matrix down = pure_density(basis_state({1}));
    Matrix expect = down - up;
    CHECK((dissipator(low, up) - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(dissipator(low, down).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dissipator is traceless on random input") {
    for (int trial = 0; trial < 20; ++trial) {
        Matrix o = random_hermitian(4);
        Matrix rho = random_density(4);
        CHECK(std::abs(dissipator(o, rho).trace()) < 1e-12);
    }
}

TEST_CASE("dissipator rejects mismatched dimensions") {
    CHECK_THROWS_AS(dissipator(Matrix::Identity(2, 2), Matrix::Identity(4, 4)), ValidationError);
}

TEST_CASE("feedback master equation reduces to plain decay at f = 0") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    ControlSpec ctrl;  // f = 0
    Matrix rho = random_density(4);
    Matrix rhs = feedback_me_rhs(rho, chain, ctrl);

    Matrix h = build_battery_hamiltonian(chain);
    const Complex i(0.0, 1.0);
    Matrix expect = -i * (h * rho - rho * h);
    for (int j = 1; j <= 2; ++j)
        expect += ctrl.decay * dissipator(build_pauli(j, PauliAxis::Minus, 2), rho);
    CHECK((rhs - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fully charged state is stationary at the optimal feedback point") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    Matrix rho = pure_density(all_up_state(2));
    Matrix rhs = feedback_me_rhs(rho, chain, optimal_zero_t());
    CHECK(rhs.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generator is trace-free and Hermiticity-preserving") {
    ChainSpec chain{2, 1.0, 0.7, 0.3, 0.5};
    for (double f : {0.0, 0.8}) {
        for (double nt : {0.0, 0.3}) {
            ControlSpec ctrl;
            ctrl.feedback = f;
            ctrl.alpha = 2.1;
            ctrl.eta_d = 0.9;
            ctrl.eta_c = 0.8;
            ctrl.n_thermal = nt;
            Generator gen(chain, ctrl);
            for (int trial = 0; trial < 25; ++trial) {
                Matrix rho = random_density(4);
                Matrix rhs = gen.rhs(rho);
                CHECK(std::abs(rhs.trace()) < 1e-12);
                CHECK(hermiticity_defect(rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("feedback_me_rhs rejects thermal occupation") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    ControlSpec ctrl;
    ctrl.n_thermal = 0.5;
    ctrl.eta_c = 0.5;
    CHECK_THROWS_AS(feedback_me_rhs(random_density(4), chain, ctrl), ValidationError);
}

TEST_CASE("thermal master equation reduces to the zero-temperature one") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    ControlSpec ctrl = optimal_zero_t();
    Matrix rho = random_density(4);
    CHECK((thermal_me_rhs(rho, chain, ctrl) - feedback_me_rhs(rho, chain, ctrl))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
}

TEST_CASE("single spin in a pure thermal reservoir: excited population n_T/(2 n_T + 1)") {
    ChainSpec chain{1, 1.0, 0.0, 0.0, 1.0};
    ControlSpec ctrl;  // f = 0
    ctrl.n_thermal = 1.0;
    ctrl.eta_c = 0.0;
    SteadyStateResult ss = steady_state(chain, ctrl);
    CHECK(ss.rho(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("full charge at the optimum: N=2, eta=1") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    Matrix h = build_battery_hamiltonian(chain);
    EvolutionResult res = evolve(ground_state_density(chain), chain, optimal_zero_t(), 20.0, 1e-2);
    const MetricsRecord& last = res.metrics.back();
    CHECK(std::abs(last.stored_energy - capacity(h)) < 1e-6);
    CHECK(last.utilization == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.trace_drift < 1e-8);
}

TEST_CASE("all-down state is dark without feedback") {
    ChainSpec chain{3, 1.0, 0.6, 0.0, 1.0};
    ControlSpec ctrl;  // f = 0
    Matrix rho0 = pure_density(all_down_state(3));
    EvolutionResult res = evolve(rho0, chain, ctrl, 5.0, 1e-2);
    for (const Matrix& rho : res.states)
        CHECK((rho - rho0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("warming the uncollected channel shortens the approach to steady state") {
    // Time to steady state = first recorded Gamma*t with ||rhs|| < 1e-6 Gamma.
    ChainSpec chain{4, 1.0, 1.0, 0.0, 1.0};
    std::vector<double> reach_times;
    for (double nt : {0.0, 0.1, 0.2}) {
        ControlSpec ctrl;
        ctrl.alpha = kPi;
        ctrl.eta_d = 0.8;
        ctrl.eta_c = 0.8;
        ctrl.n_thermal = nt;
        ctrl.feedback = oracles::optimal_f_thermal(nt, ctrl.eta(), ctrl.eta_c);
        Generator gen(chain, ctrl);
        EvolutionResult res = evolve(ground_state_density(chain), chain, ctrl, 40.0, 1e-2);
        double reached = -1.0;
        for (std::size_t k = 0; k < res.states.size(); ++k) {
            if (gen.rhs(res.states[k]).norm() < 1e-6 * ctrl.decay) {
                reached = res.gamma_t[k];
                break;
            }
        }
        REQUIRE(reached > 0.0);
        reach_times.push_back(reached);
    }
    CHECK(reach_times[1] < reach_times[0]);
    CHECK(reach_times[2] < reach_times[1]);
}

TEST_CASE("steady state examples") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};

    SUBCASE("perfect measurement locks the fully charged state") {
        SteadyStateResult ss = steady_state(chain, optimal_zero_t());
        CHECK(ss.rho(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ss.null_multiplicity == 1);
    }
    SUBCASE("no feedback decays to all-down") {
        ControlSpec ctrl;  // chi = 0
        SteadyStateResult ss = steady_state(chain, ctrl);
        CHECK(ss.rho(3, 3).real() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("imperfect measurement gives the closed-form population") {
        ControlSpec ctrl = optimal_zero_t();
        ctrl.eta_d = 0.8;
        SteadyStateResult ss = steady_state(chain, ctrl);
        CHECK(ss.rho(0, 0).real() == doctest::Approx(1.0 / (2.0 - 0.8) / (2.0 - 0.8)).epsilon(1e-9));
    }
}

TEST_CASE("steady state satisfies the stationarity residual and state invariants") {
    ChainSpec chain{3, 1.0, 0.8, 0.2, 1.0};
    for (double f : {0.0, 0.6, 1.3}) {
        ControlSpec ctrl;
        ctrl.feedback = f;
        ctrl.alpha = kPi;
        ctrl.eta_d = 0.9;
        SteadyStateResult ss = steady_state(chain, ctrl);
        CHECK(ss.residual < 1e-9 * ctrl.decay);
        CHECK(hermiticity_defect(ss.rho) < 1e-10);
        CHECK(std::abs(ss.rho.trace().real() - 1.0) < 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> es(ss.rho, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) > -1e-6);
    }
}

TEST_CASE("numeric steady state matches the closed-form populations on a grid") {
    ChainSpec chain{2, 1.0, 1.0, 0.0, 1.0};
    for (double eta : {0.5, 0.8, 1.0}) {
        for (int ka = 0; ka <= 4; ++ka) {
            double alpha = kPi * ka / 4.0;
            for (int kc = 0; kc <= 8; ++kc) {
                double chi = 0.25 * kc;
                ControlSpec ctrl;
                ctrl.feedback = chi * ctrl.decay;
                ctrl.alpha = alpha;
                ctrl.eta_d = eta;
                SteadyStateResult ss = steady_state(chain, ctrl);
                auto pops = oracles::xxx2_steady_populations(chi, alpha, eta);
                CHECK(std::abs(ss.rho(0, 0).real() - pops.p11) < 1e-8);
                CHECK(std::abs(ss.rho(1, 1).real() - pops.p22) < 1e-8);
                CHECK(std::abs(ss.rho(2, 2).real() - pops.p33) < 1e-8);
                CHECK(std::abs(ss.rho(3, 3).real() - pops.p44) < 1e-8);
                CHECK(std::abs(ss.rho(1, 1).real() - ss.rho(2, 2).real()) < 1e-8);
            }
        }
    }
}

TEST_CASE("without feedback every state decays to all-down") {
    ChainSpec chain{2, 1.0, 0.9, 0.0, 1.0};
    ControlSpec ctrl;  // f = 0
    Matrix rho0 = random_density(4);
    EvolutionResult res = evolve(rho0, chain, ctrl, 50.0, 1e-2);
    Matrix target = pure_density(all_down_state(2));
    double fidelity = (res.states.back() * target).trace().real();
    CHECK(fidelity > 1.0 - 1e-6);
}

TEST_CASE("liouvillian action matches the generator on random states") {
    ChainSpec chain{2, 1.0, 0.5, 0.0, 1.0};
    ControlSpec ctrl = optimal_zero_t();
    ctrl.eta_d = 0.7;
    Matrix liou = build_liouvillian(chain, ctrl);
    Generator gen(chain, ctrl);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix rho = random_density(4);
        Vector vec_rho = Eigen::Map<const Vector>(rho.data(), 16);
        Vector lhs = liou * vec_rho;
        Matrix rhs = gen.rhs(rho);
        Vector vec_rhs = Eigen::Map<const Vector>(rhs.data(), 16);
        CHECK((lhs - vec_rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "qenc/closed_evolution.hpp"
#include "qenc/metrics.hpp"
#include "test_helpers.hpp"

using namespace qenc;

TEST_CASE("closed propagation") {
    ModelParams p;
    p.nu = -5.0;
    SUBCASE("t = 0 is the identity") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            TwoQubitState s;
            s.amps = oracle::random_state4(rng);
            const auto out = propagate_closed(s, p, 0.0);
            CHECK((out.amps - s.amps).norm() < 1e-14);
        }
    }
    SUBCASE("singlet stays on its ray") {
        const auto s = bell_state(kSinglet);
        const auto out = propagate_closed(s, p, 1.7);
        const cplx phase = std::exp(cplx(0.0, -spectrum(p)[2] * 1.7));
        CHECK((out.amps - phase * s.amps).norm() < 1e-13);
    }
    SUBCASE("two-eigenstate superposition picks up the right relative phase") {
        const auto es = eigensystem(p);
        TwoQubitState s;
        s.amps = (es.states[1].amps +
                  std::exp(cplx(0.0, std::numbers::pi / 4.0)) * es.states[3].amps) /
                 std::sqrt(2.0);
        const double t = 2.31;
        const auto out = propagate_closed(s, p, t);
        Vector4cd expect =
            (std::exp(cplx(0.0, -es.energies[1] * t)) * es.states[1].amps +
             std::exp(cplx(0.0, std::numbers::pi / 4.0 - es.energies[3] * t)) *
                 es.states[3].amps) /
            std::sqrt(2.0);
        CHECK((out.amps - expect).norm() < 1e-13);
        CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("matches a dense matrix exponential") {
        std::mt19937 rng(17);
        const Matrix4cd h = oracle::h_qubits_bell(1.0, p.nu);
        Eigen::SelfAdjointEigenSolver<Matrix4cd> solver(h);
        for (int trial = 0; trial < 5; ++trial) {
            TwoQubitState s;
            s.amps = oracle::random_state4(rng);
            const double t = 0.9 + trial;
            Vector4cd expect = Vector4cd::Zero();
            for (int k = 0; k < 4; ++k)
                expect += std::exp(cplx(0.0, -solver.eigenvalues()[k] * t)) *
                          solver.eigenvectors().col(k) *
                          (solver.eigenvectors().col(k).dot(s.amps));
            CHECK((propagate_closed(s, p, t).amps - expect).norm() < 1e-12);
        }
    }
}

TEST_CASE("exact oracle") {
    ModelParams p;
    p.nu = -5.0;
    p.alpha = 0.02;
    p.n_modes = 3;
    p.n_bos = 3;

    SUBCASE("decoupled bath reproduces the closed evolution") {
        ModelParams p0 = p;
        p0.alpha = 0.0;
        const ExactOracle oracle(p0);
        std::mt19937 rng(23);
        TwoQubitState s;
        s.amps = oracle::random_state4(rng);
        std::vector<double> times = {0.0, 0.7, 1.9, 4.2};
        const auto traj = oracle.trajectory(s, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto closed = DensityMatrix4::pure(propagate_closed(s, p0, times[i]));
            CHECK((traj[i].m - closed.m).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(uhlmann_fidelity(traj[i].m, closed.m) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    SUBCASE("singlet is decoherence free") {
        const ExactOracle oracle(p);
        const auto s = bell_state(kSinglet);
        const auto proj = DensityMatrix4::pure(s);
        std::vector<double> times = {0.0, 1.0, 5.0, 12.0, 30.0};
        for (const auto& rho : oracle.trajectory(s, times))
            CHECK((rho.m - proj.m).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("norm conserved, purity bounded, trace one") {
        const ExactOracle oracle(p);
        std::mt19937 rng(31);
        TwoQubitState s;
        s.amps = oracle::random_state4(rng);
        std::vector<double> times;
        for (int i = 0; i <= 40; ++i) times.push_back(0.25 * i);
        const auto traj = oracle.trajectory(s, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            CHECK(oracle.full_norm(s, times[i]) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(traj[i].trace_real() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(purity(traj[i].m) <= 1.0 + 1e-10);
            traj[i].validate(1e-10, 1e-9, -1e-9);
        }
    }

    SUBCASE("workers do not change the result") {
        const ExactOracle oracle(p);
        std::mt19937 rng(41);
        TwoQubitState s;
        s.amps = oracle::random_state4(rng);
        std::vector<double> times = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
        const auto a = oracle.trajectory(s, times, 1);
        const auto b = oracle.trajectory(s, times, 4);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK((a[i].m - b[i].m).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("dimension cap") {
        ModelParams big = p;
        big.n_modes = 10;
        CHECK_THROWS_AS(ExactOracle(big, 4096), std::runtime_error);
    }
}

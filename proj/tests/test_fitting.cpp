#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qenc/fitting.hpp"

using namespace qenc;

namespace {

std::vector<double> time_grid(double t_max, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t_max * double(i) / double(n - 1);
    return t;
}

std::vector<double> synth(const double c[4], const std::vector<double>& t) {
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = fit_model(c, t[i]);
    return v;
}

}  // namespace

TEST_CASE("noiseless recovery of the reference parameters") {
    const double c[4] = {0.9, -1e-4, 0.5, 1.0 / 75.0};
    const auto t = time_grid(200.0, 1001);
    const auto fr = fit_fidelity(t, synth(c, t));
    CHECK(fr.converged);
    CHECK(std::abs(fr.c1 - c[0]) / std::abs(c[0]) < 1e-6);
    CHECK(std::abs(fr.c2 - c[1]) / std::abs(c[1]) < 1e-6);
    CHECK(std::abs(fr.c3 - c[2]) / std::abs(c[2]) < 1e-6);
    CHECK(std::abs(fr.c4 - c[3]) / std::abs(c[3]) < 1e-6);
    CHECK(fr.residual_rms < 1e-10);
    CHECK(fr.tau() == doctest::Approx(75.0).epsilon(1e-6));
}

TEST_CASE("recovery with uniform noise of amplitude 1e-3") {
    const double c[4] = {0.9, -1e-4, 0.5, 1.0 / 75.0};
    const auto t = time_grid(200.0, 1001);
    auto v = synth(c, t);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
    for (auto& x : v) x += noise(rng);
    const auto fr = fit_fidelity(t, v);
    CHECK(std::abs(fr.c1 - c[0]) / std::abs(c[0]) < 1e-2);
    CHECK(std::abs(fr.c2 - c[1]) / std::abs(c[1]) < 1e-2);
    CHECK(std::abs(fr.c3 - c[2]) / std::abs(c[2]) < 1e-2);
    CHECK(std::abs(fr.c4 - c[3]) / std::abs(c[3]) < 1e-2);
}

TEST_CASE("constant series") {
    const auto t = time_grid(100.0, 51);
    const std::vector<double> v(t.size(), 1.0);
    const auto fr = fit_fidelity(t, v);
    CHECK(fr.c1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fr.c2 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fr.residual_rms < 1e-14);
    CHECK(fr.unidentifiable);
    CHECK_THROWS_AS(extrapolate(fr, 10.0), std::invalid_argument);
}

TEST_CASE("extrapolation") {
    SUBCASE("model structure fixes t = 0 at one") {
        FitResult fr;
        fr.c1 = 0.8;
        fr.c2 = 1e-3;
        fr.c3 = 0.3;
        fr.c4 = 0.01;
        CHECK(extrapolate(fr, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("pure decay limit") {
        FitResult fr;
        fr.c1 = 0.85;
        fr.c2 = 0.0;
        fr.c3 = 0.4;
        fr.c4 = 0.05;
        CHECK(extrapolate(fr, 1e6) == doctest::Approx(0.85).epsilon(1e-12));
    }
    SUBCASE("frozen reference value at t = 200") {
        FitResult fr;
        fr.c1 = 0.9;
        fr.c2 = -1e-4;
        fr.c3 = 0.5;
        fr.c4 = 1.0 / 75.0;
        CHECK(extrapolate(fr, 200.0) ==
              doctest::Approx(0.88599168913011028).epsilon(1e-14));
    }
}

TEST_CASE("refitting its own samples is a fixed point") {
    const double c[4] = {0.93, -5e-5, 0.7, 0.02};
    const auto t = time_grid(150.0, 301);
    const auto fr1 = fit_fidelity(t, synth(c, t));
    const double c1[4] = {fr1.c1, fr1.c2, fr1.c3, fr1.c4};
    const auto fr2 = fit_fidelity(t, synth(c1, t));
    CHECK(std::abs(fr2.c1 - fr1.c1) < 1e-8);
    CHECK(std::abs(fr2.c2 - fr1.c2) < 1e-8);
    CHECK(std::abs(fr2.c3 - fr1.c3) < 1e-8);
    CHECK(std::abs(fr2.c4 - fr1.c4) < 1e-8);
}

TEST_CASE("jacobian of the model matches central differences") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double c[4] = {0.5 + 0.4 * u(rng), -1e-3 * u(rng), 0.1 + u(rng), 0.005 + 0.05 * u(rng)};
        const double t = 120.0 * u(rng);
        const double h = 1e-6;
        for (int k = 0; k < 4; ++k) {
            double cp[4], cm[4];
            std::copy(c, c + 4, cp);
            std::copy(c, c + 4, cm);
            cp[k] += h;
            cm[k] -= h;
            const double fd = (fit_model(cp, t) - fit_model(cm, t)) / (2.0 * h);
            // analytic partials, as used by the solver
            const double env = std::exp(-c[3] * t);
            const double osc = std::cos(c[2] * t);
            double grad = 0.0;
            switch (k) {
                case 0: grad = 1.0 - osc * env; break;
                case 1: grad = t; break;
                case 2: grad = -(1.0 - c[0]) * t * std::sin(c[2] * t) * env; break;
                case 3: grad = -(1.0 - c[0]) * t * osc * env; break;
            }
            CHECK(fd == doctest::Approx(grad).epsilon(1e-6));
        }
    }
}

TEST_CASE("input validation") {
    const auto t = time_grid(10.0, 30);
    std::vector<double> v(t.size(), 0.9);
    CHECK_THROWS_AS(fit_fidelity({0.0, 1.0}, {0.9, 0.9}), std::invalid_argument);
    v[3] = 1.2;  // above the allowed band
    CHECK_THROWS_AS(fit_fidelity(t, v), std::invalid_argument);
    v[3] = -0.1;
    CHECK_THROWS_AS(fit_fidelity(t, v), std::invalid_argument);
}

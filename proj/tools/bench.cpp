// Benchmark comparing the serial reference path (workers = 1) against the
// OpenMP path on the two data-parallel hot spots: ensemble evolution and
// oracle time-point evaluation. The outputs must agree bitwise.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <vector>

#include "qenc/closed_evolution.hpp"
#include "qenc/parallel.hpp"
#include "qenc/sampling.hpp"
#include "qenc/tdvp.hpp"

using namespace qenc;

namespace {

double seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

double max_series_diff(const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    const int workers = argc > 1 ? std::atoi(argv[1]) : 0;
    const int nw = par::resolve_workers(workers);
    std::printf("threads: %d\n", nw);

    ModelParams p;
    p.nu = -5.0;
    p.alpha = 0.01;
    p.n_modes = 10;
    TdvpOptions opt;
    opt.t_final = 2.0;

    // ensemble of short trajectories
    const auto grid = enumerate_bell_grid();
    std::vector<TwoQubitState> states(grid.begin(), grid.begin() + 16);

    auto run_ensemble = [&](int nworkers) {
        std::vector<std::vector<double>> pops(states.size());
        par::for_each_index(states.size(), nworkers, [&](std::size_t r) {
            const auto traj = tdvp_evolve(states[r], p, opt, 4);
            for (const auto& s : traj) pops[r].push_back(s.rho.m(0, 0).real());
        });
        return pops;
    };

    double t0 = seconds();
    const auto serial = run_ensemble(1);
    const double t_serial = seconds() - t0;
    t0 = seconds();
    const auto parallel = run_ensemble(workers);
    const double t_parallel = seconds() - t0;
    std::printf("ensemble evolve   serial %.3fs  parallel %.3fs  speedup %.2fx  maxdiff %g\n",
                t_serial, t_parallel, t_serial / t_parallel,
                max_series_diff(serial, parallel));

    // oracle time points
    ModelParams po = p;
    po.n_modes = 3;
    po.alpha = 0.02;
    const ExactOracle oracle(po);
    std::vector<double> times;
    for (int i = 0; i <= 400; ++i) times.push_back(i * 0.025);
    const auto state0 = bell_state(kTripletAF);

    t0 = seconds();
    const auto traj_serial = oracle.trajectory(state0, times, 1);
    const double o_serial = seconds() - t0;
    t0 = seconds();
    const auto traj_parallel = oracle.trajectory(state0, times, workers);
    const double o_parallel = seconds() - t0;
    double maxdiff = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        maxdiff = std::max(maxdiff,
                           (traj_serial[i].m - traj_parallel[i].m).cwiseAbs().maxCoeff());
    std::printf("oracle trajectory serial %.3fs  parallel %.3fs  speedup %.2fx  maxdiff %g\n",
                o_serial, o_parallel, o_serial / o_parallel, maxdiff);
    return 0;
}

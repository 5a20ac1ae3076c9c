#pragma once

#include <vector>

#include "qenc/density_matrix.hpp"
#include "qenc/model.hpp"
#include "qenc/mpo.hpp"
#include "qenc/mps.hpp"

namespace qenc {

struct TdvpOptions {
    double dt = 0.05;
    double krylov_tol = 1e-12;
    double trunc_threshold = 1e-13;
    int d_max = 50;
    double t_final = 30.0;
    int max_krylov = 48;

    void validate() const;  // all positive
};

// One full second-order step dt: a left-to-right and a right-to-left sweep
// of two-site updates with half step dt/2 each, one-site backward updates in
// between, SVD truncation at (d_max, trunc_threshold). Local exponentials
// use a Lanczos recurrence stopped when the summed contribution of the last
// two Krylov vectors falls below krylov_tol. The state norm is reset to 1
// after each sweep with the drift accumulated on the state. Requires and
// restores the orthogonality center at site 0.
void tdvp2_step(MpsState& mps, const Mpo& mpo, const TdvpOptions& opt);

struct TdvpSample {
    double t = 0.0;
    DensityMatrix4 rho;  // reduced two-qubit matrix, Bell basis
};

struct TdvpDiagnostics {
    double trunc_log = 0.0;
    double norm_drift = 0.0;
    long max_bond_dim = 1;
    bool saturated = false;
};

// Trajectory of reduced two-qubit density matrices, sampled every
// observe_every steps (t = 0 included). Step warnings accumulate into
// `diag` when given.
std::vector<TdvpSample> tdvp_evolve(const TwoQubitState& state0, const ModelParams& p,
                                    const TdvpOptions& opt, int observe_every = 1,
                                    TdvpDiagnostics* diag = nullptr);

}  // namespace qenc

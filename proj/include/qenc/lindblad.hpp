#pragma once

#include <vector>

#include "qenc/density_matrix.hpp"
#include "qenc/model.hpp"

namespace qenc {

struct LindbladRates {
    double gamma = 0.0;     // single rate 2 pi alpha c (infinite-cutoff limit)
    double gamma_01 = 0.0;  // 4 b^2 2pi J(E1-E0), exponential cutoff at omega_c
    double gamma_13 = 0.0;  // 4 a^2 2pi J(E3-E1), exponential cutoff at omega_c
    double c = 0.0;         // a^2 (sqrt(4 delta^2 + nu^2) + nu)
};

LindbladRates decay_rate(const ModelParams& p);

// Closed-form solution of the master equation with jump operators |0><1| and
// |1><3| at the single rate gamma, in the interaction picture and the energy
// eigenbasis. Coherences rho_02, rho_12, rho_23 are not covered by the closed
// forms; inputs carrying them are rejected unless allow_unspecified_coherences
// is set, in which case they pass through unchanged.
DensityMatrix4 analytic_density(const DensityMatrix4& rho0, const LindbladRates& rates,
                                double t, bool allow_unspecified_coherences = false);

// Uhlmann fidelity between free and dissipative evolution for a Bell-state
// start, in closed form. The singlet returns 1 identically.
double analytic_bell_fidelity(BellIndex initial, const ModelParams& p, double t);

// Fourth-order Runge-Kutta integration of the same master equation in the
// Schroedinger picture (H = diag(E_i) commutator plus the two dissipators at
// rate gamma). Returns the trajectory including t = 0, eigenbasis matrices.
// Emits a warning on stderr when dt > 0.1/gamma.
std::vector<DensityMatrix4> rk4_lindblad(const DensityMatrix4& rho0, const ModelParams& p,
                                         double dt, double t_final);

// Picture changes: elementwise phases exp(-i (E_i - E_j) t).
DensityMatrix4 interaction_to_schroedinger(const DensityMatrix4& rho, const EigenSystem& es,
                                           double t);
DensityMatrix4 schroedinger_to_interaction(const DensityMatrix4& rho, const EigenSystem& es,
                                           double t);

}  // namespace qenc

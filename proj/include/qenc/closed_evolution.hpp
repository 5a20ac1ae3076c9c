#pragma once

#include "qenc/density_matrix.hpp"
#include "qenc/model.hpp"

namespace qenc {

// |psi(t)> = sum_i exp(-i E_i t) <i|psi0> |i> in the Bell basis.
TwoQubitState propagate_closed(const TwoQubitState& state0, const ModelParams& p, double t);

// Brute-force propagator for tiny qubits+bath spaces: one spectral
// decomposition of the dense Hamiltonian, then exact phase rotation per
// time point. The bath starts in its vacuum.
class ExactOracle {
  public:
    ExactOracle(const ModelParams& p, long dim_cap = 4096);

    // Reduced two-qubit density matrices (Bell basis) at the given times.
    // Time points are independent; `workers` > 1 evaluates them in parallel
    // with index-ordered assembly.
    std::vector<DensityMatrix4> trajectory(const TwoQubitState& state0,
                                           const std::vector<double>& t_grid,
                                           int workers = 1) const;

    // Squared norm of the full state at time t (conservation check).
    double full_norm(const TwoQubitState& state0, double t) const;

    long dimension() const { return dim_; }

  private:
    VectorXcd full_state(const TwoQubitState& state0, double t) const;

    ModelParams params_;
    long dim_ = 0;
    Eigen::VectorXd evals_;
    MatrixXcd evecs_;
};

}  // namespace qenc

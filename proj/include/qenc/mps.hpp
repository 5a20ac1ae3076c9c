#pragma once

#include <string>
#include <vector>

#include "qenc/density_matrix.hpp"
#include "qenc/model.hpp"

namespace qenc {

// Matrix product state for the qubits+bath chain: two qubit sites of local
// dimension 2 followed by n_modes boson sites of dimension n_bos (modes in
// increasing-frequency order). Site tensors are stored per physical index,
// sites[n][p] being the (Dl x Dr) bond matrix.
struct MpsState {
    std::vector<std::vector<MatrixXcd>> sites;
    int ortho_center = 0;
    double trunc_log = 0.0;   // accumulated discarded weight
    double norm_drift = 0.0;  // accumulated |1 - norm| removed by renormalization
    bool saturated = false;   // d_max reached while discarding above threshold

    int n_sites() const { return static_cast<int>(sites.size()); }
    int phys_dim(int n) const { return static_cast<int>(sites[n].size()); }
    long bond_dim(int n) const { return sites[n][0].cols(); }  // right bond of site n
    long max_bond_dim() const;

    // Frobenius norm of the center tensor; equals the state norm in mixed
    // canonical form.
    double center_norm() const;
    // Full contraction <psi|psi>, gauge-independent.
    double norm_full() const;
};

// state0 (x) |0...0>_bath as a bond-dimension <= 2 MPS, center at site 0,
// remaining sites right-canonical.
MpsState init_product_state(const TwoQubitState& state0, const ModelParams& p);

// Exact MPS (no truncation) of a dense state vector with the given local
// dimensions; intended for small test systems.
MpsState mps_from_dense(const VectorXcd& psi, const std::vector<int>& dims);

// Gauge moves via QR; leave the state invariant.
void move_center_right(MpsState& mps);
void move_center_left(MpsState& mps);
void move_center_to(MpsState& mps, int site);

// Partial trace over all boson sites, Bell basis.
DensityMatrix4 reduced_two_qubit_dm(const MpsState& mps);

// Versioned binary checkpoint (little-endian doubles).
void save_checkpoint(const MpsState& mps, const std::string& path);
MpsState load_checkpoint(const std::string& path);

}  // namespace qenc

#pragma once

#include <vector>

#include "qenc/model.hpp"
#include "qenc/mps.hpp"

namespace qenc {

// One nonzero block of an MPO site tensor.
struct MpoEntry {
    int wl = 0;
    int wr = 0;
    MatrixXcd op;  // local d' x d operator
};

// Sparse MPO: sites[n] lists the nonzero (wl, wr) blocks; bond_dims[n] is
// the dimension of the virtual bond left of site n (bond_dims[0] = 1 at the
// boundary, likewise bond_dims[L] = 1).
struct Mpo {
    std::vector<std::vector<MpoEntry>> sites;
    std::vector<int> bond_dims;

    int n_sites() const { return static_cast<int>(sites.size()); }
};

// Full Hamiltonian on the qubits+bath chain, long-range star couplings
// encoded by a linear automaton (identity-passed, sigma_z carrier,
// completed), energy shift sum omega_i/2 omitted.
Mpo build_mpo(const ModelParams& p);

// Dense matrix of the MPO for small chains (tests).
MatrixXcd mpo_dense(const Mpo& mpo);

// <psi|O|psi>; imaginary part is returned too so callers can assert it.
cplx mpo_expectation(const MpsState& mps, const Mpo& mpo);

}  // namespace qenc

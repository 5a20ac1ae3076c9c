#include "qenc/mpo.hpp"

#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace qenc {

namespace {
// automaton states
constexpr int kDone = 0;
constexpr int kCarrier = 1;
constexpr int kInitial = 2;

Matrix2cd pauli_x() {
    Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
Matrix2cd pauli_z() {
    Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}
}  // namespace

Mpo build_mpo(const ModelParams& p) {
    p.validate();
    const auto bath = bath_discretization(p);
    const int nb = p.n_bos;
    const int n_sites = 2 + p.n_modes;

    MatrixXcd boson_x = MatrixXcd::Zero(nb, nb);   // a + a^dag
    MatrixXcd boson_num = MatrixXcd::Zero(nb, nb); // a^dag a
    for (int k = 1; k < nb; ++k) {
        boson_x(k - 1, k) = std::sqrt(double(k));
        boson_x(k, k - 1) = std::sqrt(double(k));
        boson_num(k, k) = double(k);
    }
    const Matrix2cd id2 = Matrix2cd::Identity();
    const MatrixXcd idb = MatrixXcd::Identity(nb, nb);

    Mpo mpo;
    mpo.sites.resize(n_sites);
    mpo.bond_dims.assign(n_sites + 1, 3);
    mpo.bond_dims.front() = 1;
    mpo.bond_dims.back() = 1;

    auto add = [&](int n, int wl, int wr, const MatrixXcd& op) {
        // boundary bonds have a single index
        const int l = n == 0 ? 0 : wl;
        const int r = n == n_sites - 1 ? 0 : wr;
        if (n == 0 && wl != kInitial) return;
        if (n == n_sites - 1 && wr != kDone) return;
        if (op.cwiseAbs().maxCoeff() == 0.0) return;
        mpo.sites[n].push_back({l, r, op});
    };

    for (int n = 0; n < 2; ++n) {  // qubit sites
        add(n, kDone, kDone, id2);
        add(n, kInitial, kInitial, id2);
        add(n, kInitial, kDone, -0.5 * p.delta * pauli_x());
        add(n, kInitial, kCarrier, pauli_z());
        add(n, kCarrier, kCarrier, id2);
        if (n == 1) add(n, kCarrier, kDone, -0.5 * p.nu * pauli_z());
    }
    for (int k = 0; k < p.n_modes; ++k) {
        const int n = 2 + k;
        add(n, kDone, kDone, idb);
        add(n, kInitial, kInitial, idb);
        add(n, kInitial, kDone, bath.modes[k].omega * boson_num);
        add(n, kCarrier, kCarrier, idb);
        add(n, kCarrier, kDone, bath.modes[k].lambda * boson_x);
    }
    return mpo;
}

MatrixXcd mpo_dense(const Mpo& mpo) {
    // grow dense operators per automaton state, left to right
    std::vector<MatrixXcd> acc(mpo.bond_dims[0]);
    acc[0] = MatrixXcd::Ones(1, 1);
    long dim = 1;
    for (int n = 0; n < mpo.n_sites(); ++n) {
        const long d = mpo.sites[n].front().op.rows();
        std::vector<MatrixXcd> next(mpo.bond_dims[n + 1],
                                    MatrixXcd::Zero(dim * d, dim * d));
        for (const auto& e : mpo.sites[n]) {
            if (acc[e.wl].size() == 0) continue;
            next[e.wr] += Eigen::kroneckerProduct(acc[e.wl], e.op).eval();
        }
        acc = std::move(next);
        dim *= d;
        if (dim > 1 << 14) throw std::runtime_error("mpo_dense: chain too large");
    }
    return acc[0];
}

cplx mpo_expectation(const MpsState& mps, const Mpo& mpo) {
    if (mps.n_sites() != mpo.n_sites())
        throw std::invalid_argument("mpo_expectation: site count mismatch");
    // env[w](bra, ket), advanced left to right
    std::vector<MatrixXcd> env(mpo.bond_dims[0]);
    env[0] = MatrixXcd::Ones(1, 1);
    for (int n = 0; n < mps.n_sites(); ++n) {
        const long dr = mps.sites[n][0].cols();
        std::vector<MatrixXcd> next(mpo.bond_dims[n + 1]);
        for (const auto& e : mpo.sites[n]) {
            if (env[e.wl].size() == 0) continue;
            for (int sp = 0; sp < mps.phys_dim(n); ++sp)
                for (int s = 0; s < mps.phys_dim(n); ++s) {
                    const cplx c = e.op(sp, s);
                    if (c == 0.0) continue;
                    MatrixXcd contrib = c * (mps.sites[n][sp].adjoint() *
                                             (env[e.wl] * mps.sites[n][s]));
                    if (next[e.wr].size() == 0)
                        next[e.wr] = std::move(contrib);
                    else
                        next[e.wr] += contrib;
                }
        }
        for (auto& m : next)
            if (m.size() == 0) m = MatrixXcd::Zero(dr, dr);
        env = std::move(next);
    }
    return env[0](0, 0);
}

}  // namespace qenc

#include "qenc/tdvp.hpp"

#include <cmath>
#include <stdexcept>

namespace qenc {

void TdvpOptions::validate() const {
    if (!(dt > 0) || !(krylov_tol > 0) || !(trunc_threshold > 0) || d_max < 1 ||
        !(t_final > 0) || max_krylov < 2)
        throw std::invalid_argument("TdvpOptions: all options must be positive");
}

namespace {

using Blocks = std::vector<MatrixXcd>;  // physical-index blocks of equal shape
using EnvSet = std::vector<MatrixXcd>;  // per MPO bond index

cplx blocks_dot(const Blocks& a, const Blocks& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i].conjugate().cwiseProduct(b[i])).sum();
    return s;
}

double blocks_norm(const Blocks& a) {
    double s = 0.0;
    for (const auto& m : a) s += m.squaredNorm();
    return std::sqrt(s);
}

void blocks_axpy(Blocks& y, const cplx& alpha, const Blocks& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

Blocks blocks_zero_like(const Blocks& a) {
    Blocks z(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        z[i] = MatrixXcd::Zero(a[i].rows(), a[i].cols());
    return z;
}

// --- environments ---

EnvSet advance_left(const EnvSet& env, const std::vector<MatrixXcd>& site,
                    const std::vector<MpoEntry>& w, int wr_dim) {
    const long dr = site[0].cols();
    EnvSet next(wr_dim);
    for (const auto& e : w) {
        if (env[e.wl].size() == 0) continue;
        for (int sp = 0; sp < static_cast<int>(site.size()); ++sp)
            for (int s = 0; s < static_cast<int>(site.size()); ++s) {
                const cplx c = e.op(sp, s);
                if (c == 0.0) continue;
                MatrixXcd contrib = c * (site[sp].adjoint() * (env[e.wl] * site[s]));
                if (next[e.wr].size() == 0)
                    next[e.wr] = std::move(contrib);
                else
                    next[e.wr] += contrib;
            }
    }
    for (auto& m : next)
        if (m.size() == 0) m = MatrixXcd::Zero(dr, dr);
    return next;
}

EnvSet advance_right(const EnvSet& env, const std::vector<MatrixXcd>& site,
                     const std::vector<MpoEntry>& w, int wl_dim) {
    const long dl = site[0].rows();
    EnvSet next(wl_dim);
    for (const auto& e : w) {
        if (env[e.wr].size() == 0) continue;
        for (int sp = 0; sp < static_cast<int>(site.size()); ++sp)
            for (int s = 0; s < static_cast<int>(site.size()); ++s) {
                const cplx c = e.op(sp, s);
                if (c == 0.0) continue;
                MatrixXcd contrib =
                    c * (site[sp].conjugate() * (env[e.wr] * site[s].transpose()));
                if (next[e.wl].size() == 0)
                    next[e.wl] = std::move(contrib);
                else
                    next[e.wl] += contrib;
            }
    }
    for (auto& m : next)
        if (m.size() == 0) m = MatrixXcd::Zero(dl, dl);
    return next;
}

// --- effective Hamiltonians ---

// One-site: C'[s'] = sum W(wl,wr)(s',s) L[wl] C[s] R[wr]^T
struct Heff1 {
    const EnvSet* left;
    const EnvSet* right;
    const std::vector<MpoEntry>* w;
    int d;

    Blocks apply(const Blocks& c) const {
        Blocks out = blocks_zero_like(c);
        for (const auto& e : *w) {
            const MatrixXcd& l = (*left)[e.wl];
            const MatrixXcd& r = (*right)[e.wr];
            for (int s = 0; s < d; ++s) {
                MatrixXcd lc;
                bool have_lc = false;
                for (int sp = 0; sp < d; ++sp) {
                    const cplx coef = e.op(sp, s);
                    if (coef == 0.0) continue;
                    if (!have_lc) {
                        lc = l * c[s] * r.transpose();
                        have_lc = true;
                    }
                    out[sp] += coef * lc;
                }
            }
        }
        return out;
    }
};

// Two-site: blocks indexed (s1 * d2 + s2).
struct Heff2 {
    const EnvSet* left;
    const EnvSet* right;
    const std::vector<MpoEntry>* w1;
    const std::vector<MpoEntry>* w2;
    int d1, d2;
    int mid_dim;  // MPO bond between the two sites

    Blocks apply(const Blocks& theta) const {
        // stage A: LTh[wl][s1*d2+s2] = L[wl] * theta
        // stage B: Y[wm][s1'*d2+s2]  = sum W1(wl,wm)(s1',s1) LTh[wl][...]
        // stage C: Z[wr][s1'*d2+s2'] = sum W2(wm,wr)(s2',s2) Y[wm][...]
        // stage D: out += Z[wr] * R[wr]^T
        const long dl = theta[0].rows();
        const long dr = theta[0].cols();
        const int nl = static_cast<int>(left->size());
        const int nr = static_cast<int>(right->size());

        std::vector<Blocks> lth(nl);
        for (const auto& e : *w1) {
            if (!lth[e.wl].empty()) continue;
            lth[e.wl].resize(d1 * d2);
            for (int i = 0; i < d1 * d2; ++i)
                lth[e.wl][i].noalias() = (*left)[e.wl] * theta[i];
        }
        std::vector<Blocks> y(mid_dim);
        for (const auto& e : *w1) {
            if (y[e.wr].empty()) {
                y[e.wr].assign(d1 * d2, MatrixXcd::Zero(dl, dr));
            }
            for (int sp = 0; sp < d1; ++sp)
                for (int s = 0; s < d1; ++s) {
                    const cplx coef = e.op(sp, s);
                    if (coef == 0.0) continue;
                    for (int s2 = 0; s2 < d2; ++s2)
                        y[e.wr][sp * d2 + s2] += coef * lth[e.wl][s * d2 + s2];
                }
        }
        std::vector<Blocks> z(nr);
        for (const auto& e : *w2) {
            if (y[e.wl].empty()) continue;
            if (z[e.wr].empty()) z[e.wr].assign(d1 * d2, MatrixXcd::Zero(dl, dr));
            for (int sp = 0; sp < d2; ++sp)
                for (int s = 0; s < d2; ++s) {
                    const cplx coef = e.op(sp, s);
                    if (coef == 0.0) continue;
                    for (int s1 = 0; s1 < d1; ++s1)
                        z[e.wr][s1 * d2 + sp] += coef * y[e.wl][s1 * d2 + s];
                }
        }
        Blocks out(d1 * d2, MatrixXcd::Zero(dl, (*right)[0].rows()));
        for (int wr = 0; wr < nr; ++wr) {
            if (z[wr].empty()) continue;
            for (int i = 0; i < d1 * d2; ++i)
                out[i].noalias() += z[wr][i] * (*right)[wr].transpose();
        }
        return out;
    }
};

// exp(phase * H) v via a Lanczos recurrence; stops when the joint weight of
// the two newest Krylov vectors in the result drops below tol.
template <class Op>
Blocks krylov_exp(const Op& h, const Blocks& v0, cplx phase, double tol, int max_m) {
    const double beta0 = blocks_norm(v0);
    if (beta0 == 0.0) return v0;

    std::vector<Blocks> basis;
    basis.reserve(16);
    {
        Blocks v = v0;
        for (auto& m : v) m /= beta0;
        basis.push_back(std::move(v));
    }
    std::vector<double> alpha, beta;  // tridiagonal coefficients
    Eigen::VectorXcd y;

    long dim = 0;
    for (const auto& m : v0) dim += m.size();
    const int m_cap = static_cast<int>(std::min<long>(max_m, dim));

    for (int j = 0; j < m_cap; ++j) {
        Blocks w = h.apply(basis[j]);
        const double a = std::real(blocks_dot(basis[j], w));
        alpha.push_back(a);
        blocks_axpy(w, -a, basis[j]);
        if (j > 0) blocks_axpy(w, -beta[j - 1], basis[j - 1]);
        // full reorthogonalization; subspaces are small
        for (int k = 0; k <= j; ++k) blocks_axpy(w, -blocks_dot(basis[k], w), basis[k]);

        const int m = j + 1;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        Eigen::VectorXcd expd(m);
        for (int i = 0; i < m; ++i) expd[i] = std::exp(phase * es.eigenvalues()[i]);
        y = es.eigenvectors().cast<cplx>() * expd.cwiseProduct(
                es.eigenvectors().row(0).transpose().cast<cplx>());

        const double tail = m >= 2 ? std::abs(y[m - 1]) + std::abs(y[m - 2])
                                   : std::abs(y[m - 1]);
        const double bnext = blocks_norm(w);
        if (beta0 * tail < tol || bnext < 1e-14 || m == m_cap) break;

        beta.push_back(bnext);
        for (auto& blk : w) blk /= bnext;
        basis.push_back(std::move(w));
    }

    Blocks out = blocks_zero_like(v0);
    for (std::size_t k = 0; k < basis.size() && k < static_cast<std::size_t>(y.size()); ++k)
        blocks_axpy(out, beta0 * y[static_cast<long>(k)], basis[k]);
    return out;
}

struct SvdSplit {
    Blocks left;    // left-canonical blocks (s1)
    Blocks right;   // right-canonical blocks (s2)
    Eigen::VectorXd sv;
    double discarded = 0.0;  // relative discarded weight
};

SvdSplit split_theta(const Blocks& theta, int d1, int d2, int d_max, double threshold) {
    const long dl = theta[0].rows();
    const long dr = theta[0].cols();
    MatrixXcd m(dl * d1, d2 * dr);
    for (int s1 = 0; s1 < d1; ++s1)
        for (int s2 = 0; s2 < d2; ++s2)
            m.block(s1 * dl, s2 * dr, dl, dr) = theta[s1 * d2 + s2];

    Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double total = sv.squaredNorm();

    long rank = std::min<long>(sv.size(), d_max);
    // shrink while the discarded weight stays within the threshold
    double tail = 0.0;
    for (long k = sv.size() - 1; k >= rank; --k) tail += sv[k] * sv[k];
    while (rank > 1) {
        const double cand = tail + sv[rank - 1] * sv[rank - 1];
        if (total > 0 && cand / total > threshold) break;
        tail = cand;
        --rank;
    }

    SvdSplit out;
    out.sv = sv.head(rank);
    out.discarded = total > 0 ? tail / total : 0.0;
    out.left.resize(d1);
    out.right.resize(d2);
    for (int s1 = 0; s1 < d1; ++s1)
        out.left[s1] = svd.matrixU().block(s1 * dl, 0, dl, rank);
    for (int s2 = 0; s2 < d2; ++s2)
        out.right[s2] = svd.matrixV().block(s2 * dr, 0, dr, rank).adjoint();
    return out;
}

}  // namespace

void tdvp2_step(MpsState& mps, const Mpo& mpo, const TdvpOptions& opt) {
    opt.validate();
    if (mps.n_sites() != mpo.n_sites())
        throw std::invalid_argument("tdvp2_step: MPS/MPO site mismatch");
    const int n = mps.n_sites();
    if (n < 2) throw std::invalid_argument("tdvp2_step: need at least two sites");
    move_center_to(mps, 0);

    const cplx fwd(0.0, -0.5 * opt.dt);
    const cplx bwd(0.0, +0.5 * opt.dt);

    // right environments for every bond, from the right-canonical start
    std::vector<EnvSet> renv(n + 1);
    renv[n] = EnvSet(1, MatrixXcd::Ones(1, 1));
    for (int k = n - 1; k >= 1; --k)
        renv[k] = advance_right(renv[k + 1], mps.sites[k], mpo.sites[k], mpo.bond_dims[k]);

    std::vector<EnvSet> lenv(n + 1);
    lenv[0] = EnvSet(1, MatrixXcd::Ones(1, 1));

    auto sweep = [&](bool left_to_right) {
        for (int i = 0; i < n - 1; ++i) {
            const int site = left_to_right ? i : n - 2 - i;
            const int d1 = mps.phys_dim(site);
            const int d2 = mps.phys_dim(site + 1);

            Blocks theta(d1 * d2);
            for (int s1 = 0; s1 < d1; ++s1)
                for (int s2 = 0; s2 < d2; ++s2)
                    theta[s1 * d2 + s2].noalias() =
                        mps.sites[site][s1] * mps.sites[site + 1][s2];

            Heff2 h2{&lenv[site], &renv[site + 2], &mpo.sites[site], &mpo.sites[site + 1],
                     d1, d2, mpo.bond_dims[site + 1]};
            theta = krylov_exp(h2, theta, fwd, opt.krylov_tol, opt.max_krylov);

            SvdSplit split =
                split_theta(theta, d1, d2, opt.d_max, opt.trunc_threshold);
            mps.trunc_log += split.discarded;
            if (split.discarded > opt.trunc_threshold &&
                split.sv.size() == opt.d_max)
                mps.saturated = true;

            if (left_to_right) {
                mps.sites[site] = split.left;
                lenv[site + 1] = advance_left(lenv[site], mps.sites[site],
                                              mpo.sites[site], mpo.bond_dims[site + 1]);
                Blocks center(d2);
                for (int s2 = 0; s2 < d2; ++s2)
                    center[s2] = split.sv.cast<cplx>().asDiagonal() * split.right[s2];
                if (site + 1 < n - 1) {
                    Heff1 h1{&lenv[site + 1], &renv[site + 2], &mpo.sites[site + 1], d2};
                    center = krylov_exp(h1, center, bwd, opt.krylov_tol, opt.max_krylov);
                }
                mps.sites[site + 1] = std::move(center);
                mps.ortho_center = site + 1;
            } else {
                mps.sites[site + 1] = split.right;
                renv[site + 1] = advance_right(renv[site + 2], mps.sites[site + 1],
                                               mpo.sites[site + 1], mpo.bond_dims[site + 1]);
                Blocks center(d1);
                for (int s1 = 0; s1 < d1; ++s1)
                    center[s1] = split.left[s1] * split.sv.cast<cplx>().asDiagonal();
                if (site > 0) {
                    Heff1 h1{&lenv[site], &renv[site + 1], &mpo.sites[site], d1};
                    center = krylov_exp(h1, center, bwd, opt.krylov_tol, opt.max_krylov);
                }
                mps.sites[site] = std::move(center);
                mps.ortho_center = site;
            }
        }
        // renormalize, log the drift
        const double norm = mps.center_norm();
        mps.norm_drift += std::abs(1.0 - norm);
        if (norm > 0)
            for (auto& blk : mps.sites[mps.ortho_center]) blk /= norm;
    };

    sweep(true);
    sweep(false);
}

std::vector<TdvpSample> tdvp_evolve(const TwoQubitState& state0, const ModelParams& p,
                                    const TdvpOptions& opt, int observe_every,
                                    TdvpDiagnostics* diag) {
    opt.validate();
    if (observe_every < 1) throw std::invalid_argument("observe_every must be >= 1");
    const Mpo mpo = build_mpo(p);
    MpsState mps = init_product_state(state0, p);

    const long n_steps = static_cast<long>(std::floor(opt.t_final / opt.dt + 1e-9));
    std::vector<TdvpSample> out;
    out.reserve(n_steps / observe_every + 2);
    out.push_back({0.0, reduced_two_qubit_dm(mps)});
    long max_bond = 1;
    for (long s = 1; s <= n_steps; ++s) {
        tdvp2_step(mps, mpo, opt);
        max_bond = std::max(max_bond, mps.max_bond_dim());
        if (s % observe_every == 0)
            out.push_back({s * opt.dt, reduced_two_qubit_dm(mps)});
    }
    if (diag) {
        diag->trunc_log = mps.trunc_log;
        diag->norm_drift = mps.norm_drift;
        diag->max_bond_dim = max_bond;
        diag->saturated = mps.saturated;
    }
    return out;
}

}  // namespace qenc

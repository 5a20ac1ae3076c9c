#include "qenc/closed_evolution.hpp"

#include <stdexcept>

#include "qenc/parallel.hpp"

namespace qenc {

TwoQubitState propagate_closed(const TwoQubitState& state0, const ModelParams& p, double t) {
    const EigenSystem es = eigensystem(p);
    TwoQubitState out;
    for (int i = 0; i < 4; ++i) {
        const cplx overlap = es.states[i].amps.dot(state0.amps);  // <i|psi0>
        out.amps += std::exp(cplx(0.0, -es.energies[i] * t)) * overlap * es.states[i].amps;
    }
    return out;
}

ExactOracle::ExactOracle(const ModelParams& p, long dim_cap) : params_(p) {
    const MatrixXcd h = hamiltonian_dense(p, dim_cap);
    dim_ = h.rows();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("ExactOracle: eigendecomposition failed");
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
}

VectorXcd ExactOracle::full_state(const TwoQubitState& state0, double t) const {
    const long bath_dim = dim_ / 4;
    VectorXcd psi0 = VectorXcd::Zero(dim_);
    const Vector4cd qc = bell_to_computational() * state0.amps;
    for (int q = 0; q < 4; ++q) psi0[q * bath_dim] = qc[q];  // bath vacuum

    VectorXcd c = evecs_.adjoint() * psi0;
    for (long k = 0; k < dim_; ++k) c[k] *= std::exp(cplx(0.0, -evals_[k] * t));
    return evecs_ * c;
}

std::vector<DensityMatrix4> ExactOracle::trajectory(const TwoQubitState& state0,
                                                    const std::vector<double>& t_grid,
                                                    int workers) const {
    const long bath_dim = dim_ / 4;
    const Matrix4cd u = bell_to_computational();
    std::vector<DensityMatrix4> out(t_grid.size());
    par::for_each_index(t_grid.size(), workers, [&](std::size_t it) {
        const VectorXcd psi = full_state(state0, t_grid[it]);
        Matrix4cd rho = Matrix4cd::Zero();
        for (int q = 0; q < 4; ++q)
            for (int qp = 0; qp < 4; ++qp)
                rho(q, qp) = psi.segment(qp * bath_dim, bath_dim)
                                 .dot(psi.segment(q * bath_dim, bath_dim));
        out[it] = {u.adjoint() * rho * u, DmBasis::bell};
    });
    return out;
}

double ExactOracle::full_norm(const TwoQubitState& state0, double t) const {
    return full_state(state0, t).norm();
}

}  // namespace qenc

#include "qenc/density_matrix.hpp"

#include <stdexcept>

namespace qenc {

DensityMatrix4 DensityMatrix4::pure(const TwoQubitState& s, DmBasis basis) {
    DensityMatrix4 dm;
    dm.m = s.amps * s.amps.adjoint();
    dm.basis = basis;
    return dm;
}

void DensityMatrix4::validate(double herm_tol, double trace_tol, double eig_floor) const {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
        throw std::invalid_argument("density matrix not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > trace_tol || std::abs(m.trace().imag()) > trace_tol)
        throw std::invalid_argument("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eig_floor)
        throw std::invalid_argument("density matrix has negative eigenvalue");
}

namespace {
Matrix4cd eigenvector_columns(const EigenSystem& es) {
    Matrix4cd v;
    for (int i = 0; i < 4; ++i) v.col(i) = es.states[i].amps;
    return v;
}
}  // namespace

DensityMatrix4 to_bell(const DensityMatrix4& dm, const EigenSystem& es) {
    if (dm.basis == DmBasis::bell) return dm;
    const Matrix4cd v = eigenvector_columns(es);
    return {v * dm.m * v.adjoint(), DmBasis::bell};
}

DensityMatrix4 to_eigen(const DensityMatrix4& dm, const EigenSystem& es) {
    if (dm.basis == DmBasis::eigen) return dm;
    const Matrix4cd v = eigenvector_columns(es);
    return {v.adjoint() * dm.m * v, DmBasis::eigen};
}

Matrix2cd reduce_to_qubit1(const DensityMatrix4& dm) {
    if (dm.basis != DmBasis::bell)
        throw std::invalid_argument("reduce_to_qubit1 expects a Bell-basis matrix");
    const Matrix4cd u = bell_to_computational();
    const Matrix4cd rc = u * dm.m * u.adjoint();  // computational (s1 s2) basis
    Matrix2cd r = Matrix2cd::Zero();
    for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp)
            r(s, sp) = rc(2 * s, 2 * sp) + rc(2 * s + 1, 2 * sp + 1);
    return r;
}

double trace_distance(const MatrixXcd& a, const MatrixXcd& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qenc

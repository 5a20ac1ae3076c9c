#pragma once

#include "qenc/model.hpp"

namespace qenc {

enum class DmBasis { bell, eigen };

// 4x4 density matrix of the two-qubit subsystem, tagged with the basis its
// entries refer to.
struct DensityMatrix4 {
    Matrix4cd m = Matrix4cd::Zero();
    DmBasis basis = DmBasis::bell;

    static DensityMatrix4 pure(const TwoQubitState& s, DmBasis basis = DmBasis::bell);

    double trace_real() const { return m.trace().real(); }
    // throws std::invalid_argument if not Hermitian/unit-trace/positive
    void validate(double herm_tol = 1e-12, double trace_tol = 1e-10,
                  double eig_floor = -1e-10) const;
};

// Basis changes through the closed-system eigenvectors.
DensityMatrix4 to_bell(const DensityMatrix4& dm, const EigenSystem& es);
DensityMatrix4 to_eigen(const DensityMatrix4& dm, const EigenSystem& es);

// Reduced state of qubit 1 (computational basis), from a Bell-basis matrix.
Matrix2cd reduce_to_qubit1(const DensityMatrix4& dm);

// Trace distance (1/2)||a - b||_1 between Hermitian matrices.
double trace_distance(const MatrixXcd& a, const MatrixXcd& b);

}  // namespace qenc

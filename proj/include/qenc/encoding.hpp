#pragma once

#include <array>
#include <string>

#include "qenc/density_matrix.hpp"
#include "qenc/model.hpp"

namespace qenc {

// Logical qubit defined by |up_L> and |down_L> in the Bell basis. The
// PHYSICAL pseudo-strategy (single-qubit reduction of qubit 1) carries no
// coefficients and is rejected by the operator constructors below.
struct EncodingStrategy {
    std::string name;
    Vector4cd up = Vector4cd::Zero();
    Vector4cd down = Vector4cd::Zero();
    bool physical = false;

    void validate() const;  // normalization and orthogonality, 1e-12
};

EncodingStrategy make_af();
EncodingStrategy make_symm();
EncodingStrategy make_nsymm();
// up = l_s |S> + sqrt(1-l_s^2) |T,AF>, down = k_tfp |T,F+> + sqrt(1-k_tfp^2) |T,F->
EncodingStrategy make_optsymm(double l_s, double k_tfp);
// up = |S>, down = sqrt(1-2k^2) |T,AF> + k |T,F+> + k |T,F->, k in (0, 1/sqrt(2))
EncodingStrategy make_optnsymm(double k_tfp);
EncodingStrategy make_physical();

// Parses "AF", "SYMM", "NSYMM", "PHYSICAL", "OPTSYMM(l,k)", "OPTNSYMM(k)".
EncodingStrategy parse_strategy(const std::string& text);

struct EncodedState {
    Matrix2cd rho;                       // built from the logical Pauli averages
    Eigen::Vector3d bloch;               // raw <sx_E>, <sy_E>, <sz_E>
    double min_eigenvalue = 0.0;         // physicality indicator, no clamping
};

// Logical Pauli operators sx_E, sy_E, sz_E as 4x4 Bell-basis matrices.
std::array<Matrix4cd, 3> encoded_paulis(const EncodingStrategy& s);

// Projector onto span{up, down}.
Matrix4cd projector(const EncodingStrategy& s);

// 2x2 encoded state from Pauli averages of a Bell-basis density matrix.
EncodedState encoded_dm(const DensityMatrix4& rho, const EncodingStrategy& s);

// cos(theta)|up> + e^{i phi} sin(theta)|down>.
TwoQubitState logical_initial_state(const EncodingStrategy& s, double theta, double phi);

}  // namespace qenc

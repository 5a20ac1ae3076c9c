#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace qenc {

using cplx = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::Vector4cd;
using Eigen::VectorXcd;

enum class CutoffKind { hard, exponential };

// Bell-basis ordering used everywhere: (S, T_AF, T_F+, T_F-).
enum BellIndex : int { kSinglet = 0, kTripletAF = 1, kTripletFp = 2, kTripletFm = 3 };

struct ModelParams {
    double delta = 1.0;        // qubit frequency, the energy unit
    double nu = 0.0;           // qubit-qubit coupling, in units of delta
    double alpha = 0.0;        // dimensionless bath coupling
    double omega_c = 10.0;     // bath cutoff frequency
    int n_modes = 40;          // number of bath modes N
    int n_bos = 3;             // local boson Hilbert-space dimension
    double ohmic_exponent = 1.0;
    CutoffKind cutoff_kind = CutoffKind::hard;
    double q0 = 1.0;           // double-well minimum position, fixed to 1
    // Rescales couplings by 1/sqrt(2) so that sum(lambda_i^2) over a bin
    // matches the integral of the spectral density; default keeps the
    // verbatim closed form lambda_i = (omega_c/N) sqrt(alpha i).
    bool spectral_consistent = false;

    void validate() const;  // throws std::invalid_argument
};

struct TwoQubitState {
    Vector4cd amps = Vector4cd::Zero();  // Bell-basis amplitudes

    double norm() const { return amps.norm(); }
    TwoQubitState normalized() const;
};

// Named Bell basis states.
TwoQubitState bell_state(BellIndex which);

struct EigenSystem {
    std::array<double, 4> energies{};      // level labels 0 (ground) .. 3 (top)
    double a = 0.0;                        // T,AF weight in the ground state, a > 0
    double b = 0.0;                        // T,F+ weight with flipped sign, b <= 0
    std::array<TwoQubitState, 4> states{};         // |0>,|1>,|2>,|3> in Bell basis
};

struct BathMode {
    double omega = 0.0;
    double lambda = 0.0;
};

struct BathDiscretization {
    std::vector<BathMode> modes;
};

// Closed two-qubit spectrum in level-label order
// {-sqrt(1+(nu/2)^2), -nu/2, +nu/2, +sqrt(1+(nu/2)^2)} * delta.
std::array<double, 4> spectrum(const ModelParams& p);

// (a, b) coefficients mixing |T,AF> and |T,F+> in the ground/top eigenstates.
std::pair<double, double> bell_mixing_coeffs(const ModelParams& p);

EigenSystem eigensystem(const ModelParams& p);

// Linear frequency grid omega_i = i*omega_c/N with couplings from the
// closed-form lambda_i = (omega_c/N) sqrt(alpha i) (Ohmic, hard cutoff),
// generalized through the spectral density for other exponents/cutoffs.
BathDiscretization bath_discretization(const ModelParams& p);

// Bath spectral density J(omega) = (alpha/2) omega^s omega_c^(1-s) f(omega/omega_c).
double spectral_density(double omega, const ModelParams& p);

// ----- Fixed 4x4 operators (Bell-basis representation) -----

// Two-qubit Hamiltonian -delta/2 (sx1+sx2) - nu/2 sz1 sz2 in the Bell basis.
Matrix4cd qubit_hamiltonian_bell(const ModelParams& p);

// Coupling operator sz1+sz2 in the Bell basis (maps T,AF <-> T,F+; kills S and T,F-).
Matrix4cd coupling_operator_bell();

// Unitary with Bell states as columns: v_comp = U * v_bell.
Matrix4cd bell_to_computational();

// ----- Full qubits (x) bath product space -----

// Dimension 4 * n_bos^n_modes of the full product space.
long full_dimension(const ModelParams& p);

// Dense Hamiltonian in the computational (x) Fock basis; refuses when
// full_dimension exceeds dim_cap.
MatrixXcd hamiltonian_dense(const ModelParams& p, long dim_cap = 4096);

}  // namespace qenc

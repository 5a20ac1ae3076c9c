#include "qenc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qenc {

void ModelParams::validate() const {
    if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
    if (!(omega_c > 0)) throw std::invalid_argument("omega_c must be > 0");
    if (n_modes < 0) throw std::invalid_argument("n_modes must be >= 0");
    if (n_bos < 2) throw std::invalid_argument("n_bos must be >= 2");
    if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
    if (ohmic_exponent <= 0) throw std::invalid_argument("ohmic_exponent must be > 0");
    if (q0 != 1.0) throw std::invalid_argument("q0 is fixed to 1");
}

TwoQubitState TwoQubitState::normalized() const {
    TwoQubitState s;
    s.amps = amps / amps.norm();
    return s;
}

TwoQubitState bell_state(BellIndex which) {
    TwoQubitState s;
    s.amps[which] = 1.0;
    return s;
}

std::array<double, 4> spectrum(const ModelParams& p) {
    const double half = p.nu / (2.0 * p.delta);
    const double top = std::sqrt(1.0 + half * half);
    return {-top * p.delta, -half * p.delta, half * p.delta, top * p.delta};
}

std::pair<double, double> bell_mixing_coeffs(const ModelParams& p) {
    const double x = p.nu / p.delta;
    const double r = std::sqrt(4.0 + x * x);
    const double den = std::sqrt(4.0 + (x + r) * (x + r));
    return {2.0 / den, -(r + x) / den};
}

EigenSystem eigensystem(const ModelParams& p) {
    EigenSystem es;
    es.energies = spectrum(p);
    auto [a, b] = bell_mixing_coeffs(p);
    es.a = a;
    es.b = b;
    es.states[0].amps << 0.0, a, -b, 0.0;
    es.states[1].amps << 0.0, 0.0, 0.0, 1.0;
    es.states[2].amps << 1.0, 0.0, 0.0, 0.0;
    es.states[3].amps << 0.0, b, a, 0.0;
    return es;
}

double spectral_density(double omega, const ModelParams& p) {
    if (omega <= 0) throw std::invalid_argument("spectral_density requires omega > 0");
    double f = 1.0;
    switch (p.cutoff_kind) {
        case CutoffKind::hard: f = omega <= p.omega_c ? 1.0 : 0.0; break;
        case CutoffKind::exponential: f = std::exp(-omega / p.omega_c); break;
    }
    const double s = p.ohmic_exponent;
    return 0.5 * p.alpha * std::pow(omega, s) * std::pow(p.omega_c, 1.0 - s) * f;
}

BathDiscretization bath_discretization(const ModelParams& p) {
    p.validate();
    BathDiscretization bath;
    bath.modes.resize(p.n_modes);
    const double dw = p.omega_c / p.n_modes;
    for (int i = 1; i <= p.n_modes; ++i) {
        const double w = i * dw;
        // lambda_i^2 = 2 J(omega_i) dw reproduces the Ohmic hard-cutoff
        // closed form (omega_c/N) sqrt(alpha i); the consistent variant
        // drops the factor 2.
        double lam2 = 2.0 * spectral_density(w, p) * dw;
        if (p.spectral_consistent) lam2 *= 0.5;
        bath.modes[i - 1] = {w, std::sqrt(lam2)};
    }
    return bath;
}

Matrix4cd qubit_hamiltonian_bell(const ModelParams& p) {
    Matrix4cd h = Matrix4cd::Zero();
    const double hn = 0.5 * p.nu;
    h(kSinglet, kSinglet) = hn;
    h(kTripletAF, kTripletAF) = hn;
    h(kTripletFp, kTripletFp) = -hn;
    h(kTripletFm, kTripletFm) = -hn;
    h(kTripletAF, kTripletFp) = -p.delta;
    h(kTripletFp, kTripletAF) = -p.delta;
    return h;
}

Matrix4cd coupling_operator_bell() {
    // sz1+sz2 annihilates both antiparallel states and maps T,F+ <-> T,F-.
    Matrix4cd c = Matrix4cd::Zero();
    c(kTripletFp, kTripletFm) = 2.0;
    c(kTripletFm, kTripletFp) = 2.0;
    return c;
}

Matrix4cd bell_to_computational() {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix4cd u = Matrix4cd::Zero();
    // rows: |00>, |01>, |10>, |11>; columns: S, T_AF, T_F+, T_F-
    u(1, kSinglet) = r;
    u(2, kSinglet) = -r;
    u(1, kTripletAF) = r;
    u(2, kTripletAF) = r;
    u(0, kTripletFp) = r;
    u(3, kTripletFp) = r;
    u(0, kTripletFm) = r;
    u(3, kTripletFm) = -r;
    return u;
}

long full_dimension(const ModelParams& p) {
    long dim = 4;
    for (int i = 0; i < p.n_modes; ++i) {
        if (dim > (1L << 40) / p.n_bos) return -1;  // overflow guard
        dim *= p.n_bos;
    }
    return dim;
}

MatrixXcd hamiltonian_dense(const ModelParams& p, long dim_cap) {
    p.validate();
    const long dim = full_dimension(p);
    if (dim < 0 || dim > dim_cap)
        throw std::runtime_error("hamiltonian_dense: full dimension " +
                                 (dim < 0 ? std::string(">2^40") : std::to_string(dim)) +
                                 " exceeds cap " + std::to_string(dim_cap));

    const int nb = p.n_bos;
    const int nm = p.n_modes;
    const long bath_dim = dim / 4;
    const auto bath = bath_discretization(p);

    // Qubit part in the computational basis.
    const Matrix4cd u = bell_to_computational();
    const Matrix4cd hq = u * qubit_hamiltonian_bell(p) * u.adjoint();
    // sz1+sz2 is diagonal there: +2, 0, 0, -2.
    const std::array<double, 4> mism = {2.0, 0.0, 0.0, -2.0};

    MatrixXcd h = MatrixXcd::Zero(dim, dim);

    std::vector<long> stride(nm);  // stride of mode k in the Fock index
    for (int k = 0; k < nm; ++k) {
        long s = 1;
        for (int j = k + 1; j < nm; ++j) s *= nb;
        stride[k] = s;
    }

    for (long b = 0; b < bath_dim; ++b) {
        double ebath = 0.0;
        for (int k = 0; k < nm; ++k) {
            const int occ = static_cast<int>((b / stride[k]) % nb);
            ebath += bath.modes[k].omega * occ;
        }
        for (int q = 0; q < 4; ++q) {
            const long row = q * bath_dim + b;
            h(row, row) += ebath;
            for (int qp = 0; qp < 4; ++qp)
                h(qp * bath_dim + b, row) += hq(qp, q);
            // coupling: m(q) * sum_k lambda_k (a_k + a_k^dag)
            if (mism[q] != 0.0) {
                for (int k = 0; k < nm; ++k) {
                    const int occ = static_cast<int>((b / stride[k]) % nb);
                    if (occ > 0) {  // a_k lowers
                        const long b2 = b - stride[k];
                        h(q * bath_dim + b2, row) +=
                            mism[q] * bath.modes[k].lambda * std::sqrt(double(occ));
                    }
                    if (occ < nb - 1) {  // a_k^dag raises
                        const long b2 = b + stride[k];
                        h(q * bath_dim + b2, row) +=
                            mism[q] * bath.modes[k].lambda * std::sqrt(double(occ + 1));
                    }
                }
            }
        }
    }
    return h;
}

}  // namespace qenc

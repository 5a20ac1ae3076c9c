#include "qenc/encoding.hpp"

#include <cmath>
#include <stdexcept>

namespace qenc {

void EncodingStrategy::validate() const {
    if (physical) return;
    if (std::abs(up.squaredNorm() - 1.0) > 1e-12 || std::abs(down.squaredNorm() - 1.0) > 1e-12)
        throw std::invalid_argument("encoding strategy: coefficients not normalized");
    if (std::abs(up.dot(down)) > 1e-12)
        throw std::invalid_argument("encoding strategy: up/down not orthogonal");
}

EncodingStrategy make_af() {
    EncodingStrategy s;
    s.name = "AF";
    s.up[kSinglet] = 1.0;
    s.down[kTripletAF] = 1.0;
    return s;
}

EncodingStrategy make_symm() {
    EncodingStrategy s;
    s.name = "SYMM";
    s.up[kSinglet] = std::sqrt(3.0) / 2.0;
    s.up[kTripletAF] = 0.5;
    s.down[kTripletFp] = 0.5;
    s.down[kTripletFm] = std::sqrt(3.0) / 2.0;
    return s;
}

EncodingStrategy make_nsymm() {
    EncodingStrategy s;
    s.name = "NSYMM";
    s.up[kSinglet] = 1.0;
    const double r = 1.0 / std::sqrt(3.0);
    s.down[kTripletAF] = r;
    s.down[kTripletFp] = r;
    s.down[kTripletFm] = r;
    return s;
}

EncodingStrategy make_optsymm(double l_s, double k_tfp) {
    if (l_s <= 0 || l_s > 1 || k_tfp <= 0 || k_tfp > 1)
        throw std::invalid_argument("OPTSYMM amplitudes must lie in (0, 1]");
    EncodingStrategy s;
    s.name = "OPTSYMM(" + std::to_string(l_s) + "," + std::to_string(k_tfp) + ")";
    s.up[kSinglet] = l_s;
    s.up[kTripletAF] = std::sqrt(1.0 - l_s * l_s);
    s.down[kTripletFp] = k_tfp;
    s.down[kTripletFm] = std::sqrt(1.0 - k_tfp * k_tfp);
    return s;
}

EncodingStrategy make_optnsymm(double k_tfp) {
    if (!(k_tfp > 0.0) || !(k_tfp < 1.0 / std::sqrt(2.0)))
        throw std::invalid_argument("OPTNSYMM parameter must lie in (0, 1/sqrt(2))");
    EncodingStrategy s;
    s.name = "OPTNSYMM(" + std::to_string(k_tfp) + ")";
    s.up[kSinglet] = 1.0;
    s.down[kTripletAF] = std::sqrt(1.0 - 2.0 * k_tfp * k_tfp);
    s.down[kTripletFp] = k_tfp;
    s.down[kTripletFm] = k_tfp;
    return s;
}

EncodingStrategy make_physical() {
    EncodingStrategy s;
    s.name = "PHYSICAL";
    s.physical = true;
    return s;
}

EncodingStrategy parse_strategy(const std::string& text) {
    const auto paren = text.find('(');
    const std::string head = text.substr(0, paren);
    std::vector<double> args;
    if (paren != std::string::npos) {
        if (text.back() != ')') throw std::invalid_argument("bad strategy syntax: " + text);
        std::string inner = text.substr(paren + 1, text.size() - paren - 2);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            std::size_t used = 0;
            args.push_back(std::stod(inner.substr(pos), &used));
            pos += used;
            if (pos < inner.size() && inner[pos] == ',') ++pos;
        }
    }
    if (head == "AF" && args.empty()) return make_af();
    if (head == "SYMM" && args.empty()) return make_symm();
    if (head == "NSYMM" && args.empty()) return make_nsymm();
    if (head == "PHYSICAL" && args.empty()) return make_physical();
    if (head == "OPTSYMM" && args.size() == 2) return make_optsymm(args[0], args[1]);
    if (head == "OPTNSYMM" && args.size() == 1) return make_optnsymm(args[0]);
    throw std::invalid_argument("unknown strategy: " + text);
}

std::array<Matrix4cd, 3> encoded_paulis(const EncodingStrategy& s) {
    if (s.physical)
        throw std::invalid_argument("PHYSICAL has no encoded Pauli operators");
    s.validate();
    const Matrix4cd ud = s.up * s.down.adjoint();
    const Matrix4cd du = s.down * s.up.adjoint();
    const cplx i1(0.0, 1.0);
    return {Matrix4cd(ud + du), Matrix4cd(-i1 * ud + i1 * du),
            Matrix4cd(s.up * s.up.adjoint() - s.down * s.down.adjoint())};
}

Matrix4cd projector(const EncodingStrategy& s) {
    if (s.physical) throw std::invalid_argument("PHYSICAL has no logical projector");
    s.validate();
    return s.up * s.up.adjoint() + s.down * s.down.adjoint();
}

EncodedState encoded_dm(const DensityMatrix4& rho, const EncodingStrategy& s) {
    if (rho.basis != DmBasis::bell)
        throw std::invalid_argument("encoded_dm expects a Bell-basis matrix");
    const auto paulis = encoded_paulis(s);
    EncodedState e;
    for (int k = 0; k < 3; ++k) e.bloch[k] = (paulis[k] * rho.m).trace().real();
    e.rho << 0.5 * (1.0 + e.bloch[2]), 0.5 * cplx(e.bloch[0], -e.bloch[1]),
        0.5 * cplx(e.bloch[0], e.bloch[1]), 0.5 * (1.0 - e.bloch[2]);
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(e.rho, Eigen::EigenvaluesOnly);
    e.min_eigenvalue = es.eigenvalues().minCoeff();
    return e;
}

TwoQubitState logical_initial_state(const EncodingStrategy& s, double theta, double phi) {
    if (s.physical)
        throw std::invalid_argument("PHYSICAL has no logical basis states");
    s.validate();
    TwoQubitState out;
    out.amps = std::cos(theta) * s.up +
               std::exp(cplx(0.0, phi)) * std::sin(theta) * s.down;
    return out;
}

}  // namespace qenc

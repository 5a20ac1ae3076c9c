#include "qenc/lindblad.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace qenc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

LindbladRates decay_rate(const ModelParams& p) {
    p.validate();
    const auto [a, b] = bell_mixing_coeffs(p);
    const double root = std::sqrt(4.0 * p.delta * p.delta + p.nu * p.nu);

    LindbladRates r;
    r.c = a * a * (root + p.nu);
    r.gamma = kTwoPi * p.alpha * r.c;

    // Transition energies E1-E0 and E3-E1, with the exponential-cutoff J.
    ModelParams pe = p;
    pe.cutoff_kind = CutoffKind::exponential;
    const double e10 = 0.5 * (root - p.nu);
    const double e31 = 0.5 * (root + p.nu);
    r.gamma_01 = e10 > 0 ? 4.0 * b * b * kTwoPi * spectral_density(e10, pe) : 0.0;
    r.gamma_13 = e31 > 0 ? 4.0 * a * a * kTwoPi * spectral_density(e31, pe) : 0.0;
    return r;
}

DensityMatrix4 analytic_density(const DensityMatrix4& rho0, const LindbladRates& rates,
                                double t, bool allow_unspecified_coherences) {
    if (rho0.basis != DmBasis::eigen)
        throw std::invalid_argument("analytic_density expects an eigenbasis matrix");
    if (!allow_unspecified_coherences) {
        const double off = std::max({std::abs(rho0.m(0, 2)), std::abs(rho0.m(1, 2)),
                                     std::abs(rho0.m(2, 3))});
        if (off > 1e-14)
            throw std::invalid_argument(
                "analytic_density: rho_02/rho_12/rho_23 are not covered by the closed "
                "forms; set allow_unspecified_coherences to pass them through");
    }

    const double gt = rates.gamma * t;
    const double eg = std::exp(-gt);
    const double eg2 = std::exp(-0.5 * gt);

    DensityMatrix4 out = rho0;
    const Matrix4cd& r0 = rho0.m;
    out.m(1, 1) = r0(1, 1) * eg + r0(3, 3) * eg * gt;
    out.m(2, 2) = r0(2, 2);
    out.m(3, 3) = r0(3, 3) * eg;
    out.m(0, 0) = 1.0 - out.m(1, 1) - out.m(2, 2) - out.m(3, 3);
    out.m(0, 1) = r0(0, 1) * eg2;
    out.m(1, 0) = std::conj(out.m(0, 1));
    out.m(0, 3) = r0(0, 3) * eg2;
    out.m(3, 0) = std::conj(out.m(0, 3));
    out.m(1, 3) = r0(1, 3) * eg;
    out.m(3, 1) = std::conj(out.m(1, 3));
    return out;
}

double analytic_bell_fidelity(BellIndex initial, const ModelParams& p, double t) {
    if (t < 0) throw std::invalid_argument("analytic_bell_fidelity requires t >= 0");
    if (initial == kSinglet) return 1.0;

    const auto [a, b] = bell_mixing_coeffs(p);
    const auto e = spectrum(p);
    const double gamma = decay_rate(p).gamma;
    const double gt = gamma * t;
    const double eg = std::exp(-gt);
    const double eg2 = std::exp(-0.5 * gt);
    const double a2 = a * a, b2 = b * b;
    const double osc = 2.0 * a2 * b2 * eg2 * std::cos((e[0] - e[3]) * t);

    double f2 = 0.0;
    switch (initial) {
        case kTripletFm:
            return eg2;
        case kTripletFp:
            f2 = b2 + (a2 * a2 - a2 * b2 * (1.0 + gt)) * eg + osc;
            break;
        case kTripletAF:
            f2 = a2 + (b2 * b2 - a2 * b2 * (1.0 + gt)) * eg + osc;
            break;
        default:
            throw std::invalid_argument("analytic_bell_fidelity: unsupported initial state");
    }
    return std::sqrt(std::max(0.0, f2));
}

namespace {

Matrix4cd lindblad_rhs(const Matrix4cd& rho, const Eigen::Vector4d& energies, double gamma) {
    Matrix4cd d = Matrix4cd::Zero();
    // -i [H, rho] with H = diag(E)
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            d(i, j) = cplx(0.0, -(energies[i] - energies[j])) * rho(i, j);
    // gamma ( |0><1| rho |1><0| - 1/2 {|1><1|, rho} )
    d(0, 0) += gamma * rho(1, 1);
    for (int k = 0; k < 4; ++k) {
        d(1, k) += -0.5 * gamma * rho(1, k);
        d(k, 1) += -0.5 * gamma * rho(k, 1);
    }
    // gamma ( |1><3| rho |3><1| - 1/2 {|3><3|, rho} )
    d(1, 1) += gamma * rho(3, 3);
    for (int k = 0; k < 4; ++k) {
        d(3, k) += -0.5 * gamma * rho(3, k);
        d(k, 3) += -0.5 * gamma * rho(k, 3);
    }
    return d;
}

}  // namespace

std::vector<DensityMatrix4> rk4_lindblad(const DensityMatrix4& rho0, const ModelParams& p,
                                         double dt, double t_final) {
    if (rho0.basis != DmBasis::eigen)
        throw std::invalid_argument("rk4_lindblad expects an eigenbasis matrix");
    if (dt <= 0 || t_final < 0) throw std::invalid_argument("rk4_lindblad: bad time grid");

    const auto es = eigensystem(p);
    const Eigen::Vector4d energies(es.energies[0], es.energies[1], es.energies[2],
                                   es.energies[3]);
    const double gamma = decay_rate(p).gamma;
    if (gamma > 0 && dt > 0.1 / gamma)
        std::cerr << "rk4_lindblad: dt = " << dt << " exceeds 0.1/gamma = " << 0.1 / gamma
                  << "; local error ~ " << std::pow(gamma * dt, 5) << " per step\n";

    const long n_steps = std::lround(t_final / dt);
    std::vector<DensityMatrix4> out;
    out.reserve(n_steps + 1);
    out.push_back(rho0);

    Matrix4cd rho = rho0.m;
    for (long s = 0; s < n_steps; ++s) {
        const Matrix4cd k1 = lindblad_rhs(rho, energies, gamma);
        const Matrix4cd k2 = lindblad_rhs(rho + 0.5 * dt * k1, energies, gamma);
        const Matrix4cd k3 = lindblad_rhs(rho + 0.5 * dt * k2, energies, gamma);
        const Matrix4cd k4 = lindblad_rhs(rho + dt * k3, energies, gamma);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back({rho, DmBasis::eigen});
    }
    return out;
}

namespace {
DensityMatrix4 apply_eigenphases(const DensityMatrix4& rho, const EigenSystem& es, double t,
                                 double sign) {
    if (rho.basis != DmBasis::eigen)
        throw std::invalid_argument("picture change expects an eigenbasis matrix");
    DensityMatrix4 out = rho;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out.m(i, j) *= std::exp(cplx(0.0, sign * (es.energies[i] - es.energies[j]) * t));
    return out;
}
}  // namespace

DensityMatrix4 interaction_to_schroedinger(const DensityMatrix4& rho, const EigenSystem& es,
                                           double t) {
    return apply_eigenphases(rho, es, t, -1.0);
}

DensityMatrix4 schroedinger_to_interaction(const DensityMatrix4& rho, const EigenSystem& es,
                                           double t) {
    return apply_eigenphases(rho, es, t, +1.0);
}

}  // namespace qenc

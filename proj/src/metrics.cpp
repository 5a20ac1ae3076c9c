#include "qenc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qenc {

namespace {

// Hermitian PSD square root; eigenvalues in [-1e-10, 0) are clipped to 0,
// anything lower is rejected.
MatrixXcd psd_sqrt(const MatrixXcd& m, const char* who) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    for (long i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-10)
            throw std::invalid_argument(std::string(who) +
                                        ": matrix has eigenvalue below -1e-10");
        ev[i] = ev[i] > 0 ? std::sqrt(ev[i]) : 0.0;
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

void check_density(const MatrixXcd& m, const char* who) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": not square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument(std::string(who) + ": not Hermitian");
}

}  // namespace

double uhlmann_fidelity_general(const MatrixXcd& rho_a, const MatrixXcd& rho_b) {
    check_density(rho_a, "uhlmann_fidelity");
    check_density(rho_b, "uhlmann_fidelity");
    if (rho_a.rows() != rho_b.rows())
        throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
    const MatrixXcd sa = psd_sqrt(rho_a, "uhlmann_fidelity");
    MatrixXcd inner = sa * rho_b * sa;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
    // eigenvalues at relative machine-noise scale would contribute sqrt-of-
    // noise; floor them before the square root
    const double floor = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0) * 1e-14;
    double f = 0.0;
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > floor) f += std::sqrt(es.eigenvalues()[i]);
    return f;
}

double uhlmann_fidelity(const MatrixXcd& rho_a, const MatrixXcd& rho_b) {
    check_density(rho_a, "uhlmann_fidelity");
    check_density(rho_b, "uhlmann_fidelity");
    if (rho_a.rows() != rho_b.rows())
        throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ea(rho_a);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eb(rho_b);
    if (ea.eigenvalues().minCoeff() < -1e-10 || eb.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("uhlmann_fidelity: matrix has eigenvalue below -1e-10");
    // sqrt(<psi|rho|psi>) when one argument is pure
    for (int which = 0; which < 2; ++which) {
        const auto& es = which == 0 ? eb : ea;
        const MatrixXcd& other = which == 0 ? rho_a : rho_b;
        const long top = es.eigenvalues().size() - 1;
        if (std::abs(es.eigenvalues()[top] - 1.0) <= 1e-12) {
            const VectorXcd psi = es.eigenvectors().col(top);
            const double val = std::real(psi.dot(other * psi));
            return std::sqrt(std::max(0.0, val));
        }
    }
    return uhlmann_fidelity_general(rho_a, rho_b);
}

double purity(const MatrixXcd& rho) { return (rho * rho).trace().real(); }

double leakage(const EncodingStrategy& s, const DensityMatrix4& rho0,
               const DensityMatrix4& rho_t) {
    if (rho0.basis != DmBasis::bell || rho_t.basis != DmBasis::bell)
        throw std::invalid_argument("leakage expects Bell-basis matrices");
    const Matrix4cd pi = projector(s);
    const double p0 = std::abs((pi * rho0.m).trace());
    const double pt = std::abs((pi * rho_t.m).trace());
    return (p0 - pt) / (2.0 * std::sqrt(2.0));
}

double sampling_faithfulness(const std::vector<MatrixXcd>& rhos) {
    if (rhos.empty()) throw std::invalid_argument("sampling_faithfulness: empty ensemble");
    const long dim = rhos.front().rows();
    MatrixXcd mean = MatrixXcd::Zero(dim, dim);
    for (const auto& r : rhos) {
        if (r.rows() != dim || r.cols() != dim)
            throw std::invalid_argument("sampling_faithfulness: dimension mismatch");
        mean += r;
    }
    mean /= double(rhos.size());
    mean -= MatrixXcd::Identity(dim, dim) / double(dim);
    return mean.norm();
}

double sampling_faithfulness(const std::vector<TwoQubitState>& states) {
    std::vector<MatrixXcd> rhos;
    rhos.reserve(states.size());
    for (const auto& s : states) rhos.emplace_back(s.amps * s.amps.adjoint());
    return sampling_faithfulness(rhos);
}

TimeSeries aggregate(const std::string& name, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& per_realization) {
    if (per_realization.empty())
        throw std::invalid_argument("aggregate: no realizations");
    for (const auto& row : per_realization)
        if (row.size() != times.size())
            throw std::invalid_argument("aggregate: time-grid mismatch");

    TimeSeries ts;
    ts.name = name;
    ts.times = times;
    ts.per_realization = per_realization;
    const std::size_t nr = per_realization.size();
    ts.mean.resize(times.size());
    ts.std_dev.resize(times.size());
    // Sums run over a sorted copy so that permuting realizations cannot
    // change the floating-point result.
    std::vector<double> column(nr);
    for (std::size_t t = 0; t < times.size(); ++t) {
        for (std::size_t r = 0; r < nr; ++r) column[r] = per_realization[r][t];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column) sum += v;
        const double mean = sum / double(nr);
        for (std::size_t r = 0; r < nr; ++r) {
            const double d = column[r] - mean;
            column[r] = d * d;
        }
        std::sort(column.begin(), column.end());
        double var = 0.0;
        for (double v : column) var += v;
        ts.mean[t] = mean;
        ts.std_dev[t] = std::sqrt(var / double(nr));
    }
    return ts;
}

}  // namespace qenc

#include "qenc/fitting.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qenc {

double fit_model(const double c[4], double t) {
    return c[0] + c[1] * t + (1.0 - c[0]) * std::cos(c[2] * t) * std::exp(-c[3] * t);
}

namespace {

double residual_rms(const double c[4], const std::vector<double>& t,
                    const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = fit_model(c, t[i]) - v[i];
        s += d * d;
    }
    return std::sqrt(s / double(t.size()));
}

// slope of the least-squares straight line
double linear_slope(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = t.size();
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        mv += v[i];
    }
    mt /= double(n);
    mv /= double(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - mt) * (v[i] - mv);
        den += (t[i] - mt) * (t[i] - mt);
    }
    return den > 0 ? num / den : 0.0;
}

// dominant angular frequency of the detrended series (naive DFT on the
// sample index, mapped back through the mean spacing)
double dominant_frequency(const std::vector<double>& t, const std::vector<double>& v,
                          double slope) {
    const std::size_t n = t.size();
    std::vector<double> d(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = v[i] - slope * t[i];
        mean += d[i];
    }
    mean /= double(n);
    for (auto& x : d) x -= mean;

    const double span = t.back() - t.front();
    double best_mag = -1.0;
    std::size_t best_k = 1;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            acc += d[i] * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi *
                                                                 double(k) * double(i) /
                                                                 double(n)));
        const double mag = std::abs(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best_k = k;
        }
    }
    return 2.0 * std::numbers::pi * double(best_k) * double(n - 1) / (double(n) * span);
}

}  // namespace

FitResult fit_fidelity(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_fidelity: size mismatch");
    if (times.size() < 20) throw std::invalid_argument("fit_fidelity: need at least 20 points");
    for (double v : values)
        if (!(v > 0.0 && v <= 1.05))
            throw std::invalid_argument("fit_fidelity: values must lie in (0, 1.05]");

    const std::size_t n = times.size();
    const double span = times.back() - times.front();

    double c[4];
    {  // data-driven initialization
        const std::size_t tail = std::max<std::size_t>(1, n / 10);
        double m = 0.0;
        for (std::size_t i = n - tail; i < n; ++i) m += values[i];
        c[0] = m / double(tail);
        c[1] = linear_slope(times, values);
        c[2] = dominant_frequency(times, values, c[1]);
        c[3] = 3.0 / span;
    }

    FitResult res;
    if (std::abs(1.0 - c[0]) < 1e-12) {
        // flat series: the oscillation amplitude vanishes and c3, c4 drop out
        res.c1 = c[0];
        res.c2 = c[1];
        res.c3 = 0.0;
        res.c4 = 0.0;
        res.residual_rms = residual_rms(c, times, values);
        res.converged = true;
        res.unidentifiable = true;
        return res;
    }

    double rms = residual_rms(c, times, values);
    double damping = 1e-6;
    for (int iter = 0; iter < 500 && !res.converged; ++iter) {
        Eigen::MatrixXd jac(n, 4);
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = times[i];
            const double env = std::exp(-c[3] * t);
            const double osc = std::cos(c[2] * t);
            r[i] = fit_model(c, t) - values[i];
            jac(i, 0) = 1.0 - osc * env;
            jac(i, 1) = t;
            jac(i, 2) = -(1.0 - c[0]) * t * std::sin(c[2] * t) * env;
            jac(i, 3) = -(1.0 - c[0]) * t * osc * env;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool accepted = false;
        for (int attempt = 0; attempt < 25 && !accepted; ++attempt) {
            Eigen::MatrixXd lhs = jtj;
            for (int k = 0; k < 4; ++k) lhs(k, k) += damping * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd step = lhs.ldlt().solve(jtr);
            double trial[4] = {c[0] - step[0], c[1] - step[1], c[2] - step[2], c[3] - step[3]};
            if (trial[3] < 0.0) trial[3] = 0.0;
            const double trial_rms = residual_rms(trial, times, values);
            if (trial_rms <= rms) {
                const double rel = rms > 0 ? (rms - trial_rms) / rms : 0.0;
                for (int k = 0; k < 4; ++k) c[k] = trial[k];
                rms = trial_rms;
                damping = std::max(damping / 3.0, 1e-12);
                accepted = true;
                if (rel < 1e-10) res.converged = true;
            } else {
                damping *= 2.0;
            }
        }
        if (!accepted) {
            // no damping level yields an improving step: the achievable
            // residual change is zero, which satisfies the tolerance
            res.converged = true;
            break;
        }
    }

    res.c1 = c[0];
    res.c2 = c[1];
    res.c3 = c[2];
    res.c4 = c[3];
    res.residual_rms = rms;
    res.no_decay = c[3] == 0.0;
    if (std::abs(1.0 - c[0]) < 1e-12) res.unidentifiable = true;
    return res;
}

double extrapolate(const FitResult& fit, double t) {
    if (fit.unidentifiable)
        throw std::invalid_argument("extrapolate: fit is flagged unidentifiable");
    const double c[4] = {fit.c1, fit.c2, fit.c3, fit.c4};
    return fit_model(c, t);
}

}  // namespace qenc

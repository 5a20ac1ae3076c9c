#pragma once

#include <vector>

namespace qenc {

// Damped-oscillation model c1 + c2 t + (1 - c1) cos(c3 t) exp(-c4 t);
// equals 1 at t = 0 by construction.
struct FitResult {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double residual_rms = 0.0;
    bool converged = false;
    bool no_decay = false;        // c4 pinned at its lower bound 0
    bool unidentifiable = false;  // oscillation amplitude ~ 0; c3, c4 meaningless

    double tau() const { return c4 > 0 ? 1.0 / c4 : 0.0; }
};

double fit_model(const double c[4], double t);

// Damped Gauss-Newton least squares; see FitResult for the model. The
// initial guess is data-driven: c1 from the tail mean, c2 from a straight
// line, c3 from the dominant DFT frequency of the detrended series, c4 from
// a third of the time span. Converged when the relative residual change
// drops below 1e-10 (500 iterations cap).
FitResult fit_fidelity(const std::vector<double>& times, const std::vector<double>& values);

// Model value of a finished fit at time t; refuses unidentifiable fits.
double extrapolate(const FitResult& fit, double t);

}  // namespace qenc

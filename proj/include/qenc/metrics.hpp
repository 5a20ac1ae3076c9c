#pragma once

#include <string>
#include <vector>

#include "qenc/density_matrix.hpp"
#include "qenc/encoding.hpp"
#include "qenc/model.hpp"

namespace qenc {

// Tr sqrt( sqrt(a) b sqrt(a) ). Falls back to sqrt(<psi|a|psi>) when b is
// pure. Inputs with eigenvalues below -1e-10 are rejected; small negative
// eigenvalues from truncation noise are clipped to zero.
double uhlmann_fidelity(const MatrixXcd& rho_a, const MatrixXcd& rho_b);

// General path without the pure-state shortcut (kept callable for tests).
double uhlmann_fidelity_general(const MatrixXcd& rho_a, const MatrixXcd& rho_b);

double purity(const MatrixXcd& rho);

// (|Tr Pi rho0| - |Tr Pi rho_t|) / (2 sqrt(2)); negative values mean the
// dynamics pushed population into the logical subspace.
double leakage(const EncodingStrategy& s, const DensityMatrix4& rho0,
               const DensityMatrix4& rho_t);

// Frobenius norm of (mean_i rho_i - I/dim).
double sampling_faithfulness(const std::vector<MatrixXcd>& rhos);
double sampling_faithfulness(const std::vector<TwoQubitState>& states);

struct TimeSeries {
    std::string name;
    std::vector<double> times;
    std::vector<std::vector<double>> per_realization;  // [realization][time]
    std::vector<double> mean;
    std::vector<double> std_dev;  // population convention
};

// Mean and population standard deviation per time point, accumulated in
// realization order so the result is bitwise reproducible.
TimeSeries aggregate(const std::string& name, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& per_realization);

}  // namespace qenc

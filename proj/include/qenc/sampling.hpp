#pragma once

#include <utility>
#include <vector>

#include "qenc/model.hpp"

namespace qenc {

// Deterministic enumeration of the two-qubit initial-state ensemble:
// squared magnitudes on {0, 1/4, 1/2, 3/4, 1} summing to one, phases on
// {0, pi/2, pi, 3pi/2}; zero-magnitude coefficients carry phase 0 and the
// first nonzero coefficient (in Bell order S, T_AF, T_F+, T_F-) is gauged
// to phase 0. Yields exactly 332 states, lexicographic over
// (|d_S|^2, |d_TAF|^2, |d_TF+|^2, |d_TF-|^2, phases).
std::vector<TwoQubitState> enumerate_bell_grid();

// 18 (theta, phi) pairs: theta in {pi/8, pi/4, 3pi/8} x phi in k*pi/3,
// k = 0..5; the ensemble mean outer product is I/2 analytically.
std::vector<std::pair<double, double>> logical_grid();

}  // namespace qenc

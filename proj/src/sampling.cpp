#include "qenc/sampling.hpp"

#include <cmath>
#include <numbers>

namespace qenc {

std::vector<TwoQubitState> enumerate_bell_grid() {
    // quarters of the squared magnitude, 0..4
    static const cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<TwoQubitState> out;
    out.reserve(332);

    for (int m0 = 0; m0 <= 4; ++m0)
        for (int m1 = 0; m1 + m0 <= 4; ++m1)
            for (int m2 = 0; m2 + m1 + m0 <= 4; ++m2) {
                const int m3 = 4 - m0 - m1 - m2;
                const int mag[4] = {m0, m1, m2, m3};
                int first_nonzero = 0;
                while (first_nonzero < 4 && mag[first_nonzero] == 0) ++first_nonzero;

                // free phases: every nonzero coefficient past the gauge-fixed one
                int free_idx[4];
                int n_free = 0;
                for (int i = first_nonzero + 1; i < 4; ++i)
                    if (mag[i] > 0) free_idx[n_free++] = i;

                int total = 1;
                for (int i = 0; i < n_free; ++i) total *= 4;
                for (int code = 0; code < total; ++code) {
                    int phase[4] = {0, 0, 0, 0};
                    int rest = code;
                    // phase of the earliest free coefficient varies slowest
                    for (int i = n_free - 1; i >= 0; --i) {
                        phase[free_idx[i]] = rest % 4;
                        rest /= 4;
                    }
                    TwoQubitState s;
                    for (int i = 0; i < 4; ++i)
                        s.amps[i] = std::sqrt(mag[i] / 4.0) * kPhase[phase[i]];
                    out.push_back(s);
                }
            }
    return out;
}

std::vector<std::pair<double, double>> logical_grid() {
    std::vector<std::pair<double, double>> grid;
    grid.reserve(18);
    const double pi = std::numbers::pi;
    for (double theta : {pi / 8.0, pi / 4.0, 3.0 * pi / 8.0})
        for (int k = 0; k < 6; ++k) grid.emplace_back(theta, k * pi / 3.0);
    return grid;
}

}  // namespace qenc

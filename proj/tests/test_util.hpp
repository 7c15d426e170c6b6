#pragma once

#include <cmath>
#include <vector>

#include "specgap/eigensolve.hpp"

namespace testutil {

// Least-squares slope of log y vs log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Ground state of -d^2/dy^2 + y^4/4 on [-Y, Y]: dense tridiagonal solves at
// dyadic steps with Richardson extrapolation. Independent of the library's
// iterative path (dense solver only).
inline double quartic_ground_oracle() {
    const double Y = 9.0;
    auto solve = [&](int n) {
        specgap::Grid g = specgap::Grid::dirichlet_1d(-Y, Y, n);
        auto op = specgap::assemble_montgomery_1d(1.0, 0.0, 1, g);
        specgap::SolveOptions so;
        so.force_iterative = false;
        so.dense_cutoff = 1 << 30;
        so.want_vectors = false;
        return specgap::lowest_eigenpairs(op, 1, so).eigenvalues[0];
    };
    // steps 2Y/(n+1) ~ 2^-7 .. 2^-9, extrapolated on the finest pair
    const double l1 = solve(2 * 128 * 9 - 1);
    const double l2 = solve(2 * 256 * 9 - 1);
    return (4 * l2 - l1) / 3.0;
}

} // namespace testutil

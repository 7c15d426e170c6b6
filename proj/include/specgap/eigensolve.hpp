#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "specgap/operator.hpp"

namespace specgap {

struct SolveOptions {
    double tol = 1e-9;          // residual tolerance relative to op.scale
    std::uint64_t seed = 0x5eedbeefULL;
    bool want_vectors = true;
    bool force_iterative = false; // sweep drivers bypass the dense path
    int dense_cutoff = 3000;
    int max_steps_per_pair = 50;  // Lanczos steps cap = max(200, this * m)
    double shift = 0.0;           // shift-invert shift (operators are PSD)
};

// Sorted low-lying eigenvalues with residual certificates and (optionally)
// eigenvectors. discretization_error is filled by richardson_refine.
struct Spectrum {
    std::vector<double> eigenvalues;
    Eigen::MatrixXcd eigenvectors;          // n x m when requested
    std::vector<double> residuals;          // ||Mv - lambda v|| / ||v||
    std::vector<double> discretization_error;
    double h = 0;
    int size() const { return static_cast<int>(eigenvalues.size()); }
};

// m smallest eigenpairs: dense solver when n <= 3000, otherwise shift-invert
// Lanczos with a sparse factorization and full reorthogonalization.
// Deterministic for a fixed seed. Throws NoConvergence when a requested pair
// misses the residual tolerance within the iteration cap.
Spectrum lowest_eigenpairs(const DiscreteOperator& op, int m,
                           const SolveOptions& opts = {});

// Number of eigenvalues strictly below t, via the inertia of the LDLT
// factorization of (M - t I). Exact in exact arithmetic; used to certify
// window exhaustion.
int count_below(const DiscreteOperator& op, double t);

// All eigenpairs below `threshold`, certified complete: the count comes from
// count_below and the solve also returns the first eigenvalue above the
// threshold when one exists. Throws WindowNotExhausted when certification
// fails.
Spectrum spectrum_below(const DiscreteOperator& op, double threshold,
                        const SolveOptions& opts = {});

// Solves on two dyadic grid levels (the builder maps level 0 -> Delta,
// level 1 -> Delta/2), extrapolates lambda* = (4 lambda_{D/2} - lambda_D)/3
// and attaches |lambda_{D/2} - lambda_D| / 3 as the per-eigenvalue error.
// Eigenvectors are those of the finer level.
Spectrum richardson_refine(const std::function<DiscreteOperator(int level)>& builder,
                           int m, const SolveOptions& opts = {});

struct BandFunctionTable {
    std::vector<double> b_samples;
    std::vector<std::vector<double>> mu; // mu[j][i] = mu_{j+1}(b_i)
    int k = 0;
    std::vector<double> crossings_flagged; // b at ambiguous transitions
    int bands() const { return static_cast<int>(mu.size()); }
};

// Reorders raw sorted eigenvalues into continuous branches mu_j(b) by
// maximal eigenvector overlap between adjacent b-samples; falls back to the
// sorted order (with a flag) when the best overlap is below `threshold`.
BandFunctionTable track_bands(const std::vector<Spectrum>& spectra,
                              const std::vector<double>& b_samples,
                              double threshold = 0.7);

} // namespace specgap

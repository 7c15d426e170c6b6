#pragma once

#include "specgap/quasimode.hpp"

namespace specgap {

struct Interval {
    double lo = 0, hi = 0;
    double length() const { return hi - lo; }
};

// Detected spectral gaps inside a window, with the certified middle third of
// each interior gap.
struct GapReport {
    Interval window;
    std::vector<Interval> gaps;       // interior gaps, sorted, disjoint
    std::vector<Interval> gap_cores;  // middle third of each interior gap
    std::vector<Interval> edge_gaps;  // window-edge gaps, if any
    int count = 0;                    // number of interior gaps
    double h = 0;
    double delta = 0;
    std::string method_tag;
    double scaling_fit = 0;           // optional, filled by sweep drivers
};

// [mu - r, mu + r]; by self-adjointness this interval meets the spectrum of
// the operator the quasimode was evaluated on. GridMismatch when the vector
// does not live on op's grid.
Interval certify_eigenvalue(const DiscreteOperator& op, const Quasimode& q);

struct WeylRow {
    double h = 0;
    double threshold = 0;
    int count = 0;
    double normalized = 0; // count * h^2
};

// Per-h count of eigenvalues in [0, threshold_fn(h)] and the normalized
// product N_h h^2. Every spectrum must certifiably exhaust its window: it
// needs at least one eigenvalue above the threshold (WindowNotExhausted).
std::vector<WeylRow> weyl_count(const std::vector<Spectrum>& spectra,
                                const std::vector<double>& h_values,
                                const std::function<double(double)>& threshold_fn);

// Maximal eigenvalue-free subintervals of the window at resolution delta
// (shorter gaps are below resolution and not reported). Requires delta above
// the discretization error of the spectrum (ResolutionTooFine).
GapReport locate_gaps(const Spectrum& spectrum, Interval window, double delta);

// For each consecutive pair of reference eigenvalues, the scaled interval
// [(lambda_m + s g) h^{(2k+2)/(k+2)}, (lambda_{m+1} - s g) h^{(2k+2)/(k+2)}]
// with g the gap and s the safety fraction; empty for s >= 1/2.
std::vector<Interval> predict_gap_windows(const std::vector<double>& lambdas,
                                          int k, double h, double safety);

struct LocalizationRow {
    double h = 0;
    double distance = 0;      // two-sided Hausdorff distance inside the window
    double floor = 0;         // discretization floor estimate
    bool floor_limited = false;
};

struct LocalizationReport {
    std::vector<LocalizationRow> rows;
    double exp_r2 = 0;     // fit log d = a - c / sqrt(h)
    double exp_c = 0;
    double pow_r2 = 0;     // fit log d = a + p log h
    double pow_p = 0;
    double h3_r2 = 0;      // fit log d = a + 3 log h (pinned cubic)
    bool exponential_preferred = false;
    bool monotone = true;  // distance nonincreasing as h decreases
};

// Two-sided Hausdorff distance between the supercell spectrum and the
// replicated well spectrum inside the window, per h, with exponential and
// power-law model fits on the log scale.
LocalizationReport localization_check(const std::vector<Spectrum>& full_spec,
                                      const std::vector<Spectrum>& well_spec,
                                      const std::function<Interval(double)>& window_fn,
                                      const std::vector<double>& h_sweep,
                                      int well_count = 1);

// Largest N such that N+1 certified intervals are pairwise disjoint and
// interior to the window by more than their residuals; lower-bounds the gap
// count between the certified values. Returns 0 when the conditions fail.
int count_gaps_from_quasimodes(const std::vector<Quasimode>& quasimodes,
                               Interval window);

} // namespace specgap

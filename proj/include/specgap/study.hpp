#pragma once

#include "specgap/gaps.hpp"

namespace specgap {
namespace study {

// Shipped study parameters. The three residual sweeps, the supercell runs
// and the counting experiments all draw from these so the CLI configs and
// the acceptance suite stay in lockstep.

std::vector<double> default_sweep();          // {0.04 ... 0.005}, geometric-ish

FieldSpec gauss_field();                      // cosprod, period 6, amplitude 1
FieldSpec pointwell_field();                  // sin2, period 2, amplitude 12
FieldSpec cylinder_field();                   // sine profile, L = 2pi, beta1 = 1

inline constexpr double kGaussTargetMu = 1.5;
inline constexpr double kGaussR1 = 1.0;
inline constexpr double kGaussR2 = 1.4;
inline constexpr double kGaussPts = 8;        // points per sqrt(h)

inline constexpr double kModelR1 = 0.70;
inline constexpr double kModelR2 = 0.90;
inline constexpr double kModelPts = 8;        // points per dilated width

inline constexpr double kCylR1 = 1.30;
inline constexpr double kCylR2 = 1.70;
inline constexpr double kCylB1 = 0.20;        // admissible band window for p(h)
inline constexpr double kCylB2 = 1.20;
inline constexpr double kCylPts = 8;

inline constexpr int kSupercells = 3;         // supercell cells per side

// k2-pointwell window parameters (barrier margin is 12 for the shipped field)
inline constexpr double kEps0Weyl = 2.0;      // counting window slope
inline constexpr double kEps1Loc = 2.0;       // localization window slope
inline constexpr double kEps2Well = 6.0;      // Dirichlet well sublevel

std::string default_reference_path();         // data/model_reference.json

// --- grid builders -------------------------------------------------------

// interior grid over `rect` with step <= target_dx
Grid plane_grid(const Rect& rect, double target_dx);
// width scale (h / sum |model coeffs|)^{1/(k+2)} of the dilated well state
double well_width(const FieldSpec& field, double h);
double gauss_dx(double h);                                  // sqrt(h) / kGaussPts
double model_dx(const FieldSpec& field, double h);          // well_width / kModelPts
// supercell of `cells` x `cells` fundamental cells, grid aligned with the
// cell lattice; level 1 is the exact dyadic refinement
Grid supercell_grid(const FieldSpec& field, double h, int cells, int level = 0);
Grid cell_grid(const FieldSpec& field, double h, int level = 0);
Grid cylinder_grid(const FieldSpec& field, double h, int level = 0);

// --- sweep runners -------------------------------------------------------

struct SweepRow {
    double h = 0;
    double residual = 0;
    double mu = 0;
    double mass_outside = 0;
    int n = 0;
    bool certified = false;     // [mu - r, mu + r] meets the discrete spectrum
    double relative = 0;        // residual / mu
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SlopeFit fit;
};

// Inertia-based certificate that [mu - r, mu + r] intersects the spectrum.
bool interval_hits_spectrum(const DiscreteOperator& op, double mu, double r);

SweepResult run_gaussian_sweep(const FieldSpec& field, double target_mu,
                               double r1, double r2,
                               const std::vector<double>& sweep, bool certify,
                               int jobs = 1);
SweepResult run_model_sweep(const FieldSpec& field, const ModelReference& ref, int j,
                            double r1, double r2, const std::vector<double>& sweep,
                            bool certify, int jobs = 1);
SweepResult run_cylinder_sweep(const FieldSpec& field, int j,
                               const std::vector<double>& sweep, bool certify,
                               int jobs = 1);

// --- spectra for the gap experiments --------------------------------------

// Supercell spectrum below `threshold`, Richardson error estimates attached
// (two aligned dyadic grids).
Spectrum supercell_spectrum_below(const FieldSpec& field, double h, double threshold);
// Single-well Dirichlet spectrum (masked sublevel domain U_eps2) below
// `threshold`, Richardson refined.
Spectrum well_spectrum_below(const FieldSpec& field, double h, double threshold,
                             double eps2);

} // namespace study
} // namespace specgap

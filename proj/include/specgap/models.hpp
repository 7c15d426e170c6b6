#pragma once

#include <string>
#include <vector>

#include "specgap/eigensolve.hpp"

namespace specgap {

// Parameters of the cylinder construction: H(h,beta) fibers over S^1_L with
// an Aharonov-Bohm constant alpha1 and leading well coefficient beta1.
struct MontgomeryParams {
    int k = 1;
    double h = 1.0;
    double beta = 0.0;
    double alpha1 = 0.0;
    double L = 2 * 3.14159265358979323846;
    double beta1 = 1.0;
};

struct BandOptions {
    int richardson_base_n = 0;  // 0: derived from the truncation rule
    double dx_factor = 1.0 / 64.0;
    SolveOptions solve;
};

// Band functions mu_j(b) of H(1,b) for j = 1..J over the b-grid,
// Richardson-refined and branch-tracked.
BandFunctionTable montgomery_bands(int k, const std::vector<double>& b_grid, int J,
                                   const BandOptions& opts = {});

// Max entrywise deviation |M(h,beta;G) - alpha^{-(2k+2)} M(alpha^{k+2} h,
// alpha^{k+1} beta; alpha G)|, normalized by the max entry of M(h,beta;G).
// The discrete analogue of the dilation identity holds exactly, so the
// result is rounding-level.
double dilation_check(int k, double h, double beta, double alpha, const Grid& grid);

struct MomentumChoice {
    int p = 0;
    double achieved_b = 0; // h^{-(k+1)/(k+2)} (2 pi h p / L - alpha1)
    double beta = 0;       // 2 pi h p / L - alpha1
};

// Smallest integer p with b1 < h^{-(k+1)/(k+2)} (2 pi h p/L - alpha1) < b2.
// Throws NoAdmissibleInteger (reporting the h that would make the interval
// one unit wide) when no integer qualifies.
MomentumChoice select_p(double h, const MontgomeryParams& params, double b1, double b2);

// H^{h,0} = -h^2 d^2/dy^2 + (ih d/dx + alpha1 + beta1 y^{k+1}/(k+1)!)^2 on
// S^1_L x (-Y, Y), assembled with Peierls phases in x. The gauge is the
// paper form A = (alpha1 + beta1 y^{k+1}/(k+1)!, 0); landau_gauge returns its
// negative (both generate |b| up to orientation and have equal spectra).
DiscreteOperator cylinder_operator(const MontgomeryParams& params, const Grid& grid);

// Cylinder operator for an arbitrary field profile b(y): gauge
// A1(y) = alpha1 + int_0^y b.
DiscreteOperator cylinder_operator_full(const FieldSpec& field, double alpha1,
                                        double h, const Grid& grid);

// K^h = (ih d + A0)^*(ih d + A0) with A0 the polynomial Landau gauge of the
// homogeneous model field, on a Dirichlet box sized to the dilated ground
// state.
DiscreteOperator model_operator_2d(const FieldSpec& poly_field, double h,
                                   const Grid& grid);

// Box and step for model_operator_2d runs: halfwidth = box_widths * w and
// Delta = w / pts_per_width, where w = (h/beta_scale)^{1/(k+2)} is the
// dilated ground-state width.
Grid model_grid(const FieldSpec& poly_field, double h, double box_widths = 10,
                double pts_per_width = 8);

// ---------------------------------------------------------------------------
// Reference spectrum of K^1 (cached).

struct ModelReference {
    std::vector<double> lambda;          // distinct eigenvalues of K^1, ascending
    std::vector<double> lambda_error;    // Richardson error estimates
    std::vector<double> raw;             // eigenvalues with multiplicity
    int k = 2;
    std::string field_key;
};

// High-resolution Richardson-refined spectrum of K^1 for the model polynomial
// of `field`; distinct values deduplicated at 3x the error estimate.
ModelReference compute_model_reference(const FieldSpec& field, int m = 12);

// Cached load: reads `path` if it matches the field key, otherwise computes
// and writes the cache. The cache file is versioned JSON.
ModelReference model_reference(const FieldSpec& field, const std::string& path,
                               int m = 12);

std::string model_field_key(const FieldSpec& field);

} // namespace specgap

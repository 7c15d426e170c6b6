#pragma once

#include <optional>

#include "specgap/models.hpp"

namespace specgap {

enum class QuasimodeRecipe { PointGaussian, ModelRescaled, CylinderSeparated };

// A normalized trial vector on the grid of a specific operator, its target
// value mu, and the computed discrete residual ||M v - mu v|| / ||v||.
struct Quasimode {
    Eigen::VectorXcd vector;
    double mu = 0;        // target value on the discrete operator
    double residual = 0;
    QuasimodeRecipe recipe = QuasimodeRecipe::PointGaussian;
    double h = 0;
    // construction metadata
    Vec2 center;          // x_j (plane recipes)
    int j = 0;            // eigenvalue index (model recipes)
    double r1 = 0, r2 = 0;
    int p = 0;            // momentum (cylinder recipe)
    double mass_outside = 0;  // pre-cutoff mass beyond r1
    double model_mu = 0;  // discrete model eigenvalue backing the recipe, if any
};

struct CutoffOptions {
    double r1 = 0;  // plateau radius; 0 means 0.25 * cell period
    double r2 = 0;  // support radius; 0 means 0.40 * cell period
    double mass_tol = 1e-8;
    int margin_cells = 4;
};

// C-infinity bump: 1 on [0, r1], 0 on [r2, inf).
double smooth_cutoff(double r, double r1, double r2);

// Section-3 Gaussian quasimode at a point x_j with trplus(x_j) = target_mu,
// found by bisection along rays from `well_center` (smallest angle from +x
// wins). The quadratic phase phi cancels the constant and symmetric first
// order parts of the gauge Taylor expansion so A - d(phi) is the symmetric
// gauge plus O(|X|^2). Residual is taken against h * target_mu on `op`.
Quasimode point_gaussian_quasimode(const FieldSpec& field, const GaugeField& gauge,
                                   const DiscreteOperator& op, double h,
                                   double target_mu, Vec2 well_center,
                                   const CutoffOptions& cut = {});

// Section-4 rescaled model quasimode: the j-th eigenvector of the discrete
// model operator K^h assembled on the same grid (model gauge, same Dirichlet
// box), cut off at radius r1/r2 around the origin well. Requires the well at
// the gauge origin, where the Landau gauges of the field and of its model
// polynomial agree to all matched orders and no extra phase is needed.
// Target mu = h^{(2k+2)/(k+2)} lambda_j from the K^1 reference by default.
struct ModelRescaledOptions {
    CutoffOptions cut;
    bool mu_from_reference = true; // false: use the discrete model eigenvalue
    SolveOptions solve;
};
Quasimode model_rescaled_quasimode(const FieldSpec& field, const GaugeField& gauge,
                                   const DiscreteOperator& op, double h, int j,
                                   const ModelReference& ref,
                                   const ModelRescaledOptions& opts = {});

// Section-5 separated quasimode on the cylinder: exact discrete eigenfunction
// e^{2 pi i p x / L} v_j(y) of the model cylinder operator (v_j solves the
// exact momentum-sector fiber on the same y-grid and x-step), cut off in y,
// with the residual evaluated on the operator assembled from the full field.
struct CylinderQuasimodeOptions {
    double y_r1 = 0, y_r2 = 0;     // cutoff radii in y; 0: fractions of halfwidth
    double mass_tol = 1e-8;
    double b1 = 0.1, b2 = 1.2;     // admissible band-parameter window for select_p
    SolveOptions solve;
};
Quasimode cylinder_separated_quasimode(const MontgomeryParams& params,
                                       const FieldSpec& fullfield,
                                       const DiscreteOperator& full_op,
                                       double h, int j,
                                       const CylinderQuasimodeOptions& opts = {});

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double jackknife_spread = 0; // max |slope_leave-one-out - slope|
    int n = 0;
};

// Least-squares slope of log(residual) vs log(h). Requires >= 4 samples
// spanning >= 3 octaves (InsufficientSamples otherwise).
SlopeFit fit_residual_slope(const std::vector<std::pair<double, double>>& pairs);

} // namespace specgap

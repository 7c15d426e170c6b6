#pragma once

#include <functional>
#include <string>

#include "specgap/field.hpp"

namespace specgap {

enum class GaugeTag { Landau, ModelPolynomial, CylinderPaper, ShiftedByGradient };

// Vector potential A = (A1, A2) with dA = B. The derivative members are the
// closed-form partials where the family provides them; they feed the
// quasimode phase construction and the curl check.
struct GaugeField {
    std::function<double(double, double)> a1, a2;
    std::function<double(double, double)> da1dx, da1dy, da2dx, da2dy;
    GaugeTag tag = GaugeTag::Landau;
};

// Landau gauge A = (0, int_0^x b(s,y) ds). Uses the family's closed form
// when present, otherwise adaptive quadrature to 1e-10 (QuadratureFailure on
// non-convergence). For cylinder families returns the 1D potential
// A1(y) = -beta1 y^{k+1}/(k+1)! - alpha1, A2 = 0.
GaugeField landau_gauge(const FieldSpec& field, double alpha1 = 0.0);

// Landau gauge of the homogeneous model polynomial of `field` (exact
// polynomial antiderivative).
GaugeField model_gauge(const FieldSpec& field);

// A -> A + grad(phi). Caller supplies the two partials of phi.
GaugeField shift_gauge(const GaugeField& g,
                       std::function<double(double, double)> dphidx,
                       std::function<double(double, double)> dphidy);

// max over a sample grid of |curl A - b| / max(1, |b|). The curl uses the
// closed-form partials when available and Richardson finite differences
// otherwise.
double curl_mismatch(const GaugeField& g, const FieldSpec& field,
                     const Rect& domain, int samples = 17);

// Adaptive Simpson integral of f over [a,b] to the given tolerance.
double adaptive_integral(const std::function<double(double)>& f, double a,
                         double b, double tol = 1e-10);

} // namespace specgap

#include "specgap/gauge.hpp"

#include <cmath>

namespace specgap {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth > 40) throw QuadratureFailure("adaptive quadrature did not converge");
    if (std::abs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2, depth + 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, tol / 2, depth + 1);
}

} // namespace

double adaptive_integral(const std::function<double(double)>& f, double a,
                         double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(f, a, b, fa, fm, fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 0);
}

GaugeField landau_gauge(const FieldSpec& field, double alpha1) {
    GaugeField g;
    if (field.kind == FieldKind::LineWellCylinder) {
        // 1D profile: A1(y) = -alpha1 - int_0^y b(t) dt, A2 = 0, so that
        // b = dA2/dx - dA1/dy.
        auto b = field.b;
        double kfact = 1;
        for (int i = 2; i <= field.k + 1; ++i) kfact *= i;
        const bool model = field.name == "cylinder-model";
        const double beta1 = field.beta1;
        const int k = field.k;
        g.a1 = [b, alpha1, model, beta1, k, kfact](double, double y) {
            if (model) return -beta1 * std::pow(y, k + 1) / kfact - alpha1;
            return -adaptive_integral([&](double t) { return b(0.0, t); }, 0.0, y) -
                   alpha1;
        };
        g.a2 = [](double, double) { return 0.0; };
        g.da1dx = [](double, double) { return 0.0; };
        g.da1dy = [b](double, double y) { return -b(0.0, y); };
        g.da2dx = [](double, double) { return 0.0; };
        g.da2dy = [](double, double) { return 0.0; };
        g.tag = GaugeTag::Landau;
        return g;
    }
    g.a1 = [](double, double) { return 0.0; };
    if (field.a2) {
        g.a2 = field.a2;
        g.da2dy = field.da2dy;
    } else {
        auto b = field.b;
        g.a2 = [b](double x, double y) {
            return adaptive_integral([&](double s) { return b(s, y); }, 0.0, x);
        };
    }
    auto b = field.b;
    g.da1dx = [](double, double) { return 0.0; };
    g.da1dy = [](double, double) { return 0.0; };
    g.da2dx = [b](double x, double y) { return b(x, y); };
    g.tag = field.kind == FieldKind::PolynomialModel ? GaugeTag::ModelPolynomial
                                                     : GaugeTag::Landau;
    return g;
}

GaugeField model_gauge(const FieldSpec& field) {
    if (field.model_poly.empty())
        throw ConfigError("field '" + field.name + "' has no model polynomial");
    FieldSpec poly = make_poly_field(field.k, field.model_poly);
    GaugeField g = landau_gauge(poly);
    g.tag = GaugeTag::ModelPolynomial;
    return g;
}

GaugeField shift_gauge(const GaugeField& g,
                       std::function<double(double, double)> dphidx,
                       std::function<double(double, double)> dphidy) {
    GaugeField s;
    auto a1 = g.a1, a2 = g.a2;
    s.a1 = [a1, dphidx](double x, double y) { return a1(x, y) + dphidx(x, y); };
    s.a2 = [a2, dphidy](double x, double y) { return a2(x, y) + dphidy(x, y); };
    s.tag = GaugeTag::ShiftedByGradient;
    // Derivatives of the shift are not tracked; curl is unchanged but the
    // finite-difference path below handles shifted gauges.
    return s;
}

namespace {

// d/dx by central differences with one Richardson step (O(step^4)).
double fd_richardson(const std::function<double(double)>& f, double x, double step) {
    auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
    const double d1 = central(step), d2 = central(step / 2);
    return (4 * d2 - d1) / 3.0;
}

} // namespace

double curl_mismatch(const GaugeField& g, const FieldSpec& field,
                     const Rect& domain, int samples) {
    double worst = 0;
    const double step = 1e-3 * std::max(domain.width(), domain.height());
    for (int i = 1; i < samples; ++i) {
        for (int j = 1; j < samples; ++j) {
            const double x = domain.x0 + domain.width() * i / samples;
            const double y = domain.y0 + domain.height() * j / samples;
            double da2dx, da1dy;
            if (g.da2dx && g.tag != GaugeTag::ShiftedByGradient)
                da2dx = g.da2dx(x, y);
            else
                da2dx = fd_richardson([&](double s) { return g.a2(s, y); }, x, step);
            if (g.da1dy && g.tag != GaugeTag::ShiftedByGradient)
                da1dy = g.da1dy(x, y);
            else
                da1dy = fd_richardson([&](double s) { return g.a1(x, s); }, y, step);
            const double b = field.b(x, y);
            const double mis = std::abs(da2dx - da1dy - b) / std::max(1.0, std::abs(b));
            worst = std::max(worst, mis);
        }
    }
    return worst;
}

} // namespace specgap

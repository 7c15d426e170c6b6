#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specgap/errors.hpp"

namespace specgap {

struct Vec2 {
    double x = 0, y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(Vec2 p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

enum class FieldKind { Constant2D, PointWells2D, LineWellCylinder, PolynomialModel };

// One monomial c * x^i * y^j of a homogeneous polynomial field.
struct PolyTerm {
    int i = 0, j = 0;
    double c = 0;
};

// A periodic scalar magnetic field b(x,y) on the plane (or b(y) on a
// cylinder) together with its lattice and well metadata. Instances are
// immutable after construction; the built-in families also carry closed-form
// Landau antiderivatives used by the gauge construction.
struct FieldSpec {
    FieldKind kind = FieldKind::Constant2D;
    std::string name;

    std::function<double(double, double)> b;

    // Closed-form helpers (empty for families without them):
    //   a2      = integral of b(s,y) ds from 0 to x  (Landau gauge component)
    //   da2dy   = d/dy of a2 (needed for quasimode phase construction)
    std::function<double(double, double)> a2;
    std::function<double(double, double)> da2dy;

    // Lattice generators for plane-periodic families.
    std::array<Vec2, 2> lattice{Vec2{1, 0}, Vec2{0, 1}};
    // Circumference of S^1_L for cylinder families (x-period).
    double cyl_L = 0;
    // y-extent of the cylinder truncation (field declared on |y| <= cyl_halfwidth).
    double cyl_halfwidth = 0;
    // Closed-form primitive B(y) = int_0^y b for cylinder profiles.
    std::function<double(double)> cyl_B;

    int k = 0;          // vanishing order at the wells
    double beta1 = 0;   // leading Taylor coefficient at the well

    // Homogeneous degree-k Taylor polynomial of b at the (origin) well,
    // used as the model field. Empty when not applicable.
    std::vector<PolyTerm> model_poly;

    Rect default_cell;
    std::vector<Vec2> declared_wells;

    double operator()(double x, double y) const { return b(x, y); }
};

// Built-in parametric families. No expression parser: fields are code.
FieldSpec make_constant_field(double c);
// b = amp * (sin^2(pi x / period) + sin^2(pi y / period)); k = 2 wells on period*Z^2.
FieldSpec make_sin2_field(double period, double amp);
// b = amp * (1 - cos(2 pi x / period) cos(2 pi y / period)); k = 2 wells on
// period*Z^2 and its half-period translate. Default cell [-p/4, 3p/4]^2.
FieldSpec make_cosprod_field(double period, double amp);
// Homogeneous degree-k polynomial field from a coefficient table.
FieldSpec make_poly_field(int k, std::vector<PolyTerm> terms);
// Cylinder field b(y) = beta1 * (yperiod/2pi) * sin(2 pi y / yperiod) on
// S^1_L x (-yperiod/4, yperiod/4); leading term beta1 * y (k = 1).
FieldSpec make_cylinder_sine_field(double L, double beta1, double yperiod);
// Cylinder field b(y) = beta1 * y^k / k! exactly (the model itself).
FieldSpec make_cylinder_model_field(double L, double beta1, int k, double halfwidth);
// Plane field b = sin(2 pi x), line zeros x = 0 and x = 1/2 (k = 1).
FieldSpec make_sinx_field();

// Look up a shipped field preset by name ("constant", "sin2", "cosprod",
// "k2-pointwell", "k2-gauss", "k1-cylinder", ...). Throws ConfigError for
// unknown names.
FieldSpec field_preset(const std::string& name);

// ---------------------------------------------------------------------------

struct Well {
    Vec2 center;
    bool is_curve = false;      // curve wells (cylinder zero lines)
    double curve_coord = 0;     // coordinate of the zero line when is_curve
    bool curve_along_y = false; // true: line x = curve_coord; false: line y = curve_coord
    double fitted_k = 0;
    double local_beta1 = 0;
};

struct WellCatalog {
    std::vector<Well> wells;
    double b0 = 0;    // global minimum of trplus over the cell
    double eps0 = 0;  // barrier margin (boundary min - b0) when known
    Rect fundamental_domain;
};

struct BarrierReport {
    bool ok = false;
    double boundary_min = 0;
    double b0 = 0;
    double eps0_requested = 0;
};

// Tr^+(B(p)); in flat 2D this is |b(p)|.
double trplus(const FieldSpec& field, Vec2 p);

// Checks condition Tr^+(B) >= b0 + eps0 on the boundary of one fundamental
// cell by sampling. Throws DomainNotFundamental when the rectangle's area
// does not match |det(lattice)|.
BarrierReport check_barrier(const FieldSpec& field, const Rect& domain,
                            double eps0, int samples_per_edge = 256);

struct LocateOptions {
    int grid_n = 512;         // flood-fill resolution per cell
    bool periodic_x = false;  // wrap components across the x seam
    double fit_rmin_frac = 1e-3;  // k-fit radius range, fractions of cell diameter
    double fit_rmax_frac = 1e-1;
};

// Connected components of {trplus < b0 + eps1} inside the domain via grid
// flood-fill; components touching the domain boundary are not wells. Throws
// NoWells when nothing remains.
WellCatalog locate_wells(const FieldSpec& field, const Rect& domain,
                         double eps1, const LocateOptions& opts = {});

} // namespace specgap

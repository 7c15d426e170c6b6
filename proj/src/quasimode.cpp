#include "specgap/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specgap/errors.hpp"

namespace specgap {

namespace {
constexpr double kPi = std::numbers::pi;
}

double smooth_cutoff(double r, double r1, double r2) {
    if (r <= r1) return 1.0;
    if (r >= r2) return 0.0;
    const double t = (r2 - r) / (r2 - r1);
    const double f = std::exp(-1.0 / t);
    const double g = std::exp(-1.0 / (1.0 - t));
    return f / (f + g);
}

namespace {

// Bisection for trplus(center + t dir) = target along one ray; returns t or
// a negative value when the ray never reaches the target inside [0, tmax].
double ray_level_set(const FieldSpec& field, Vec2 center, Vec2 dir, double target,
                     double tmax) {
    const int scan = 256;
    double prev = trplus(field, center);
    if (prev >= target) return -1;
    for (int i = 1; i <= scan; ++i) {
        const double t = tmax * i / scan;
        const double v = trplus(field, center + t * dir);
        if (v >= target) {
            double lo = tmax * (i - 1) / scan, hi = t;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (trplus(field, center + mid * dir) >= target)
                    hi = mid;
                else
                    lo = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev = v;
    }
    return -1;
}

Rect grid_rect(const Grid& g) {
    return {g.x0, g.x0 + g.x_extent(), g.y0, g.y0 + g.y_extent()};
}

} // namespace

Quasimode point_gaussian_quasimode(const FieldSpec& field, const GaugeField& gauge,
                                   const DiscreteOperator& op, double h,
                                   double target_mu, Vec2 well_center,
                                   const CutoffOptions& cut) {
    const Grid& grid = op.grid;
    if (grid.dim != 2 || grid.boundary != Boundary::Dirichlet)
        throw GridMismatch("point_gaussian_quasimode: 2D Dirichlet grid required");
    if (!gauge.da1dx || !gauge.da2dx)
        throw ConfigError("point_gaussian_quasimode: gauge needs closed-form partials");

    const double period = std::max(field.lattice[0].x, field.lattice[1].y);
    const double r1 = cut.r1 > 0 ? cut.r1 : 0.25 * period;
    const double r2 = cut.r2 > 0 ? cut.r2 : 0.40 * period;

    // level-set point x_j along rays from the well center, smallest angle from
    // the +x axis first
    const Rect rect = grid_rect(grid);
    Vec2 xj;
    bool found = false;
    if (std::abs(trplus(field, well_center) - target_mu) <=
        1e-12 * std::max(1.0, std::abs(target_mu))) {
        xj = well_center; // constant-field control: every point attains the target
        found = true;
    }
    const int nrays = 64;
    for (int a = 0; a < nrays && !found; ++a) {
        // 0, +d, -d, +2d, ... with d = 2 pi / nrays
        const int step = (a + 1) / 2;
        const double sign = a % 2 == 1 ? 1.0 : -1.0;
        const double th = a == 0 ? 0.0 : sign * 2 * kPi * step / nrays;
        const Vec2 dir{std::cos(th), std::sin(th)};
        double tmax = 1e300;
        if (dir.x > 0) tmax = std::min(tmax, (rect.x1 - well_center.x) / dir.x);
        if (dir.x < 0) tmax = std::min(tmax, (rect.x0 - well_center.x) / dir.x);
        if (dir.y > 0) tmax = std::min(tmax, (rect.y1 - well_center.y) / dir.y);
        if (dir.y < 0) tmax = std::min(tmax, (rect.y0 - well_center.y) / dir.y);
        const double t = ray_level_set(field, well_center, dir, target_mu, 0.98 * tmax);
        if (t > 0) {
            xj = well_center + t * dir;
            found = true;
        }
    }
    if (!found)
        throw NoLevelSet("trplus never attains " + std::to_string(target_mu) +
                         " along the sampled rays");

    const double wall = std::min(std::min(xj.x - rect.x0, rect.x1 - xj.x),
                                 std::min(xj.y - rect.y0, rect.y1 - xj.y));
    const double margin = cut.margin_cells * std::max(grid.dx, grid.dy);
    if (r2 + margin > wall)
        throw CutoffClipped("cutoff support r2 = " + std::to_string(r2) +
                            " leaves less than the required margin to the wall");

    const double mu = target_mu;
    // quadratic phase from the first-order gauge Taylor expansion at x_j
    const double a1 = gauge.a1(xj.x, xj.y), a2 = gauge.a2(xj.x, xj.y);
    const double m11 = gauge.da1dx(xj.x, xj.y), m12 = gauge.da1dy(xj.x, xj.y);
    const double m21 = gauge.da2dx(xj.x, xj.y), m22 = gauge.da2dy(xj.x, xj.y);
    const double q12 = 0.5 * (m12 + m21); // equals m12 + mu/2 when curl(x_j) = mu
    auto phi = [&](double X1, double X2) {
        return a1 * X1 + a2 * X2 + 0.5 * m11 * X1 * X1 + q12 * X1 * X2 +
               0.5 * m22 * X2 * X2;
    };

    Quasimode q;
    q.recipe = QuasimodeRecipe::PointGaussian;
    q.h = h;
    q.center = xj;
    q.r1 = r1;
    q.r2 = r2;
    q.mu = h * target_mu;

    const int n = op.n();
    q.vector.resize(n);
    double mass_in = 0, mass_out = 0;
    for (int idx = 0; idx < n; ++idx) {
        const int node = op.mask_map ? (*op.mask_map)[idx] : idx;
        const int i = node % grid.nx, j = node / grid.nx;
        const double X1 = grid.x_of(i) - xj.x, X2 = grid.y_of(j) - xj.y;
        const double r = std::hypot(X1, X2);
        const double gauss = std::exp(-mu * (X1 * X1 + X2 * X2) / (4 * h));
        (r > r1 ? mass_out : mass_in) += gauss * gauss;
        const double chi = smooth_cutoff(r, r1, r2);
        q.vector[idx] = chi * gauss * std::exp(cd(0, phi(X1, X2) / h));
    }
    q.mass_outside = mass_out / (mass_in + mass_out);
    if (q.mass_outside > cut.mass_tol)
        throw CutoffClipped("Gaussian mass outside the cutoff: " +
                            std::to_string(q.mass_outside));
    q.vector.normalize();
    q.residual = (op.M * q.vector - cd(q.mu, 0) * q.vector).norm();
    return q;
}

Quasimode model_rescaled_quasimode(const FieldSpec& field, const GaugeField& gauge,
                                   const DiscreteOperator& op, double h, int j,
                                   const ModelReference& ref,
                                   const ModelRescaledOptions& opts) {
    (void)gauge;
    const Grid& grid = op.grid;
    if (grid.dim != 2) throw GridMismatch("model_rescaled_quasimode: 2D grid required");
    if (j < 1 || j > static_cast<int>(ref.lambda.size()))
        throw ConfigError("model_rescaled_quasimode: j out of the reference range");
    // The construction requires the well at the gauge origin, where the Landau
    // gauges of the field and of its model polynomial agree to all matched
    // orders (no correction phase is needed).
    bool origin_well = false;
    for (const auto& w : field.declared_wells)
        if (std::hypot(w.x, w.y) < 1e-12) origin_well = true;
    if (!origin_well)
        throw ConfigError("model_rescaled_quasimode: field needs a well at the origin");

    const double period = std::max(field.lattice[0].x, field.lattice[1].y);
    const double r1 = opts.cut.r1 > 0 ? opts.cut.r1 : 0.25 * period;
    const double r2 = opts.cut.r2 > 0 ? opts.cut.r2 : 0.40 * period;
    const Rect rect = grid_rect(grid);
    const double wall = std::min({-rect.x0, rect.x1, -rect.y0, rect.y1});
    const double margin = opts.cut.margin_cells * std::max(grid.dx, grid.dy);
    if (r2 + margin > wall)
        throw CutoffClipped("cutoff support r2 = " + std::to_string(r2) +
                            " leaves less than the required margin to the wall");

    const double pw = (2.0 * ref.k + 2.0) / (ref.k + 2.0);
    const double target = std::pow(h, pw) * ref.lambda[j - 1];

    // eigenvector of the discrete model operator on the same grid
    DiscreteOperator model = model_operator_2d(field, h, grid);
    int want = 0;
    const double upper = std::pow(h, pw) * (ref.lambda[j - 1] +
                                            (j < static_cast<int>(ref.lambda.size())
                                                 ? 0.5 * (ref.lambda[j] - ref.lambda[j - 1])
                                                 : 1.0));
    for (double raw : ref.raw)
        if (std::pow(h, pw) * raw < upper) ++want;
    want = std::max(want + 1, j + 1);
    Spectrum sp = lowest_eigenpairs(model, want, opts.solve);
    int pick = 0;
    for (int i = 1; i < sp.size(); ++i)
        if (std::abs(sp.eigenvalues[i] - target) < std::abs(sp.eigenvalues[pick] - target))
            pick = i;

    Quasimode q;
    q.recipe = QuasimodeRecipe::ModelRescaled;
    q.h = h;
    q.j = j;
    q.r1 = r1;
    q.r2 = r2;
    q.center = {0, 0};
    q.model_mu = sp.eigenvalues[pick];
    q.mu = opts.mu_from_reference ? target : sp.eigenvalues[pick];

    const int n = op.n();
    q.vector.resize(n);
    double mass_in = 0, mass_out = 0;
    for (int idx = 0; idx < n; ++idx) {
        const int node = op.mask_map ? (*op.mask_map)[idx] : idx;
        const int i = node % grid.nx, jj = node / grid.nx;
        const double x = grid.x_of(i), y = grid.y_of(jj);
        const double r = std::hypot(x, y);
        const cd w = sp.eigenvectors(idx, pick);
        (r > r1 ? mass_out : mass_in) += std::norm(w);
        q.vector[idx] = smooth_cutoff(r, r1, r2) * w;
    }
    q.mass_outside = mass_out / (mass_in + mass_out);
    if (q.mass_outside > opts.cut.mass_tol)
        throw CutoffClipped("model eigenfunction mass outside the cutoff: " +
                            std::to_string(q.mass_outside));
    q.vector.normalize();
    q.residual = (op.M * q.vector - cd(q.mu, 0) * q.vector).norm();
    return q;
}

Quasimode cylinder_separated_quasimode(const MontgomeryParams& params,
                                       const FieldSpec& fullfield,
                                       const DiscreteOperator& full_op,
                                       double h, int j,
                                       const CylinderQuasimodeOptions& opts) {
    const Grid& grid = full_op.grid;
    if (grid.boundary != Boundary::PeriodicX_DirichletY)
        throw GridMismatch("cylinder_separated_quasimode: cylinder grid required");
    if (fullfield.kind != FieldKind::LineWellCylinder)
        throw ConfigError("cylinder_separated_quasimode: cylinder field required");

    const double L = grid.x_extent();
    MontgomeryParams pp = params;
    pp.h = h;
    pp.L = L;
    const MomentumChoice mc = select_p(h, pp, opts.b1, opts.b2);

    const double halfwidth = grid.y_extent() / 2;
    const double r1 = opts.y_r1 > 0 ? opts.y_r1 : 0.55 * halfwidth;
    const double r2 = opts.y_r2 > 0 ? opts.y_r2 : 0.80 * halfwidth;
    if (r2 + 4 * grid.dy > halfwidth)
        throw CutoffClipped("y cutoff support does not fit the truncated cylinder");

    // exact momentum-sector fiber of the discrete model cylinder operator
    double kf = 1;
    for (int i = 2; i <= params.k + 1; ++i) kf *= i;
    const double b1 = params.beta1;
    const int k = params.k;
    const double alpha1 = params.alpha1;
    auto a1_model = [b1, k, kf, alpha1](double y) {
        return alpha1 + b1 * std::pow(y, k + 1) / kf;
    };
    Grid ygrid;
    ygrid.dim = 1;
    ygrid.boundary = Boundary::Dirichlet;
    ygrid.x0 = grid.y0;
    ygrid.nx = grid.ny;
    ygrid.dx = grid.dy;
    DiscreteOperator fiber =
        assemble_cylinder_fiber(h, mc.p, L, grid.dx, a1_model, ygrid);
    SolveOptions so = opts.solve;
    so.want_vectors = true;
    Spectrum sp = lowest_eigenpairs(fiber, j + 2, so);

    Quasimode q;
    q.recipe = QuasimodeRecipe::CylinderSeparated;
    q.h = h;
    q.j = j;
    q.p = mc.p;
    q.r1 = r1;
    q.r2 = r2;
    q.mu = sp.eigenvalues[j - 1];
    q.model_mu = q.mu;

    const Eigen::VectorXcd& v = sp.eigenvectors.col(j - 1);
    double mass_in = 0, mass_out = 0;
    for (int n = 0; n < grid.ny; ++n) {
        const double y = grid.y_of(n);
        (std::abs(y) > r1 ? mass_out : mass_in) += std::norm(v[n]);
    }
    q.mass_outside = mass_out / (mass_in + mass_out);
    if (q.mass_outside > opts.mass_tol)
        throw CutoffClipped("fiber eigenfunction mass outside the y cutoff: " +
                            std::to_string(q.mass_outside));

    q.vector.resize(full_op.n());
    for (int node = 0; node < full_op.n(); ++node) {
        const int i = node % grid.nx, n = node / grid.nx;
        const double x = grid.x_of(i), y = grid.y_of(n);
        const double chi = smooth_cutoff(std::abs(y), r1, r2);
        q.vector[node] = chi * v[n] * std::exp(cd(0, 2 * kPi * mc.p * x / L));
    }
    q.vector.normalize();
    q.residual = (full_op.M * q.vector - cd(q.mu, 0) * q.vector).norm();
    return q;
}

SlopeFit fit_residual_slope(const std::vector<std::pair<double, double>>& pairs) {
    const int n = static_cast<int>(pairs.size());
    if (n < 4) throw InsufficientSamples("need at least 4 (h, residual) samples");
    double hmin = pairs.front().first, hmax = pairs.front().first;
    for (auto& [h, r] : pairs) {
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    if (std::log2(hmax / hmin) < 3.0 - 1e-9)
        throw InsufficientSamples("h samples must span at least 3 octaves");

    auto fit = [](const std::vector<double>& x, const std::vector<double>& y,
                  double* slope, double* icept, double* r2) {
        const int m = static_cast<int>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (int i = 0; i < m; ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
            syy += y[i] * y[i];
        }
        const double den = m * sxx - sx * sx;
        *slope = (m * sxy - sx * sy) / den;
        *icept = (sy - *slope * sx) / m;
        const double sstot = syy - sy * sy / m;
        double ssres = 0;
        for (int i = 0; i < m; ++i) {
            const double e = y[i] - (*slope * x[i] + *icept);
            ssres += e * e;
        }
        *r2 = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
    };

    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        lx[i] = std::log(pairs[i].first);
        ly[i] = std::log(pairs[i].second);
    }
    SlopeFit out;
    out.n = n;
    fit(lx, ly, &out.slope, &out.intercept, &out.r2);
    for (int drop = 0; drop < n; ++drop) {
        std::vector<double> jx, jy;
        for (int i = 0; i < n; ++i)
            if (i != drop) {
                jx.push_back(lx[i]);
                jy.push_back(ly[i]);
            }
        double s, c, r;
        fit(jx, jy, &s, &c, &r);
        out.jackknife_spread = std::max(out.jackknife_spread, std::abs(s - out.slope));
    }
    return out;
}

} // namespace specgap

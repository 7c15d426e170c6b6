#include "specgap/study.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specgap/errors.hpp"
#include "specgap/experiments.hpp"

namespace specgap {
namespace study {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> default_sweep() {
    return {0.04, 0.028, 0.02, 0.014, 0.01, 0.007, 0.005};
}

FieldSpec gauss_field() { return make_cosprod_field(6.0, 1.0); }
FieldSpec pointwell_field() { return make_sin2_field(2.0, 12.0); }
FieldSpec cylinder_field() { return make_cylinder_sine_field(2 * kPi, 1.0, 8.0); }

std::string default_reference_path() { return "data/model_reference.json"; }

Grid plane_grid(const Rect& rect, double target_dx) {
    const int nx = static_cast<int>(std::ceil(rect.width() / target_dx)) - 1;
    const int ny = static_cast<int>(std::ceil(rect.height() / target_dx)) - 1;
    return Grid::dirichlet_rect(rect, std::max(nx, 3), std::max(ny, 3));
}

double well_width(const FieldSpec& field, double h) {
    double beta_scale = 0;
    for (const auto& t : field.model_poly) beta_scale += std::abs(t.c);
    if (beta_scale == 0) beta_scale = std::max(std::abs(field.beta1), 1.0);
    return std::pow(h / beta_scale, 1.0 / (field.k + 2));
}

double gauss_dx(double h) { return std::sqrt(h) / kGaussPts; }

double model_dx(const FieldSpec& field, double h) {
    return well_width(field, h) / kModelPts;
}

namespace {

// odd interior count for exact dyadic coarsening/refinement
int odd_count(double width, double target_dx) {
    int n = static_cast<int>(std::ceil(width / target_dx)) - 1;
    n = std::max(n, 5);
    if (n % 2 == 0) ++n;
    return n;
}

int level_count(int n0, int level) {
    if (level == 0) return n0;
    if (level == 1) return 2 * n0 + 1;
    if (level == -1) return (n0 - 1) / 2;
    throw ConfigError("grid level must be -1, 0, or 1");
}

} // namespace

Grid cell_grid(const FieldSpec& field, double h, int level) {
    const Rect cell = field.default_cell;
    const int n0 = odd_count(cell.width(), model_dx(field, h));
    const int n = level_count(n0, level);
    return Grid::dirichlet_rect(cell, n, n);
}

Grid supercell_grid(const FieldSpec& field, double h, int cells, int level) {
    const Rect cell = field.default_cell;
    const int n0 = odd_count(cell.width(), model_dx(field, h));
    const int n = level_count(n0, level);
    // seam nodes are interior: N + 1 = cells * (n + 1)
    const int N = cells * (n + 1) - 1;
    const double w = cell.width();
    Rect rect{cell.x0 - (cells - 1) * w / 2, cell.x1 + (cells - 1) * w / 2,
              cell.y0 - (cells - 1) * w / 2, cell.y1 + (cells - 1) * w / 2};
    return Grid::dirichlet_rect(rect, N, N);
}

Grid cylinder_grid(const FieldSpec& field, double h, int level) {
    const double wy = std::pow(h / std::max(std::abs(field.beta1), 1e-12),
                               1.0 / (field.k + 2));
    const double dxt = std::pow(h, 1.0 / (field.k + 2)) / kCylPts;
    int nx = static_cast<int>(std::ceil(field.cyl_L / dxt));
    int ny = odd_count(2 * field.cyl_halfwidth, wy / kCylPts);
    if (level == 1) {
        nx *= 2;
        ny = 2 * ny + 1;
    } else if (level == -1) {
        nx /= 2;
        ny = (ny - 1) / 2;
    }
    return Grid::cylinder(field.cyl_L, nx, -field.cyl_halfwidth, field.cyl_halfwidth, ny);
}

// ---------------------------------------------------------------------------

bool interval_hits_spectrum(const DiscreteOperator& op, double mu, double r) {
    const double eps = 1e-12 * std::max({std::abs(mu), r, 1e-30});
    const int hi = count_below(op, mu + r + eps);
    const int lo = count_below(op, mu - r - eps);
    return hi > lo;
}

namespace {

SlopeFit fit_rows(const std::vector<SweepRow>& rows) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : rows) pairs.push_back({r.h, r.residual});
    return fit_residual_slope(pairs);
}

} // namespace

SweepResult run_gaussian_sweep(const FieldSpec& field, double target_mu,
                               double r1, double r2,
                               const std::vector<double>& sweep, bool certify,
                               int jobs) {
    SweepResult out;
    out.rows.resize(sweep.size());
    const GaugeField gauge = landau_gauge(field);
    parallel_for(static_cast<int>(sweep.size()), jobs, [&](int i) {
        const double h = sweep[i];
        const Grid grid = plane_grid(field.default_cell, gauss_dx(h));
        const DiscreteOperator op = assemble(field, gauge, grid, h);
        CutoffOptions cut;
        cut.r1 = r1;
        cut.r2 = r2;
        Quasimode q = point_gaussian_quasimode(field, gauge, op, h, target_mu,
                                               field.declared_wells.at(0), cut);
        SweepRow row;
        row.h = h;
        row.residual = q.residual;
        row.mu = q.mu;
        row.mass_outside = q.mass_outside;
        row.n = op.n();
        row.relative = q.residual / std::abs(q.mu);
        if (certify) row.certified = interval_hits_spectrum(op, q.mu, q.residual);
        out.rows[i] = row;
    });
    out.fit = fit_rows(out.rows);
    return out;
}

SweepResult run_model_sweep(const FieldSpec& field, const ModelReference& ref, int j,
                            double r1, double r2, const std::vector<double>& sweep,
                            bool certify, int jobs) {
    SweepResult out;
    out.rows.resize(sweep.size());
    const GaugeField gauge = landau_gauge(field);
    parallel_for(static_cast<int>(sweep.size()), jobs, [&](int i) {
        const double h = sweep[i];
        const Grid grid = cell_grid(field, h, 0);
        const DiscreteOperator op = assemble(field, gauge, grid, h);
        ModelRescaledOptions mo;
        mo.cut.r1 = r1;
        mo.cut.r2 = r2;
        Quasimode q = model_rescaled_quasimode(field, gauge, op, h, j, ref, mo);
        SweepRow row;
        row.h = h;
        row.residual = q.residual;
        row.mu = q.mu;
        row.mass_outside = q.mass_outside;
        row.n = op.n();
        row.relative = q.residual / std::abs(q.mu);
        if (certify) row.certified = interval_hits_spectrum(op, q.mu, q.residual);
        out.rows[i] = row;
    });
    out.fit = fit_rows(out.rows);
    return out;
}

SweepResult run_cylinder_sweep(const FieldSpec& field, int j,
                               const std::vector<double>& sweep, bool certify,
                               int jobs) {
    SweepResult out;
    out.rows.resize(sweep.size());
    parallel_for(static_cast<int>(sweep.size()), jobs, [&](int i) {
        const double h = sweep[i];
        const Grid grid = cylinder_grid(field, h, 0);
        const DiscreteOperator op = cylinder_operator_full(field, 0.0, h, grid);
        MontgomeryParams params;
        params.k = field.k;
        params.h = h;
        params.beta1 = field.beta1;
        params.alpha1 = 0.0;
        params.L = field.cyl_L;
        CylinderQuasimodeOptions co;
        co.y_r1 = kCylR1;
        co.y_r2 = kCylR2;
        co.b1 = kCylB1;
        co.b2 = kCylB2;
        Quasimode q = cylinder_separated_quasimode(params, field, op, h, j, co);
        SweepRow row;
        row.h = h;
        row.residual = q.residual;
        row.mu = q.mu;
        row.mass_outside = q.mass_outside;
        row.n = op.n();
        row.relative = q.residual / std::abs(q.mu);
        if (certify) row.certified = interval_hits_spectrum(op, q.mu, q.residual);
        out.rows[i] = row;
    });
    out.fit = fit_rows(out.rows);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Richardson error estimates from a coarse/fine pair of window solves. The
// fine values are kept (extrapolation attached when the counts agree).
Spectrum paired_window_solve(const std::function<DiscreteOperator(int)>& builder,
                             double threshold) {
    const DiscreteOperator coarse = builder(-1);
    const DiscreteOperator fine = builder(0);
    SolveOptions so;
    so.want_vectors = false;
    so.tol = 1e-8; // comfortably below every resolution floor in these runs
    Spectrum sc = spectrum_below(coarse, threshold, so);
    Spectrum sf = spectrum_below(fine, threshold, so);
    const int m = std::min(sc.size(), sf.size());
    sf.discretization_error.assign(sf.size(), 0.0);
    double worst = 0;
    for (int i = 0; i < m; ++i) {
        const double err = std::abs(sf.eigenvalues[i] - sc.eigenvalues[i]) / 3.0;
        sf.discretization_error[i] = err;
        worst = std::max(worst, err);
        sf.eigenvalues[i] = (4 * sf.eigenvalues[i] - sc.eigenvalues[i]) / 3.0;
    }
    for (int i = m; i < sf.size(); ++i) sf.discretization_error[i] = worst;
    return sf;
}

} // namespace

Spectrum supercell_spectrum_below(const FieldSpec& field, double h, double threshold) {
    const GaugeField gauge = landau_gauge(field);
    auto builder = [&](int level) {
        const Grid g = supercell_grid(field, h, kSupercells, level);
        return assemble(field, gauge, g, h);
    };
    return paired_window_solve(builder, threshold);
}

Spectrum well_spectrum_below(const FieldSpec& field, double h, double threshold,
                             double eps2) {
    const GaugeField gauge = landau_gauge(field);
    auto builder = [&](int level) {
        const Grid g = cell_grid(field, h, level);
        const GridMask mask = sublevel_mask(field, g, 0.0, eps2);
        return assemble_masked(field, gauge, g, mask, h);
    };
    return paired_window_solve(builder, threshold);
}

} // namespace study
} // namespace specgap

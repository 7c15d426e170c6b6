#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specgap/study.hpp"
#include "test_util.hpp"

using namespace specgap;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("fit_residual_slope on synthetic power laws") {
    std::vector<std::pair<double, double>> p2, p43;
    for (double h : {0.04, 0.02, 0.01, 0.005}) {
        p2.push_back({h, h * h});
        p43.push_back({h, 3 * std::pow(h, 4.0 / 3.0)});
    }
    const SlopeFit f2 = fit_residual_slope(p2);
    CHECK(f2.slope == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(f2.r2 == doctest::Approx(1.0).epsilon(1e-9));
    const SlopeFit f43 = fit_residual_slope(p43);
    CHECK(f43.slope == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("fit_residual_slope flags an outlier via the jackknife") {
    std::vector<std::pair<double, double>> pairs;
    for (double h : {0.04, 0.02, 0.01, 0.005, 0.0025}) pairs.push_back({h, h * h});
    pairs[0].second *= 3.0; // corrupt the coarsest point
    const SlopeFit f = fit_residual_slope(pairs);
    CHECK(f.jackknife_spread > 0.05);
}

TEST_CASE("fit_residual_slope input validation") {
    std::vector<std::pair<double, double>> few{{0.04, 1}, {0.02, 1}, {0.01, 1}};
    CHECK_THROWS_AS(fit_residual_slope(few), InsufficientSamples);
    std::vector<std::pair<double, double>> narrow{
        {0.04, 1}, {0.03, 1}, {0.02, 1}, {0.011, 1}};
    CHECK_THROWS_AS(fit_residual_slope(narrow), InsufficientSamples);
}

TEST_CASE("smooth cutoff is a plateau bump") {
    CHECK(smooth_cutoff(0.0, 1, 2) == 1.0);
    CHECK(smooth_cutoff(0.999, 1, 2) == 1.0);
    CHECK(smooth_cutoff(2.0, 1, 2) == 0.0);
    CHECK(smooth_cutoff(1.5, 1, 2) == doctest::Approx(0.5));
    CHECK(smooth_cutoff(1.2, 1, 2) > smooth_cutoff(1.8, 1, 2));
}

namespace {

struct GaussSetup {
    FieldSpec field;
    GaugeField gauge;
    Grid grid;
    DiscreteOperator op;
    double h;
};

GaussSetup gauss_setup(double h) {
    GaussSetup s{study::gauss_field(), {}, {}, {}, h};
    s.gauge = landau_gauge(s.field);
    s.grid = study::plane_grid(s.field.default_cell, study::gauss_dx(h));
    s.op = assemble(s.field, s.gauge, s.grid, h);
    return s;
}

} // namespace

TEST_CASE("point gaussian quasimode basics") {
    const double h = 0.01;
    GaussSetup s = gauss_setup(h);
    CutoffOptions cut;
    cut.r1 = study::kGaussR1;
    cut.r2 = study::kGaussR2;
    const Quasimode q = point_gaussian_quasimode(s.field, s.gauge, s.op, h,
                                                 study::kGaussTargetMu, {0, 0}, cut);
    CHECK(q.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.mu == doctest::Approx(h * study::kGaussTargetMu));
    CHECK(q.mass_outside <= 1e-8);
    // b(x_j) = target on the +x ray: 1 - cos(pi x / 3) = 1.5 at x = 2
    CHECK(q.center.x == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(q.center.y) < 1e-9);
    CHECK(q.residual > 0);
    // h^{3/2}-scale residual: relative size ~ C sqrt(h) with C order one
    CHECK(q.residual / q.mu < 0.3);
    // support strictly interior: nodes within 4 cells of the wall vanish
    const Grid& g = s.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const bool edge = i < 4 || j < 4 || i >= g.nx - 4 || j >= g.ny - 4;
            if (edge) CHECK(std::abs(q.vector[g.index(i, j)]) == 0.0);
        }
}

TEST_CASE("point gaussian residual is gauge invariant") {
    const double h = 0.02;
    GaussSetup s = gauss_setup(h);
    CutoffOptions cut;
    cut.r1 = study::kGaussR1;
    cut.r2 = study::kGaussR2;
    const Quasimode q = point_gaussian_quasimode(s.field, s.gauge, s.op, h,
                                                 study::kGaussTargetMu, {0, 0}, cut);
    // shift the gauge by d(x^2 y) and the quasimode phase by x^2 y / h
    const GaugeField shifted = shift_gauge(
        s.gauge, [](double x, double y) { return 2 * x * y; },
        [](double x, double) { return x * x; });
    const DiscreteOperator op2 = assemble(s.field, shifted, s.grid, h);
    Eigen::VectorXcd v = q.vector;
    for (int j = 0; j < s.grid.ny; ++j)
        for (int i = 0; i < s.grid.nx; ++i) {
            const double x = s.grid.x_of(i), y = s.grid.y_of(j);
            v[s.grid.index(i, j)] *= std::exp(cd(0, x * x * y / h));
        }
    const double res2 = (op2.M * v - cd(q.mu, 0) * v).norm() / v.norm();
    CHECK(std::abs(res2 - q.residual) < 1e-12 * std::max(q.residual, q.mu));
}

TEST_CASE("point gaussian on a constant field is Landau-like") {
    // Control: for b == mu the continuum quasimode is an exact ground state,
    // so the discrete residual is pure second-order truncation. It must sit
    // well under the h-scale signal of the periodic fields and shrink as
    // Delta^2 under refinement at fixed h.
    const FieldSpec f = make_constant_field(1.5);
    const GaugeField gauge = landau_gauge(f);
    const double h = 0.01;
    std::vector<double> steps, res;
    for (int scale : {1, 2}) {
        const Grid g = Grid::dirichlet_rect({-1.5, 1.5, -1.5, 1.5},
                                            383 * scale + (scale - 1), 383 * scale + (scale - 1));
        const DiscreteOperator op = assemble(f, gauge, g, h);
        CutoffOptions cut;
        cut.r1 = 0.8;
        cut.r2 = 1.2;
        const Quasimode q =
            point_gaussian_quasimode(f, gauge, op, h, 1.5, {0, 0}, cut);
        steps.push_back(g.dx);
        res.push_back(q.residual);
    }
    CHECK(res[0] / (h * 1.5) < 2e-2);
    const double order = std::log(res[0] / res[1]) / std::log(steps[0] / steps[1]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("model rescaled quasimode: field equal to its model is cutoff-limited") {
    // b = b0 exactly: the quasimode is the discrete model eigenfunction, so
    // the residual against its own eigenvalue is cutoff tails only.
    const FieldSpec f = make_poly_field(2, {{2, 0, 29.608813203268074},
                                            {0, 2, 29.608813203268074}});
    const GaugeField gauge = landau_gauge(f);
    const double h = 0.01;
    Grid g = study::cell_grid(study::pointwell_field(), h, 0);
    FieldSpec fcell = f;
    fcell.default_cell = {-1, 1, -1, 1};
    fcell.lattice = {Vec2{2, 0}, Vec2{0, 2}};
    const DiscreteOperator op = assemble(fcell, gauge, g, h);
    const ModelReference ref =
        model_reference(study::pointwell_field(), study::default_reference_path());
    ModelRescaledOptions mo;
    mo.cut.r1 = study::kModelR1;
    mo.cut.r2 = study::kModelR2;
    mo.mu_from_reference = false; // residual against the discrete eigenvalue
    const Quasimode q = model_rescaled_quasimode(fcell, gauge, op, h, 1, ref, mo);
    CHECK(q.residual <= 1e-8 * q.mu);
    CHECK(q.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model rescaled quasimode certifies an eigenvalue of the full field") {
    const FieldSpec f = study::pointwell_field();
    const GaugeField gauge = landau_gauge(f);
    const double h = 0.02;
    const Grid g = study::cell_grid(f, h, 0);
    const DiscreteOperator op = assemble(f, gauge, g, h);
    const ModelReference ref = model_reference(f, study::default_reference_path());
    ModelRescaledOptions mo;
    mo.cut.r1 = study::kModelR1;
    mo.cut.r2 = study::kModelR2;
    const Quasimode q = model_rescaled_quasimode(f, gauge, op, h, 1, ref, mo);
    CHECK(q.mass_outside <= 1e-8);
    CHECK(study::interval_hits_spectrum(op, q.mu, q.residual));
    // residual also certifies on the dense spectrum for this moderate size
    if (op.n() <= 3000) {
        const Spectrum s = lowest_eigenpairs(op, 8);
        double best = 1e300;
        for (double l : s.eigenvalues) best = std::min(best, std::abs(l - q.mu));
        CHECK(best <= q.residual);
    }
}

TEST_CASE("cylinder quasimode on the exactly linear field is cutoff-limited") {
    const double h = 0.01;
    const FieldSpec model = make_cylinder_model_field(2 * kPi, 1.0, 1, 2.0);
    const Grid grid = study::cylinder_grid(model, h, 0);
    MontgomeryParams mp;
    mp.k = 1;
    mp.h = h;
    mp.beta1 = 1.0;
    mp.alpha1 = 0.0;
    mp.L = model.cyl_L;
    const DiscreteOperator op = cylinder_operator(mp, grid);
    CylinderQuasimodeOptions co;
    co.y_r1 = study::kCylR1;
    co.y_r2 = study::kCylR2;
    const Quasimode q = cylinder_separated_quasimode(mp, model, op, h, 1, co);
    CHECK(q.residual <= 1e-6 * q.mu);
}

TEST_CASE("cylinder quasimodes with distinct j are near-orthogonal") {
    const double h = 0.01;
    const FieldSpec field = study::cylinder_field();
    const Grid grid = study::cylinder_grid(field, h, 0);
    const DiscreteOperator op = cylinder_operator_full(field, 0.0, h, grid);
    MontgomeryParams mp;
    mp.k = 1;
    mp.h = h;
    mp.beta1 = field.beta1;
    mp.alpha1 = 0.0;
    mp.L = field.cyl_L;
    CylinderQuasimodeOptions co;
    co.y_r1 = study::kCylR1;
    co.y_r2 = study::kCylR2;
    const Quasimode q1 = cylinder_separated_quasimode(mp, field, op, h, 1, co);
    const Quasimode q2 = cylinder_separated_quasimode(mp, field, op, h, 2, co);
    CHECK(std::abs(q1.vector.dot(q2.vector)) <= 1e-6);
    // certified intervals from both meet the full spectrum
    CHECK(study::interval_hits_spectrum(op, q1.mu, q1.residual));
    CHECK(study::interval_hits_spectrum(op, q2.mu, q2.residual));
    // the fiber eigenvalue matches the band value h^{4/3} mu_j(b)
    const MomentumChoice mc = select_p(h, mp, co.b1, co.b2);
    const double Y = montgomery_truncation_halfwidth(1, mc.achieved_b);
    SolveOptions so;
    so.force_iterative = true;
    auto builder = [&](int level) {
        const int n = level == 0 ? 3001 : 6003;
        return assemble_montgomery_1d(1.0, mc.achieved_b, 1, Grid::dirichlet_1d(-Y, Y, n));
    };
    const Spectrum band = richardson_refine(builder, 1, so);
    CHECK(q1.mu == doctest::Approx(std::pow(h, 4.0 / 3.0) * band.eigenvalues[0])
                       .epsilon(5e-3));
}

TEST_CASE("quasimode residual sweeps have the advertised slopes (reduced)") {
    // a 4-point sweep keeps the unit tests quick; the full 7-point sweeps
    // live in the acceptance suite
    std::vector<double> sweep{0.04, 0.02, 0.01, 0.005};
    const study::SweepResult g = study::run_gaussian_sweep(
        study::gauss_field(), study::kGaussTargetMu, study::kGaussR1, study::kGaussR2,
        sweep, false);
    CHECK(g.fit.slope >= 4.0 / 3.0 - 0.1);

    const FieldSpec pf = study::pointwell_field();
    const ModelReference ref = model_reference(pf, study::default_reference_path());
    const study::SweepResult m = study::run_model_sweep(
        pf, ref, 1, study::kModelR1, study::kModelR2, sweep, false);
    CHECK(m.fit.slope >= 7.0 / 4.0 - 0.1);

    const study::SweepResult c =
        study::run_cylinder_sweep(study::cylinder_field(), 1, sweep, false);
    CHECK(c.fit.slope >= 4.0 / 3.0 - 0.1);
}

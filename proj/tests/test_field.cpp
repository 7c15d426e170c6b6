#include <doctest.h>

#include <cmath>

#include "specgap/field.hpp"

using namespace specgap;

TEST_CASE("trplus is |b| for the built-in families") {
    CHECK(trplus(make_constant_field(2.0), {0.3, -1.7}) == doctest::Approx(2.0));
    // b(x,y) = sin(2 pi x) at x = 1/4
    CHECK(trplus(make_sinx_field(), {0.25, 0.0}) == doctest::Approx(1.0));
    CHECK(trplus(make_sin2_field(1.0, 1.0), {0.5, 0.5}) == doctest::Approx(2.0));
}

TEST_CASE("trplus is lattice periodic") {
    const FieldSpec f = make_sin2_field(1.0, 1.0);
    for (int i = 0; i < 25; ++i) {
        const Vec2 p{0.13 * i - 1.1, 0.07 * i + 0.2};
        for (const Vec2& gamma : f.lattice) {
            CHECK(std::abs(trplus(f, p + gamma) - trplus(f, p)) < 1e-12);
        }
    }
}

TEST_CASE("polynomial fields scale homogeneously") {
    const FieldSpec f = make_poly_field(3, {{2, 1, 0.7}, {0, 3, -0.2}});
    const Vec2 p{0.4, -0.9};
    for (double s : {0.5, 2.0, 3.7}) {
        CHECK(trplus(f, s * p) ==
              doctest::Approx(std::pow(s, 3) * trplus(f, p)).epsilon(1e-12));
    }
}

TEST_CASE("check_barrier on the two-well cosprod cell") {
    const FieldSpec f = make_cosprod_field(1.0, 1.0);
    // independent dense boundary sampling oracle
    double oracle = 1e300;
    const Rect cell = f.default_cell;
    for (int i = 0; i <= 20000; ++i) {
        const double t = i / 20000.0;
        const double x = cell.x0 + cell.width() * t;
        const double y = cell.y0 + cell.height() * t;
        oracle = std::min({oracle, std::abs(f.b(x, cell.y0)), std::abs(f.b(x, cell.y1)),
                           std::abs(f.b(cell.x0, y)), std::abs(f.b(cell.x1, y))});
    }
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-6));

    const BarrierReport rep = check_barrier(f, cell, 0.5);
    CHECK(rep.ok);
    CHECK(rep.boundary_min == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(rep.b0 == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("check_barrier fails for a constant field") {
    const FieldSpec f = make_constant_field(1.0);
    const BarrierReport rep = check_barrier(f, {-0.5, 0.5, -0.5, 0.5}, 0.1);
    CHECK_FALSE(rep.ok);
    CHECK(rep.boundary_min == doctest::Approx(1.0));
}

TEST_CASE("check_barrier on the sin2 cell") {
    const FieldSpec f = make_sin2_field(1.0, 1.0);
    const BarrierReport rep = check_barrier(f, {-0.5, 0.5, -0.5, 0.5}, 0.9);
    CHECK(rep.ok);
    CHECK(rep.boundary_min == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("check_barrier rejects a non-fundamental domain") {
    const FieldSpec f = make_sin2_field(1.0, 1.0);
    CHECK_THROWS_AS(check_barrier(f, {-0.5, 0.7, -0.5, 0.5}, 0.5), DomainNotFundamental);
}

TEST_CASE("locate_wells finds the sin2 point well with k = 2") {
    const FieldSpec f = make_sin2_field(1.0, 1.0);
    // Taylor oracle: b ~ pi^2 (x^2 + y^2), so the log-log slope of b along a
    // ray from the origin is 2.
    {
        std::vector<double> r{1e-3, 2e-3, 4e-3}, v;
        for (double rr : r) v.push_back(f.b(rr, 0.0));
        double slope = std::log(v[2] / v[0]) / std::log(r[2] / r[0]);
        CHECK(slope == doctest::Approx(2.0).epsilon(1e-3));
    }
    const WellCatalog cat = locate_wells(f, f.default_cell, 0.5);
    REQUIRE(cat.wells.size() == 1);
    CHECK(std::hypot(cat.wells[0].center.x, cat.wells[0].center.y) < 5e-3);
    CHECK(cat.wells[0].fitted_k == doctest::Approx(2.0).epsilon(0.025));
    CHECK(std::abs(cat.wells[0].fitted_k - f.k) < 0.1);
}

TEST_CASE("locate_wells sees both cosprod wells") {
    const FieldSpec f = make_cosprod_field(1.0, 1.0);
    const WellCatalog cat = locate_wells(f, f.default_cell, 0.5);
    REQUIRE(cat.wells.size() == 2);
    CHECK(std::hypot(cat.wells[0].center.x, cat.wells[0].center.y) < 5e-3);
    CHECK(std::hypot(cat.wells[1].center.x - 0.5, cat.wells[1].center.y - 0.5) < 5e-3);
    for (const auto& w : cat.wells) CHECK(std::abs(w.fitted_k - 2.0) < 0.1);
}

TEST_CASE("locate_wells finds the two zero curves of sin(2 pi x)") {
    const FieldSpec f = make_sinx_field();
    LocateOptions opts;
    opts.periodic_x = true;
    const WellCatalog cat = locate_wells(f, {0, 1, 0, 1}, 0.5, opts);
    REQUIRE(cat.wells.size() == 2);
    for (const auto& w : cat.wells) {
        CHECK(w.is_curve);
        CHECK(std::abs(w.fitted_k - 1.0) < 0.1);
    }
    // zero lines x = 0 (wrapping the seam, so 0 or 1) and x = 1/2
    auto near = [](double a, double b) { return std::abs(a - b) < 0.01; };
    int at_half = 0, at_seam = 0;
    for (const auto& w : cat.wells) {
        if (near(w.curve_coord, 0.5)) ++at_half;
        if (near(w.curve_coord, 0.0) || near(w.curve_coord, 1.0)) ++at_seam;
    }
    CHECK(at_half == 1);
    CHECK(at_seam == 1);
}

TEST_CASE("locate_wells reports NoWells for a constant field") {
    const FieldSpec f = make_constant_field(1.0);
    CHECK_THROWS_AS(locate_wells(f, {-0.5, 0.5, -0.5, 0.5}, 0.5), NoWells);
}

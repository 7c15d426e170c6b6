#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specgap/models.hpp"
#include "test_util.hpp"

using namespace specgap;

namespace {
constexpr double kPi = std::numbers::pi;

DiscreteOperator free_laplacian_1d(int n) {
    const FieldSpec f = make_constant_field(0.0);
    return assemble(f, landau_gauge(f), Grid::dirichlet_1d(0.0, 1.0, n), 1.0);
}

// -d^2/dy^2 + y^2 via the Montgomery family at k = 0 (potential (0 - y)^2).
DiscreteOperator harmonic_1d(int n) {
    return assemble_montgomery_1d(1.0, 0.0, 0, Grid::dirichlet_1d(-10.0, 10.0, n));
}

} // namespace

TEST_CASE("free Laplacian spectrum pi^2 {1,4,9}") {
    const DiscreteOperator op = free_laplacian_1d(255);
    const Spectrum s = lowest_eigenpairs(op, 3);
    for (int j = 1; j <= 3; ++j) {
        const double exact = kPi * kPi * j * j;
        CHECK(std::abs(s.eigenvalues[j - 1] - exact) / exact < 1e-3);
    }
}

TEST_CASE("harmonic oscillator levels {1,3,5}") {
    const DiscreteOperator op = harmonic_1d(2559);
    const Spectrum s = lowest_eigenpairs(op, 3);
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(s.eigenvalues[j] - (2 * j + 1)) < 1e-3);
}

TEST_CASE("residual certificates meet the tolerance") {
    const DiscreteOperator op = free_laplacian_1d(4095); // iterative path
    const Spectrum s = lowest_eigenpairs(op, 4);
    for (double r : s.residuals) CHECK(r <= 1e-9 * op.scale);
    // orthonormality of the returned vectors
    Eigen::MatrixXcd G = s.eigenvectors.adjoint() * s.eigenvectors;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(G(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("dense and iterative paths agree") {
    const DiscreteOperator op = free_laplacian_1d(1200);
    SolveOptions dense;
    SolveOptions iter;
    iter.force_iterative = true;
    const Spectrum sd = lowest_eigenpairs(op, 5, dense);
    const Spectrum si = lowest_eigenpairs(op, 5, iter);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(sd.eigenvalues[i] - si.eigenvalues[i]) < 1e-8 * op.scale);
}

TEST_CASE("certificates bound the distance to the true spectrum") {
    // dense small instance: residual >= min_i |lambda_i - lambda| holds for
    // any approximate pair (self-adjointness)
    const DiscreteOperator op = free_laplacian_1d(300);
    SolveOptions so;
    so.force_iterative = true;
    so.tol = 1e-6; // loose on purpose
    const Spectrum si = lowest_eigenpairs(op, 3, so);
    const Spectrum exact = lowest_eigenpairs(op, 10);
    for (int i = 0; i < 3; ++i) {
        double best = 1e300;
        for (double l : exact.eigenvalues)
            best = std::min(best, std::abs(l - si.eigenvalues[i]));
        CHECK(best <= si.residuals[i] + 1e-12 * op.scale);
    }
}

TEST_CASE("solves are deterministic for a fixed seed") {
    const DiscreteOperator op = free_laplacian_1d(4000);
    SolveOptions so;
    so.force_iterative = true;
    const Spectrum a = lowest_eigenpairs(op, 3, so);
    const Spectrum b = lowest_eigenpairs(op, 3, so);
    for (int i = 0; i < 3; ++i) CHECK(a.eigenvalues[i] == b.eigenvalues[i]);
}

TEST_CASE("count_below matches the computed spectrum") {
    const DiscreteOperator op = free_laplacian_1d(500);
    const Spectrum s = lowest_eigenpairs(op, 6);
    const double split = 0.5 * (s.eigenvalues[3] + s.eigenvalues[4]);
    CHECK(count_below(op, split) == 4);
    CHECK(count_below(op, s.eigenvalues[0] * 0.5) == 0);
}

TEST_CASE("richardson refinement hits pi^2 closely") {
    auto builder = [](int level) { return free_laplacian_1d(level == 0 ? 255 : 511); };
    const Spectrum s = richardson_refine(builder, 1);
    CHECK(std::abs(s.eigenvalues[0] - kPi * kPi) < 1e-5);
    CHECK(s.discretization_error[0] >= 0);
}

TEST_CASE("richardson error estimate decreases under refinement") {
    auto b1 = [](int level) { return free_laplacian_1d(level == 0 ? 127 : 255); };
    auto b2 = [](int level) { return free_laplacian_1d(level == 0 ? 255 : 511); };
    const Spectrum s1 = richardson_refine(b1, 1);
    const Spectrum s2 = richardson_refine(b2, 1);
    CHECK(s2.discretization_error[0] < s1.discretization_error[0]);
    CHECK(s1.discretization_error[0] >= 0);
}

TEST_CASE("montgomery ground value is self-consistent across refinements") {
    const double Y = montgomery_truncation_halfwidth(1, 0.0);
    auto builder_at = [Y](int base) {
        return [base, Y](int level) {
            const int n = level == 0 ? base : 2 * base + 1;
            return assemble_montgomery_1d(1.0, 0.0, 1, Grid::dirichlet_1d(-Y, Y, n));
        };
    };
    SolveOptions so;
    so.force_iterative = true;
    const Spectrum a = richardson_refine(builder_at(2303), 1, so);
    const Spectrum b = richardson_refine(builder_at(4607), 1, so);
    CHECK(std::abs(a.eigenvalues[0] - b.eigenvalues[0]) < 1e-5);
}

TEST_CASE("track_bands: single sample equals sorted order") {
    const DiscreteOperator op = harmonic_1d(1500);
    SolveOptions so;
    so.force_iterative = true;
    const Spectrum s = lowest_eigenpairs(op, 4, so);
    const BandFunctionTable t = track_bands({s}, {0.0});
    REQUIRE(t.bands() == 4);
    for (int j = 0; j < 4; ++j) CHECK(t.mu[j][0] == s.eigenvalues[j]);
}

TEST_CASE("track_bands: constant shift moves every branch exactly") {
    const Grid g = Grid::dirichlet_1d(-9.0, 9.0, 1800);
    SolveOptions so;
    so.force_iterative = true;
    std::vector<Spectrum> base, shifted;
    std::vector<double> bs{0.4, 0.45, 0.5};
    for (double b : bs) {
        DiscreteOperator op = assemble_montgomery_1d(1.0, b, 1, g);
        base.push_back(lowest_eigenpairs(op, 3, so));
        SpMat I(op.n(), op.n());
        I.setIdentity();
        DiscreteOperator op1 = op;
        op1.M = op.M + I;
        shifted.push_back(lowest_eigenpairs(op1, 3, so));
    }
    const BandFunctionTable t0 = track_bands(base, bs);
    const BandFunctionTable t1 = track_bands(shifted, bs);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            CHECK(t1.mu[j][i] == doctest::Approx(t0.mu[j][i] + 1.0).epsilon(1e-9));
}

TEST_CASE("track_bands keeps the per-sample multiset") {
    const Grid g = Grid::dirichlet_1d(-9.0, 9.0, 1500);
    SolveOptions so;
    so.force_iterative = true;
    std::vector<Spectrum> sp;
    std::vector<double> bs{0.0, 0.1, 0.2, 0.3};
    for (double b : bs)
        sp.push_back(lowest_eigenpairs(assemble_montgomery_1d(1.0, b, 1, g), 4, so));
    const BandFunctionTable t = track_bands(sp, bs);
    for (size_t i = 0; i < bs.size(); ++i) {
        std::vector<double> col;
        for (int j = 0; j < 4; ++j) col.push_back(t.mu[j][i]);
        std::sort(col.begin(), col.end());
        for (int j = 0; j < 4; ++j) CHECK(col[j] == sp[i].eigenvalues[j]);
    }
}

TEST_CASE("m out of range is rejected") {
    const DiscreteOperator op = free_laplacian_1d(100);
    CHECK_THROWS_AS(lowest_eigenpairs(op, 80), ConfigError);
    CHECK_THROWS_AS(lowest_eigenpairs(op, 0), ConfigError);
}

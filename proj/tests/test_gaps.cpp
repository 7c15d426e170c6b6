#include <doctest.h>

#include <cmath>

#include "specgap/study.hpp"

using namespace specgap;

namespace {

Spectrum synthetic_spectrum(std::vector<double> vals, double res = 1e-9) {
    Spectrum s;
    s.eigenvalues = std::move(vals);
    s.residuals.assign(s.eigenvalues.size(), res);
    s.discretization_error.assign(s.eigenvalues.size(), 0.0);
    return s;
}

DiscreteOperator diag_operator(const std::vector<double>& vals) {
    DiscreteOperator op;
    const int n = static_cast<int>(vals.size());
    op.M.resize(n, n);
    std::vector<Eigen::Triplet<cd>> t;
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, cd(vals[i], 0));
    op.M.setFromTriplets(t.begin(), t.end());
    op.scale = 1.0;
    op.h = 1.0;
    return op;
}

Quasimode synthetic_quasimode(double mu, double residual, int n = 4) {
    Quasimode q;
    q.mu = mu;
    q.residual = residual;
    q.vector = Eigen::VectorXcd::Ones(n) / std::sqrt(double(n));
    return q;
}

} // namespace

TEST_CASE("locate_gaps on the worked example") {
    const Spectrum s = synthetic_spectrum({0.10, 0.11, 0.25, 0.26});
    const GapReport rep = locate_gaps(s, {0.0, 0.3}, 0.02);
    REQUIRE(rep.count == 1);
    CHECK(rep.gaps[0].lo == doctest::Approx(0.11));
    CHECK(rep.gaps[0].hi == doctest::Approx(0.25));
    REQUIRE(rep.edge_gaps.size() == 2);
    CHECK(rep.edge_gaps[0].lo == doctest::Approx(0.0));
    CHECK(rep.edge_gaps[0].hi == doctest::Approx(0.10));
    CHECK(rep.edge_gaps[1].lo == doctest::Approx(0.26));
    CHECK(rep.edge_gaps[1].hi == doctest::Approx(0.30));
    // middle third of the interior gap
    CHECK(rep.gap_cores[0].lo == doctest::Approx(0.11 + 0.14 / 3));
    CHECK(rep.gap_cores[0].hi == doctest::Approx(0.25 - 0.14 / 3));
}

TEST_CASE("locate_gaps with an empty window") {
    const Spectrum s = synthetic_spectrum({5.0, 6.0});
    const GapReport rep = locate_gaps(s, {0.0, 1.0}, 0.01);
    REQUIRE(rep.count == 1);
    CHECK(rep.gaps[0].lo == doctest::Approx(0.0));
    CHECK(rep.gaps[0].hi == doctest::Approx(1.0));
}

TEST_CASE("locate_gaps validates delta") {
    Spectrum s = synthetic_spectrum({0.1, 0.2}, 1e-3);
    CHECK_THROWS_AS(locate_gaps(s, {0.0, 1.0}, 1e-3), ResolutionTooFine);
    s.discretization_error = {1e-2, 1e-2};
    CHECK_THROWS_AS(locate_gaps(s, {0.0, 1.0}, 5e-3), ResolutionTooFine);
}

TEST_CASE("locate_gaps partition consistency") {
    const Spectrum s = synthetic_spectrum({0.1, 0.3, 0.32, 0.7});
    const double delta = 0.05;
    const GapReport rep = locate_gaps(s, {0.0, 1.0}, delta);
    // union of gaps, edge gaps and delta-neighborhoods of eigenvalues covers
    // the window
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        bool covered = false;
        for (const auto& g : rep.gaps) covered |= x >= g.lo && x <= g.hi;
        for (const auto& g : rep.edge_gaps) covered |= x >= g.lo && x <= g.hi;
        for (double e : s.eigenvalues) covered |= std::abs(x - e) <= delta;
        CHECK(covered);
    }
}

TEST_CASE("gap reports scale exactly with the spectrum") {
    const std::vector<double> vals{0.11, 0.13, 0.40, 0.55};
    for (double scale : {0.5, 2.0, 4.0}) { // powers of two: exact in binary
        std::vector<double> scaled;
        for (double v : vals) scaled.push_back(v * scale);
        const GapReport a = locate_gaps(synthetic_spectrum(vals), {0.0, 1.0}, 0.05);
        const GapReport b =
            locate_gaps(synthetic_spectrum(scaled), {0.0, scale}, 0.05 * scale);
        REQUIRE(a.count == b.count);
        for (int i = 0; i < a.count; ++i) {
            CHECK(a.gaps[i].lo * scale == b.gaps[i].lo);
            CHECK(a.gaps[i].hi * scale == b.gaps[i].hi);
        }
    }
}

TEST_CASE("certify_eigenvalue returns [mu - r, mu + r] and checks sizes") {
    const DiscreteOperator op = diag_operator({0.9995, 2.0, 3.0, 4.0});
    Quasimode q = synthetic_quasimode(1.0, 1e-3);
    const Interval iv = certify_eigenvalue(op, q);
    CHECK(iv.lo == doctest::Approx(0.999));
    CHECK(iv.hi == doctest::Approx(1.001));
    CHECK(study::interval_hits_spectrum(op, q.mu, q.residual));
    Quasimode bad = synthetic_quasimode(1.0, 1e-3, 7);
    CHECK_THROWS_AS(certify_eigenvalue(op, bad), GridMismatch);
}

TEST_CASE("certified interval of an exact eigenvector is tight") {
    const DiscreteOperator op = diag_operator({0.5, 1.5, 2.5, 3.5});
    Quasimode q;
    q.vector = Eigen::VectorXcd::Zero(4);
    q.vector[1] = 1.0;
    q.mu = 1.5;
    q.residual = (op.M * q.vector - cd(q.mu, 0) * q.vector).norm();
    CHECK(q.residual <= 2e-9 * std::abs(q.mu));
    const Interval iv = certify_eigenvalue(op, q);
    CHECK(iv.length() <= 4e-9 * std::abs(q.mu));
}

TEST_CASE("predict_gap_windows arithmetic") {
    const auto w = predict_gap_windows({1.0, 3.0}, 2, 0.01, 0.25);
    REQUIRE(w.size() == 1);
    CHECK(w[0].lo == doctest::Approx(1.5e-3).epsilon(1e-12));
    CHECK(w[0].hi == doctest::Approx(2.5e-3).epsilon(1e-12));
    CHECK(predict_gap_windows({1.0, 3.0}, 2, 0.01, 0.5).empty());
}

TEST_CASE("predict_gap_windows nest monotonically in the safety factor") {
    const std::vector<double> lam{1.0, 2.2, 4.1, 7.3};
    const auto a = predict_gap_windows(lam, 2, 0.02, 0.1);
    const auto b = predict_gap_windows(lam, 2, 0.02, 0.3);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].lo >= a[i].lo);
        CHECK(b[i].hi <= a[i].hi);
    }
}

TEST_CASE("count_gaps_from_quasimodes on the worked example") {
    std::vector<Quasimode> qs{synthetic_quasimode(1.0, 1e-3),
                              synthetic_quasimode(2.0, 1e-3),
                              synthetic_quasimode(3.0, 1e-3)};
    CHECK(count_gaps_from_quasimodes(qs, {0.5, 3.5}) == 2);
    // overlapping pair contributes nothing
    std::vector<Quasimode> overlap{synthetic_quasimode(1.0, 0.6),
                                   synthetic_quasimode(2.0, 0.6)};
    CHECK(count_gaps_from_quasimodes(overlap, {0.0, 3.0}) == 0);
    // boundary-touching intervals are dropped
    std::vector<Quasimode> edge{synthetic_quasimode(0.5, 0.6),
                                synthetic_quasimode(2.0, 1e-3),
                                synthetic_quasimode(2.5, 1e-3)};
    CHECK(count_gaps_from_quasimodes(edge, {0.0, 3.0}) == 1);
}

TEST_CASE("count_gaps never exceeds the located interior gap count") {
    const std::vector<double> evs{0.10, 0.20, 0.30, 0.42};
    const DiscreteOperator op = diag_operator(evs);
    std::vector<Quasimode> qs;
    for (double mu : {0.101, 0.199, 0.304}) qs.push_back(synthetic_quasimode(mu, 2e-3));
    const int nq = count_gaps_from_quasimodes(qs, {0.0, 0.5});
    const GapReport rep = locate_gaps(synthetic_spectrum(evs), {0.0, 0.5}, 0.05);
    CHECK(nq <= rep.count);
}

TEST_CASE("weyl_count on synthetic spectra") {
    std::vector<double> hs{0.1, 0.05};
    std::vector<Spectrum> sp{synthetic_spectrum({0.05, 0.08, 0.2}),
                             synthetic_spectrum({0.02, 0.04, 0.09})};
    const auto rows = weyl_count(sp, hs, [](double h) { return h; });
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].count == 2);
    CHECK(rows[1].count == 2);
    CHECK(rows[0].normalized == doctest::Approx(2 * 0.01));
    // empty window
    std::vector<Spectrum> sp2{synthetic_spectrum({0.5})};
    const auto rows2 = weyl_count(sp2, {0.1}, [](double) { return 0.3; });
    CHECK(rows2[0].count == 0);
    // non-exhausted window is an error
    std::vector<Spectrum> sp3{synthetic_spectrum({0.05, 0.09})};
    CHECK_THROWS_AS(weyl_count(sp3, {0.1}, [](double) { return 0.3; }),
                    WindowNotExhausted);
}

TEST_CASE("localization distance vanishes when comparing an operator to itself") {
    std::vector<double> hs{0.1, 0.05};
    std::vector<Spectrum> a{synthetic_spectrum({0.01, 0.02, 0.05}),
                            synthetic_spectrum({0.005, 0.01, 0.02})};
    const LocalizationReport rep = localization_check(
        a, a, [](double h) { return Interval{0.0, h}; }, hs, 1);
    for (const auto& r : rep.rows) CHECK(r.distance == 0.0);
    CHECK(rep.monotone);
}

TEST_CASE("localization check fits both decay models") {
    std::vector<double> hs{0.04, 0.02, 0.01, 0.005};
    std::vector<Spectrum> full, well;
    for (double h : hs) {
        const double d = std::exp(-1.0 / std::sqrt(h));
        full.push_back(synthetic_spectrum({0.001, 0.01 + d}));
        well.push_back(synthetic_spectrum({0.001, 0.01}));
    }
    const LocalizationReport rep = localization_check(
        full, well, [](double h) { return Interval{0.0, h}; }, hs, 1);
    CHECK(rep.monotone);
    CHECK(rep.exp_r2 > 0.999);
    CHECK(rep.exponential_preferred);
}

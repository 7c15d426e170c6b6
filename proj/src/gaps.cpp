#include "specgap/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specgap/errors.hpp"

namespace specgap {

Interval certify_eigenvalue(const DiscreteOperator& op, const Quasimode& q) {
    if (q.vector.size() != op.n())
        throw GridMismatch("quasimode vector size " + std::to_string(q.vector.size()) +
                           " does not match operator size " + std::to_string(op.n()));
    return {q.mu - q.residual, q.mu + q.residual};
}

std::vector<WeylRow> weyl_count(const std::vector<Spectrum>& spectra,
                                const std::vector<double>& h_values,
                                const std::function<double(double)>& threshold_fn) {
    if (spectra.size() != h_values.size())
        throw ConfigError("weyl_count: one spectrum per h required");
    std::vector<WeylRow> rows;
    for (size_t i = 0; i < spectra.size(); ++i) {
        const double h = h_values[i];
        const double t = threshold_fn(h);
        const auto& ev = spectra[i].eigenvalues;
        if (!ev.empty() && ev.back() <= t)
            throw WindowNotExhausted(
                "spectrum at h = " + std::to_string(h) +
                " has no eigenvalue above the threshold; the count is not certified");
        WeylRow r;
        r.h = h;
        r.threshold = t;
        r.count = static_cast<int>(std::count_if(
            ev.begin(), ev.end(), [t](double v) { return v >= 0 && v <= t; }));
        r.normalized = r.count * h * h;
        rows.push_back(r);
    }
    return rows;
}

GapReport locate_gaps(const Spectrum& spectrum, Interval window, double delta) {
    double disc = 0;
    for (double e : spectrum.discretization_error) disc = std::max(disc, e);
    if (delta < disc)
        throw ResolutionTooFine("delta = " + std::to_string(delta) +
                                " is below the discretization error " +
                                std::to_string(disc));
    double maxres = 0;
    for (double r : spectrum.residuals) maxres = std::max(maxres, r);
    if (delta <= 2 * maxres)
        throw ResolutionTooFine("delta must exceed twice the solver residual");

    GapReport rep;
    rep.window = window;
    rep.h = spectrum.h;
    rep.delta = delta;
    rep.method_tag = "scan";
    std::vector<double> ev;
    for (double v : spectrum.eigenvalues)
        if (v >= window.lo && v <= window.hi) ev.push_back(v);
    std::sort(ev.begin(), ev.end());

    if (ev.empty()) {
        rep.gaps.push_back(window);
        rep.gap_cores.push_back({window.lo + window.length() / 3,
                                 window.hi - window.length() / 3});
        rep.count = 1;
        return rep;
    }
    if (ev.front() - window.lo >= delta)
        rep.edge_gaps.push_back({window.lo, ev.front()});
    for (size_t i = 0; i + 1 < ev.size(); ++i) {
        const double a = ev[i], b = ev[i + 1];
        if (b - a >= delta) {
            rep.gaps.push_back({a, b});
            rep.gap_cores.push_back({a + (b - a) / 3, b - (b - a) / 3});
        }
    }
    if (window.hi - ev.back() >= delta)
        rep.edge_gaps.push_back({ev.back(), window.hi});
    rep.count = static_cast<int>(rep.gaps.size());
    return rep;
}

std::vector<Interval> predict_gap_windows(const std::vector<double>& lambdas,
                                          int k, double h, double safety) {
    if (!(safety > 0))
        throw ConfigError("predict_gap_windows: safety must be positive");
    std::vector<Interval> out;
    if (safety >= 0.5) return out;
    const double scalef = std::pow(h, (2.0 * k + 2.0) / (k + 2.0));
    for (size_t m = 0; m + 1 < lambdas.size(); ++m) {
        const double gap = lambdas[m + 1] - lambdas[m];
        if (gap <= 0) continue;
        out.push_back({(lambdas[m] + safety * gap) * scalef,
                       (lambdas[m + 1] - safety * gap) * scalef});
    }
    return out;
}

namespace {

double dist_to_set(double x, const std::vector<double>& set) {
    double d = std::numeric_limits<double>::infinity();
    for (double s : set) d = std::min(d, std::abs(x - s));
    return d;
}

void loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
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
}

// R^2 of the best fit with a pinned slope (one free intercept).
double pinned_r2(const std::vector<double>& x, const std::vector<double>& y,
                 double slope) {
    const int m = static_cast<int>(x.size());
    double icept = 0;
    for (int i = 0; i < m; ++i) icept += y[i] - slope * x[i];
    icept /= m;
    double sy = 0, syy = 0, ssres = 0;
    for (int i = 0; i < m; ++i) {
        sy += y[i];
        syy += y[i] * y[i];
        const double e = y[i] - (slope * x[i] + icept);
        ssres += e * e;
    }
    const double sstot = syy - sy * sy / m;
    return sstot > 0 ? 1.0 - ssres / sstot : 1.0;
}

} // namespace

LocalizationReport localization_check(const std::vector<Spectrum>& full_spec,
                                      const std::vector<Spectrum>& well_spec,
                                      const std::function<Interval(double)>& window_fn,
                                      const std::vector<double>& h_sweep,
                                      int well_count) {
    (void)well_count; // replication does not change a Hausdorff distance
    if (full_spec.size() != h_sweep.size() || well_spec.size() != h_sweep.size())
        throw ConfigError("localization_check: one spectrum pair per h required");
    LocalizationReport rep;
    for (size_t i = 0; i < h_sweep.size(); ++i) {
        const Interval w = window_fn(h_sweep[i]);
        std::vector<double> a, b;
        for (double v : full_spec[i].eigenvalues)
            if (v >= w.lo && v <= w.hi) a.push_back(v);
        for (double v : well_spec[i].eigenvalues)
            if (v >= w.lo && v <= w.hi) b.push_back(v);
        LocalizationRow row;
        row.h = h_sweep[i];
        double d = 0;
        for (double v : a) d = std::max(d, dist_to_set(v, well_spec[i].eigenvalues));
        for (double v : b) d = std::max(d, dist_to_set(v, full_spec[i].eigenvalues));
        row.distance = d;
        double floor = 0;
        for (double e : full_spec[i].discretization_error) floor = std::max(floor, e);
        for (double e : well_spec[i].discretization_error) floor = std::max(floor, e);
        row.floor = floor;
        row.floor_limited = d <= 3 * floor;
        rep.rows.push_back(row);
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const LocalizationRow& a, const LocalizationRow& b) { return a.h > b.h; });
    for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
        if (rep.rows[i + 1].distance > rep.rows[i].distance * (1 + 1e-12))
            rep.monotone = false;

    std::vector<double> ish, lh, ld;
    for (const auto& r : rep.rows) {
        if (r.distance <= 0) continue;
        ish.push_back(1.0 / std::sqrt(r.h));
        lh.push_back(std::log(r.h));
        ld.push_back(std::log(r.distance));
    }
    if (ish.size() >= 3) {
        double s, c;
        loglog_fit(ish, ld, &s, &c, &rep.exp_r2);
        rep.exp_c = -s;
        loglog_fit(lh, ld, &rep.pow_p, &c, &rep.pow_r2);
        rep.h3_r2 = pinned_r2(lh, ld, 3.0);
        rep.exponential_preferred = rep.exp_r2 >= rep.pow_r2;
    }
    return rep;
}

int count_gaps_from_quasimodes(const std::vector<Quasimode>& quasimodes,
                               Interval window) {
    // certified intervals, interior to the window by more than the residual
    std::vector<Interval> iv;
    for (const auto& q : quasimodes) {
        if (!std::isfinite(q.residual)) continue;
        if (q.mu - q.residual <= window.lo || q.mu + q.residual >= window.hi) continue;
        iv.push_back({q.mu - q.residual, q.mu + q.residual});
    }
    if (iv.empty()) return 0;
    // largest pairwise-disjoint chain (greedy by right endpoint)
    std::sort(iv.begin(), iv.end(),
              [](const Interval& a, const Interval& b) { return a.hi < b.hi; });
    int taken = 0;
    double last_hi = -std::numeric_limits<double>::infinity();
    for (const auto& v : iv) {
        if (v.lo > last_hi) {
            ++taken;
            last_hi = v.hi;
        }
    }
    return std::max(taken - 1, 0);
}

} // namespace specgap

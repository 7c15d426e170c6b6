#include "specgap/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "specgap/study.hpp"

namespace specgap {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunLog {
    std::vector<std::pair<std::string, double>> timings;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    void mark(const std::string& what) {
        const auto t1 = std::chrono::steady_clock::now();
        timings.push_back({what, std::chrono::duration<double>(t1 - t0).count()});
        t0 = t1;
    }
};

FieldSpec field_from_config(const Config& cfg) {
    if (cfg.has("field", "preset")) return field_preset(cfg.get("field", "preset"));
    const std::string family = cfg.get_or("field", "family", "");
    if (family.empty()) throw ConfigError(cfg.origin() + ": [field] needs preset or family");
    const double period = cfg.get_double_or("field", "period", 1.0);
    const double amp = cfg.get_double_or("field", "amplitude", 1.0);
    if (family == "constant") return make_constant_field(amp);
    if (family == "sin2") return make_sin2_field(period, amp);
    if (family == "cosprod") return make_cosprod_field(period, amp);
    if (family == "sinx") return make_sinx_field();
    if (family == "cylinder-sine")
        return make_cylinder_sine_field(cfg.get_double_or("field", "L", 2 * 3.14159265358979323846),
                                        cfg.get_double_or("field", "beta1", 1.0), period);
    if (family == "poly") {
        const int k = cfg.get_int_or("field", "k", 2);
        std::vector<double> flat = cfg.get_list("field", "terms");
        if (flat.size() % 3 != 0)
            throw ConfigError(cfg.origin() + ":" +
                              std::to_string(cfg.line_of("field", "terms")) +
                              ": terms must be i,j,c triples");
        std::vector<PolyTerm> terms;
        for (size_t i = 0; i < flat.size(); i += 3)
            terms.push_back({static_cast<int>(flat[i]), static_cast<int>(flat[i + 1]),
                             flat[i + 2]});
        return make_poly_field(k, terms);
    }
    throw ConfigError(cfg.origin() + ":" + std::to_string(cfg.line_of("field", "family")) +
                      ": unknown field family '" + family + "'");
}

std::vector<double> sweep_from_config(const Config& cfg) {
    std::vector<double> sweep = cfg.has("sweep", "h") ? cfg.get_list("sweep", "h")
                                                      : study::default_sweep();
    if (sweep.empty())
        throw ConfigError(cfg.origin() + ": [sweep] h must not be empty");
    for (size_t i = 0; i < sweep.size(); ++i) {
        if (sweep[i] <= 0)
            throw ConfigError(cfg.origin() + ":" + std::to_string(cfg.line_of("sweep", "h")) +
                              ": h values must be positive");
        if (i > 0 && sweep[i] >= sweep[i - 1])
            throw ConfigError(cfg.origin() + ":" + std::to_string(cfg.line_of("sweep", "h")) +
                              ": h_sweep must be strictly decreasing");
    }
    return sweep;
}

std::string reference_path(const Config& cfg) {
    return cfg.get_or("model2d", "reference_cache", study::default_reference_path());
}

CsvTable sweep_csv(const study::SweepResult& r) {
    CsvTable t;
    t.columns = {"h", "residual", "log_h", "log_residual", "mu", "relative",
                 "mass_outside", "n", "certified"};
    for (const auto& row : r.rows)
        t.rows.push_back({format_double(row.h), format_double(row.residual),
                          format_double(std::log(row.h)),
                          format_double(std::log(row.residual)), format_double(row.mu),
                          format_double(row.relative), format_double(row.mass_outside),
                          std::to_string(row.n), row.certified ? "1" : "0"});
    return t;
}

ordered_json fit_json(const SlopeFit& f) {
    ordered_json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["jackknife_spread"] = f.jackknife_spread;
    j["n"] = f.n;
    return j;
}

CsvTable spectrum_csv(const Spectrum& s) {
    CsvTable t;
    t.columns = {"index", "eigenvalue", "error_estimate", "residual"};
    for (int i = 0; i < s.size(); ++i)
        t.rows.push_back(
            {std::to_string(i + 1), format_double(s.eigenvalues[i]),
             format_double(i < static_cast<int>(s.discretization_error.size())
                               ? s.discretization_error[i]
                               : 0.0),
             format_double(i < static_cast<int>(s.residuals.size()) ? s.residuals[i]
                                                                    : 0.0)});
    return t;
}

// --- individual experiments -------------------------------------------------

void run_verify_identities(const Config& cfg, const fs::path& out, ordered_json& result) {
    std::vector<double> ks = cfg.has("identities", "k") ? cfg.get_list("identities", "k")
                                                        : std::vector<double>{1, 2};
    std::vector<double> alphas = cfg.has("identities", "alpha")
                                     ? cfg.get_list("identities", "alpha")
                                     : std::vector<double>{0.5, 2, 3};
    std::vector<double> hs = cfg.has("identities", "h") ? cfg.get_list("identities", "h")
                                                        : std::vector<double>{0.1, 0.05, 0.02};
    std::vector<double> betas = cfg.has("identities", "beta")
                                    ? cfg.get_list("identities", "beta")
                                    : std::vector<double>{0.1, 0.3, 1.0};
    CsvTable t;
    t.columns = {"k", "alpha", "h", "beta", "deviation"};
    double worst = 0;
    for (double kd : ks) {
        const int k = static_cast<int>(kd);
        double bmax = 0;
        for (double b : betas) bmax = std::max(bmax, std::abs(b));
        const double Y = montgomery_truncation_halfwidth(k, bmax);
        const Grid grid = Grid::dirichlet_1d(-Y, Y, 1501);
        for (double alpha : alphas)
            for (double h : hs)
                for (double beta : betas) {
                    const double dev = dilation_check(k, h, beta, alpha, grid);
                    worst = std::max(worst, dev);
                    t.rows.push_back({std::to_string(k), format_double(alpha),
                                      format_double(h), format_double(beta),
                                      format_double(dev)});
                }
    }
    write_csv(t, (out / "identities.csv").string());
    result["max_relative_deviation"] = worst;
    result["tolerance"] = 1e-12;
    result["pass"] = worst <= 1e-12;
}

void run_bands(const Config& cfg, const fs::path& out, ordered_json& result) {
    const int k = cfg.get_int_or("bands", "k", 1);
    const int J = cfg.get_int_or("bands", "J", 5);
    const double b0 = cfg.get_double_or("bands", "b_min", -1.0);
    const double b1 = cfg.get_double_or("bands", "b_max", 4.0);
    const double db = cfg.get_double_or("bands", "b_step", 0.05);
    std::vector<double> bgrid;
    for (double b = b0; b <= b1 + 1e-12; b += db) bgrid.push_back(b);
    BandFunctionTable t = montgomery_bands(k, bgrid, J);

    CsvTable csv;
    csv.columns = {"b"};
    for (int j = 1; j <= J; ++j) csv.columns.push_back("mu_" + std::to_string(j));
    for (size_t i = 0; i < bgrid.size(); ++i) {
        std::vector<std::string> row{format_double(bgrid[i])};
        for (int j = 0; j < J; ++j) row.push_back(format_double(t.mu[j][i]));
        csv.rows.push_back(row);
    }
    write_csv(csv, (out / "bands.csv").string());

    double margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < bgrid.size(); ++i)
        for (int j = 0; j + 1 < J; ++j)
            margin = std::min(margin, t.mu[j + 1][i] - t.mu[j][i]);
    int argmin = 0;
    for (size_t i = 0; i < bgrid.size(); ++i)
        if (t.mu[0][i] < t.mu[0][argmin]) argmin = static_cast<int>(i);
    result["k"] = k;
    result["J"] = J;
    result["simplicity_margin"] = margin;
    result["crossings_flagged"] = t.crossings_flagged;
    result["mu1_min"] = t.mu[0][argmin];
    result["mu1_argmin_b"] = bgrid[argmin];
    result["minimum_interior"] = argmin > 0 && argmin + 1 < static_cast<int>(bgrid.size());
}

void run_model2d(const Config& cfg, const fs::path& out, ordered_json& result, int jobs) {
    FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                          ? field_from_config(cfg)
                          : study::pointwell_field();
    FieldSpec poly = field.kind == FieldKind::PolynomialModel
                         ? field
                         : make_poly_field(field.k, field.model_poly);
    const ModelReference ref = model_reference(field, reference_path(cfg));
    std::vector<double> hs;
    if (cfg.has("sweep", "h")) {
        hs = sweep_from_config(cfg);
    } else {
        for (int e = 4; e <= 9; ++e) hs.push_back(std::pow(2.0, -e));
    }
    std::vector<double> lam(hs.size());
    std::vector<int> sizes(hs.size());
    parallel_for(static_cast<int>(hs.size()), jobs, [&](int i) {
        const Grid g = model_grid(poly, hs[i], 10.0, 8.0);
        const DiscreteOperator op = model_operator_2d(poly, hs[i], g);
        SolveOptions so;
        so.force_iterative = true;
        lam[i] = lowest_eigenpairs(op, 1, so).eigenvalues[0];
        sizes[i] = op.n();
    });
    const double pw = (2.0 * poly.k + 2.0) / (poly.k + 2.0);
    CsvTable t;
    t.columns = {"h", "lambda1", "lambda1_normalized", "log_h", "log_lambda1", "n"};
    std::vector<std::pair<double, double>> pairs;
    for (size_t i = 0; i < hs.size(); ++i) {
        pairs.push_back({hs[i], lam[i]});
        t.rows.push_back({format_double(hs[i]), format_double(lam[i]),
                          format_double(lam[i] / std::pow(hs[i], pw)),
                          format_double(std::log(hs[i])), format_double(std::log(lam[i])),
                          std::to_string(sizes[i])});
    }
    write_csv(t, (out / "model2d.csv").string());
    const SlopeFit fit = fit_residual_slope(pairs);
    result["k"] = poly.k;
    result["expected_slope"] = pw;
    result["fit"] = fit_json(fit);
    result["slope_error"] = std::abs(fit.slope - pw);
    result["reference_lambda"] = ref.lambda;
}

void run_quasimode(const Config& cfg, const fs::path& out, ordered_json& result, int jobs) {
    const std::string recipe = cfg.get_or("quasimode", "recipe", "gaussian");
    const std::vector<double> sweep = sweep_from_config(cfg);
    const bool certify = cfg.get_bool_or("quasimode", "certify", true);
    study::SweepResult r;
    double expected = 0;
    if (recipe == "gaussian") {
        FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                              ? field_from_config(cfg)
                              : study::gauss_field();
        r = study::run_gaussian_sweep(
            field, cfg.get_double_or("quasimode", "target_mu", study::kGaussTargetMu),
            cfg.get_double_or("quasimode", "r1", study::kGaussR1),
            cfg.get_double_or("quasimode", "r2", study::kGaussR2), sweep, certify, jobs);
        expected = 4.0 / 3.0;
    } else if (recipe == "model") {
        FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                              ? field_from_config(cfg)
                              : study::pointwell_field();
        const ModelReference ref = model_reference(field, reference_path(cfg));
        r = study::run_model_sweep(field, ref, cfg.get_int_or("quasimode", "j", 1),
                                   cfg.get_double_or("quasimode", "r1", study::kModelR1),
                                   cfg.get_double_or("quasimode", "r2", study::kModelR2),
                                   sweep, certify, jobs);
        expected = (2.0 * field.k + 3.0) / (field.k + 2.0);
    } else if (recipe == "cylinder") {
        FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                              ? field_from_config(cfg)
                              : study::cylinder_field();
        r = study::run_cylinder_sweep(field, cfg.get_int_or("quasimode", "j", 1), sweep,
                                      certify, jobs);
        expected = (2.0 * field.k + 2.0) / (field.k + 2.0);
    } else {
        throw ConfigError(cfg.origin() + ":" + std::to_string(cfg.line_of("quasimode", "recipe")) +
                          ": unknown recipe '" + recipe + "'");
    }
    write_csv(sweep_csv(r), (out / "residuals.csv").string());
    bool all_cert = true;
    for (const auto& row : r.rows) all_cert = all_cert && (!certify || row.certified);
    result["recipe"] = recipe;
    result["fit"] = fit_json(r.fit);
    result["expected_exponent"] = expected;
    result["slope_meets_bound"] = r.fit.slope >= expected - 0.1;
    result["all_certified"] = all_cert;
}

void run_supercell(const Config& cfg, const fs::path& out, ordered_json& result, int jobs) {
    FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                          ? field_from_config(cfg)
                          : study::pointwell_field();
    const std::vector<double> sweep = sweep_from_config(cfg);
    const double eps0 = cfg.get_double_or("window", "eps0", study::kEps0Weyl);
    const double eps2 = cfg.get_double_or("window", "eps2", study::kEps2Well);

    // window counts on the Dirichlet well operator H_D
    std::vector<Spectrum> well(sweep.size());
    parallel_for(static_cast<int>(sweep.size()), jobs, [&](int i) {
        // slightly enlarged solve window so the count certificate is strict
        well[i] = study::well_spectrum_below(field, sweep[i], 1.05 * sweep[i] * eps0, eps2);
    });
    const auto rows = weyl_count(well, sweep, [eps0](double h) { return h * eps0; });

    CsvTable t;
    t.columns = {"h", "threshold", "count", "count_h2"};
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& r : rows) {
        t.rows.push_back({format_double(r.h), format_double(r.threshold),
                          std::to_string(r.count), format_double(r.normalized)});
        if (r.count > 0) {
            lo = std::min(lo, r.normalized);
            hi = std::max(hi, r.normalized);
        }
    }
    write_csv(t, (out / "weyl.csv").string());
    for (size_t i = 0; i < sweep.size(); ++i)
        write_csv(spectrum_csv(well[i]),
                  (out / ("well_spectrum_" + std::to_string(i) + ".csv")).string());
    result["eps0"] = eps0;
    result["eps2"] = eps2;
    result["normalized_min"] = lo;
    result["normalized_max"] = hi;
    result["variation_factor"] = hi > 0 ? hi / lo : 0.0;
    result["bounded_by_3"] = hi > 0 && hi / lo <= 3.0;
}

void run_gaps(const Config& cfg, const fs::path& out, ordered_json& result, int jobs) {
    FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                          ? field_from_config(cfg)
                          : study::pointwell_field();
    const double h = cfg.get_double_or("gaps", "h", 0.01);
    const ModelReference ref = model_reference(field, reference_path(cfg));
    if (ref.lambda.size() < 4) throw ConfigError("model reference has fewer than 4 levels");
    const double pw = (2.0 * field.k + 2.0) / (field.k + 2.0);
    const double C = 0.5 * (ref.lambda[2] + ref.lambda[3]);
    const double top = C * std::pow(h, pw);

    const Spectrum sc = study::supercell_spectrum_below(field, h, top);
    double disc = 0;
    for (double e : sc.discretization_error) disc = std::max(disc, e);
    const double delta = std::max(3 * disc, 1e-12);
    const GapReport rep = locate_gaps(sc, {0.0, top}, delta);

    // quasimodes certified against the same supercell operator
    const GaugeField gauge = landau_gauge(field);
    const Grid sgrid = study::supercell_grid(field, h, study::kSupercells, 0);
    const DiscreteOperator sop = assemble(field, gauge, sgrid, h);
    const int jmax = cfg.get_int_or("gaps", "quasimodes", 4);
    std::vector<Quasimode> qs(jmax);
    parallel_for(jmax, jobs, [&](int i) {
        ModelRescaledOptions mo;
        mo.cut.r1 = cfg.get_double_or("quasimode", "r1", study::kModelR1);
        mo.cut.r2 = cfg.get_double_or("quasimode", "r2", study::kModelR2);
        qs[i] = model_rescaled_quasimode(field, gauge, sop, h, i + 1, ref, mo);
    });
    const int nq = count_gaps_from_quasimodes(qs, {0.0, top});

    // predicted windows free of supercell eigenvalues
    const double safety = cfg.get_double_or("gaps", "safety", 0.25);
    std::vector<double> lam(ref.lambda.begin(),
                            ref.lambda.begin() + std::min<size_t>(ref.lambda.size(), 4));
    const auto windows = predict_gap_windows(lam, field.k, h, safety);
    int violations = 0;
    for (const auto& w : windows)
        for (double v : sc.eigenvalues)
            if (v > w.lo && v < w.hi) ++violations;

    CsvTable t;
    t.columns = {"gap_lo", "gap_hi", "length", "core_lo", "core_hi"};
    for (size_t i = 0; i < rep.gaps.size(); ++i)
        t.rows.push_back({format_double(rep.gaps[i].lo), format_double(rep.gaps[i].hi),
                          format_double(rep.gaps[i].length()),
                          format_double(rep.gap_cores[i].lo),
                          format_double(rep.gap_cores[i].hi)});
    write_csv(t, (out / "gaps.csv").string());
    write_csv(spectrum_csv(sc), (out / "supercell_spectrum.csv").string());

    result["h"] = h;
    result["window_top"] = top;
    result["delta"] = delta;
    result["interior_gap_count"] = rep.count;
    ordered_json jg = ordered_json::array();
    for (const auto& g : rep.gaps) jg.push_back({{"lo", g.lo}, {"hi", g.hi}});
    result["gaps"] = jg;
    result["quasimode_gap_lower_bound"] = nq;
    ordered_json jw = ordered_json::array();
    for (const auto& w : windows) jw.push_back({{"lo", w.lo}, {"hi", w.hi}});
    result["predicted_windows"] = jw;
    result["predicted_window_violations"] = violations;
}

void run_localization(const Config& cfg, const fs::path& out, ordered_json& result,
                      int jobs) {
    FieldSpec field = cfg.has("field", "preset") || cfg.has("field", "family")
                          ? field_from_config(cfg)
                          : study::pointwell_field();
    const std::vector<double> sweep = sweep_from_config(cfg);
    const double eps1 = cfg.get_double_or("window", "eps1", study::kEps1Loc);
    const double eps2 = cfg.get_double_or("window", "eps2", study::kEps2Well);
    std::vector<Spectrum> full(sweep.size()), well(sweep.size());
    parallel_for(static_cast<int>(sweep.size()), jobs, [&](int i) {
        full[i] = study::supercell_spectrum_below(field, sweep[i], 1.5 * sweep[i] * eps1);
        well[i] = study::well_spectrum_below(field, sweep[i], 1.5 * sweep[i] * eps1, eps2);
    });
    auto window = [eps1](double h) { return Interval{0.0, h * eps1}; };
    const LocalizationReport rep = localization_check(
        full, well, window, sweep, study::kSupercells * study::kSupercells);

    CsvTable t;
    t.columns = {"h", "distance", "floor", "floor_limited"};
    for (const auto& r : rep.rows)
        t.rows.push_back({format_double(r.h), format_double(r.distance),
                          format_double(r.floor), r.floor_limited ? "1" : "0"});
    write_csv(t, (out / "localization.csv").string());
    result["eps1"] = eps1;
    result["eps2"] = eps2;
    result["monotone"] = rep.monotone;
    result["exp_r2"] = rep.exp_r2;
    result["exp_c"] = rep.exp_c;
    result["pow_r2"] = rep.pow_r2;
    result["pow_p"] = rep.pow_p;
    result["h3_r2"] = rep.h3_r2;
    result["exponential_preferred"] = rep.exponential_preferred;
    bool all_floor = true;
    for (const auto& r : rep.rows) all_floor = all_floor && r.floor_limited;
    result["floor_limited"] = all_floor;
}

} // namespace

int run_experiment(const Config& cfg, const std::string& out_dir, int jobs) {
    ordered_json manifest;
    RunLog log;
    const std::string kind = cfg.get_or("experiment", "kind", "");
    fs::path out(out_dir);
    try {
        if (kind.empty())
            throw ConfigError(cfg.origin() + ": missing [experiment] kind");
        fs::create_directories(out);
        manifest["experiment"] = kind;
        manifest["version"] = kVersion;
        manifest["config_hash"] = cfg.hash();
        manifest["jobs"] = jobs;

        ordered_json result;
        if (kind == "verify-identities")
            run_verify_identities(cfg, out, result);
        else if (kind == "bands")
            run_bands(cfg, out, result);
        else if (kind == "model2d")
            run_model2d(cfg, out, result, jobs);
        else if (kind == "quasimode")
            run_quasimode(cfg, out, result, jobs);
        else if (kind == "supercell")
            run_supercell(cfg, out, result, jobs);
        else if (kind == "gaps")
            run_gaps(cfg, out, result, jobs);
        else if (kind == "localization")
            run_localization(cfg, out, result, jobs);
        else
            throw ConfigError(cfg.origin() + ":" +
                              std::to_string(cfg.line_of("experiment", "kind")) +
                              ": unknown experiment '" + kind + "'");
        log.mark(kind);
        manifest["status"] = "ok";
        write_text(result.dump(2) + "\n", (out / "result.json").string());
        write_text(cfg.normalized(), (out / "config.normalized").string());
        write_text(manifest.dump(2) + "\n", (out / "manifest.json").string());
        {
            std::ostringstream os;
            for (auto& [what, sec] : log.timings) os << what << " " << sec << "s\n";
            write_text(os.str(), (out / "run_log.txt").string());
        }
        return 0;
    } catch (const ConfigError& e) {
        fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        fprintf(stderr, "solver error: %s\n", e.what());
        manifest["status"] = "solver-error";
        manifest["error"] = e.what();
        std::error_code ec;
        fs::create_directories(out, ec);
        if (!ec) write_text(manifest.dump(2) + "\n", (out / "manifest.json").string());
        return 3;
    }
}

} // namespace specgap

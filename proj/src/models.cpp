#include "specgap/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "specgap/errors.hpp"

namespace specgap {

namespace {
constexpr double kPi = std::numbers::pi;

double kfactorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}
} // namespace

BandFunctionTable montgomery_bands(int k, const std::vector<double>& b_grid, int J,
                                   const BandOptions& opts) {
    if (J > 12) throw ConfigError("montgomery_bands: J must be <= 12");
    if (!std::is_sorted(b_grid.begin(), b_grid.end()))
        throw ConfigError("montgomery_bands: b_grid must be sorted");
    double bmax = 0;
    for (double b : b_grid) bmax = std::max(bmax, std::abs(b));
    const double Y = montgomery_truncation_halfwidth(k, bmax);
    const int n0 = opts.richardson_base_n > 0
                       ? opts.richardson_base_n
                       : static_cast<int>(std::ceil(2 * Y / opts.dx_factor));
    SolveOptions so = opts.solve;
    so.force_iterative = true;  // tridiagonal factorizations make this cheap
    so.want_vectors = true;

    std::vector<Spectrum> spectra;
    spectra.reserve(b_grid.size());
    for (double b : b_grid) {
        auto builder = [&](int level) {
            const int n = level == 0 ? n0 : 2 * n0 + 1;
            return assemble_montgomery_1d(1.0, b, k, Grid::dirichlet_1d(-Y, Y, n));
        };
        Spectrum s = richardson_refine(builder, J, so);
        // truncation guard: lowest eigenfunction mass at the outermost nodes
        const Eigen::VectorXcd v = s.eigenvectors.col(0);
        const double edge = std::norm(v[0]) + std::norm(v[v.size() - 1]);
        if (edge > 1e-8)
            throw TruncationTooSmall("boundary mass " + std::to_string(edge) +
                                     " at b = " + std::to_string(b));
        spectra.push_back(std::move(s));
    }
    BandFunctionTable t = track_bands(spectra, b_grid);
    t.k = k;
    return t;
}

double dilation_check(int k, double h, double beta, double alpha, const Grid& grid) {
    const DiscreteOperator lhs = assemble_montgomery_1d(h, beta, k, grid);
    Grid scaled = grid;
    scaled.x0 = alpha * grid.x0;
    scaled.dx = alpha * grid.dx;
    const DiscreteOperator rhs = assemble_montgomery_1d(
        std::pow(alpha, k + 2) * h, std::pow(alpha, k + 1) * beta, k, scaled);
    const double factor = std::pow(alpha, -(2.0 * k + 2.0));
    double worst = 0, scale = 0;
    for (int c = 0; c < lhs.M.outerSize(); ++c) {
        SpMat::InnerIterator a(lhs.M, c), b(rhs.M, c);
        for (; a && b; ++a, ++b) {
            worst = std::max(worst, std::abs(a.value() - factor * b.value()));
            scale = std::max(scale, std::abs(a.value()));
        }
    }
    return worst / scale;
}

MomentumChoice select_p(double h, const MontgomeryParams& params, double b1, double b2) {
    if (!(b1 < b2)) throw ConfigError("select_p: need b1 < b2");
    const double ex = (params.k + 1.0) / (params.k + 2.0);
    const double lo = params.L / (2 * kPi) * (params.alpha1 / h + b1 * std::pow(h, -1.0 / (params.k + 2)));
    const double hi = params.L / (2 * kPi) * (params.alpha1 / h + b2 * std::pow(h, -1.0 / (params.k + 2)));
    const double pfirst = std::floor(lo) + 1; // smallest integer strictly above lo
    if (!(pfirst < hi)) {
        // width 1 needs L (b2 - b1) h^{-1/(k+2)} / (2 pi) >= 1
        const double h_ok = std::pow(params.L * (b2 - b1) / (2 * kPi), params.k + 2.0);
        throw NoAdmissibleInteger(
            "no integer momentum in (" + std::to_string(lo) + ", " + std::to_string(hi) +
            "); the interval reaches unit width at h <= " + std::to_string(h_ok));
    }
    MomentumChoice c;
    c.p = static_cast<int>(pfirst);
    c.beta = 2 * kPi * h * c.p / params.L - params.alpha1;
    c.achieved_b = std::pow(h, -ex) * c.beta;
    return c;
}

namespace {

GaugeField cylinder_paper_gauge(double alpha1,
                                const std::function<double(double)>& B_of_y) {
    GaugeField g;
    g.a1 = [alpha1, B_of_y](double, double y) { return alpha1 + B_of_y(y); };
    g.a2 = [](double, double) { return 0.0; };
    g.tag = GaugeTag::CylinderPaper;
    return g;
}

} // namespace

DiscreteOperator cylinder_operator(const MontgomeryParams& params, const Grid& grid) {
    if (grid.boundary != Boundary::PeriodicX_DirichletY)
        throw ConfigError("cylinder_operator: PeriodicX_DirichletY grid required");
    const double kf = kfactorial(params.k + 1);
    const double b1 = params.beta1;
    const int k = params.k;
    auto B = [b1, k, kf](double y) { return b1 * std::pow(y, k + 1) / kf; };
    FieldSpec meta = make_cylinder_model_field(grid.x_extent(), b1, k, grid.y_extent() / 2);
    AssembleOptions ao;
    ao.k_for_rule = k;
    DiscreteOperator op =
        assemble(meta, cylinder_paper_gauge(params.alpha1, B), grid, params.h, ao);
    op.tag = OperatorTag::Cylinder;
    return op;
}

DiscreteOperator cylinder_operator_full(const FieldSpec& field, double alpha1,
                                        double h, const Grid& grid) {
    if (field.kind != FieldKind::LineWellCylinder)
        throw ConfigError("cylinder_operator_full: LineWellCylinder field required");
    std::function<double(double)> B = field.cyl_B;
    if (!B) {
        auto b = field.b;
        B = [b](double y) {
            return adaptive_integral([&](double t) { return b(0.0, t); }, 0.0, y);
        };
    }
    AssembleOptions ao;
    ao.k_for_rule = field.k;
    DiscreteOperator op = assemble(field, cylinder_paper_gauge(alpha1, B), grid, h, ao);
    op.tag = OperatorTag::Cylinder;
    return op;
}

Grid model_grid(const FieldSpec& poly_field, double h, double box_widths,
                double pts_per_width) {
    double beta_scale = 0;
    for (const auto& t : poly_field.model_poly) beta_scale += std::abs(t.c);
    if (beta_scale == 0) beta_scale = 1;
    const int k = poly_field.k;
    const double w = std::pow(h / beta_scale, 1.0 / (k + 2));
    const double half = box_widths * w;
    const int n = static_cast<int>(std::ceil(2 * half / (w / pts_per_width)));
    return Grid::dirichlet_rect({-half, half, -half, half}, n, n);
}

DiscreteOperator model_operator_2d(const FieldSpec& poly_field, double h,
                                   const Grid& grid) {
    if (poly_field.kind == FieldKind::LineWellCylinder)
        throw ConfigError("model_operator_2d: plane field required");
    FieldSpec poly = poly_field.kind == FieldKind::PolynomialModel
                         ? poly_field
                         : make_poly_field(poly_field.k, poly_field.model_poly);
    AssembleOptions ao;
    ao.k_for_rule = poly.k;
    DiscreteOperator op = assemble(poly, landau_gauge(poly), grid, h, ao);
    op.tag = OperatorTag::Model2D;
    return op;
}

// ---------------------------------------------------------------------------

std::string model_field_key(const FieldSpec& field) {
    std::ostringstream os;
    os << "k" << field.k;
    for (const auto& t : field.model_poly) {
        os.precision(17);
        os << "|" << t.i << "," << t.j << "," << t.c;
    }
    return os.str();
}

ModelReference compute_model_reference(const FieldSpec& field, int m) {
    FieldSpec poly = field.kind == FieldKind::PolynomialModel
                         ? field
                         : make_poly_field(field.k, field.model_poly);
    ModelReference ref;
    ref.k = poly.k;
    ref.field_key = model_field_key(poly);
    SolveOptions so;
    so.force_iterative = true;
    so.want_vectors = false;
    const Grid g0 = model_grid(poly, 1.0, 10.0, 12.0);
    auto builder = [&](int level) {
        Grid g = g0;
        if (level == 1) {
            // exact dyadic refinement of the same box
            g.nx = 2 * g0.nx + 1;
            g.ny = 2 * g0.ny + 1;
            g.dx = g0.dx / 2;
            g.dy = g0.dy / 2;
        }
        return model_operator_2d(poly, 1.0, g);
    };
    Spectrum s = richardson_refine(builder, m, so);
    ref.raw = s.eigenvalues;
    // distinct eigenvalues: cluster within 3x the Richardson estimate
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        const double tol = 3 * s.discretization_error[i] + 1e-10 * std::abs(s.eigenvalues[i]);
        if (ref.lambda.empty() || s.eigenvalues[i] - ref.lambda.back() > tol) {
            ref.lambda.push_back(s.eigenvalues[i]);
            ref.lambda_error.push_back(s.discretization_error[i]);
        }
    }
    return ref;
}

ModelReference model_reference(const FieldSpec& field, const std::string& path, int m) {
    const std::string key = model_field_key(
        field.kind == FieldKind::PolynomialModel
            ? field
            : make_poly_field(field.k, field.model_poly));
    {
        std::ifstream in(path);
        if (in) {
            nlohmann::json j;
            in >> j;
            if (j.value("version", 0) == 1 && j.value("field_key", "") == key &&
                static_cast<int>(j["lambda"].size()) >= std::min(m, 6)) {
                ModelReference ref;
                ref.k = j["k"].get<int>();
                ref.field_key = key;
                ref.lambda = j["lambda"].get<std::vector<double>>();
                ref.lambda_error = j["lambda_error"].get<std::vector<double>>();
                ref.raw = j["raw"].get<std::vector<double>>();
                return ref;
            }
        }
    }
    ModelReference ref = compute_model_reference(field, m);
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["field_key"] = ref.field_key;
    j["k"] = ref.k;
    j["lambda"] = ref.lambda;
    j["lambda_error"] = ref.lambda_error;
    j["raw"] = ref.raw;
    std::ofstream out(path);
    if (out) out << j.dump(2) << '\n';
    return ref;
}

} // namespace specgap

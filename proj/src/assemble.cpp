#include "specgap/operator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1].
struct QuadRule {
    std::vector<double> x, w;
};

QuadRule gauss_rule(int n) {
    QuadRule q;
    switch (n) {
        case 1:
            q.x = {0.0};
            q.w = {2.0};
            break;
        case 2: {
            const double a = 1.0 / std::sqrt(3.0);
            q.x = {-a, a};
            q.w = {1.0, 1.0};
            break;
        }
        case 3: {
            const double a = std::sqrt(3.0 / 5.0);
            q.x = {-a, 0.0, a};
            q.w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            break;
        }
        default: {
            // 5-point rule: exact for polynomials through degree 9.
            const double x1 = 0.5384693101056831, x2 = 0.9061798459386640;
            const double w0 = 0.5688888888888889, w1 = 0.4786286704993665,
                         w2 = 0.2369268850561891;
            q.x = {-x2, -x1, 0.0, x1, x2};
            q.w = {w2, w1, w0, w1, w2};
            break;
        }
    }
    return q;
}

// int_p^q A.dl along the straight axis-aligned link, by Gauss quadrature.
double link_integral(const GaugeField& g, double xa, double ya, double xb,
                     double yb, const QuadRule& q) {
    const double mx = 0.5 * (xa + xb), my = 0.5 * (ya + yb);
    const double hx = 0.5 * (xb - xa), hy = 0.5 * (yb - ya);
    double s = 0;
    for (size_t i = 0; i < q.x.size(); ++i) {
        const double x = mx + hx * q.x[i], y = my + hy * q.x[i];
        if (hx != 0) s += q.w[i] * g.a1(x, y) * hx;
        if (hy != 0) s += q.w[i] * g.a2(x, y) * hy;
    }
    return s;
}

void resolution_check(const Grid& grid, double h, int k, bool enforce,
                      bool* warning) {
    const double delta = grid.dim == 2 ? std::max(grid.dx, grid.dy) : grid.dx;
    const double limit = std::pow(h, 1.0 / (k + 2));
    if (enforce && delta > limit)
        throw GridTooCoarse("grid step " + std::to_string(delta) +
                            " exceeds h^{1/(k+2)} = " + std::to_string(limit));
    *warning = delta > limit / 8;
}

} // namespace

DiscreteOperator assemble(const FieldSpec& field, const GaugeField& gauge,
                          const Grid& grid, double h, const AssembleOptions& opts) {
    GridMask all;
    all.inside.assign(grid.n_total(), 1);
    return assemble_masked(field, gauge, grid, all, h, opts);
}

DiscreteOperator assemble_masked(const FieldSpec& field, const GaugeField& gauge,
                                 const Grid& grid, const GridMask& mask, double h,
                                 const AssembleOptions& opts) {
    if (h <= 0) throw ConfigError("assemble: h must be positive");
    DiscreteOperator op;
    op.h = h;
    op.grid = grid;
    op.gauge = gauge.tag;
    const int k = opts.k_for_rule >= 0 ? opts.k_for_rule : field.k;
    resolution_check(grid, h, k, opts.enforce_rule, &op.grid_warning);

    // compact numbering of masked nodes
    std::vector<int> id(grid.n_total(), -1);
    std::vector<int> map;
    for (int q = 0; q < grid.n_total(); ++q)
        if (mask.inside[q]) {
            id[q] = static_cast<int>(map.size());
            map.push_back(q);
        }
    const int n = static_cast<int>(map.size());
    if (n == 0) throw ConfigError("assemble: empty domain");

    const QuadRule quad = gauss_rule(opts.quad_points);
    const bool periodic = grid.boundary == Boundary::PeriodicX_DirichletY;
    const double tx = h * h / (grid.dx * grid.dx);
    const double ty = grid.dim == 2 ? h * h / (grid.dy * grid.dy) : 0.0;
    const double diag = grid.dim == 2 ? 2 * tx + 2 * ty : 2 * tx;

    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<size_t>(n) * 5);
    for (int q = 0; q < grid.n_total(); ++q) {
        if (!mask.inside[q]) continue;
        const int i = q % grid.nx, j = q / grid.nx;
        const int row = id[q];
        trip.emplace_back(row, row, cd(diag, 0));
        // +x link (each undirected link emitted once, with its conjugate)
        {
            int ii = i + 1;
            bool wrap = false;
            if (ii == grid.nx && periodic) {
                ii = 0;
                wrap = true;
            }
            if (ii < grid.nx) {
                const int qn = grid.index(ii, j);
                if (mask.inside[qn] && !(wrap && grid.nx == 1)) {
                    const double xa = grid.x_of(i);
                    const double xb = wrap ? grid.x_of(i) + grid.dx : grid.x_of(ii);
                    const double y = grid.dim == 2 ? grid.y_of(j) : 0.0;
                    const double theta = link_integral(gauge, xa, y, xb, y, quad) / h;
                    const cd hop = -tx * std::exp(cd(0, -theta));
                    trip.emplace_back(row, id[qn], hop);
                    trip.emplace_back(id[qn], row, std::conj(hop));
                }
            }
        }
        // +y link
        if (grid.dim == 2 && j + 1 < grid.ny) {
            const int qn = grid.index(i, j + 1);
            if (mask.inside[qn]) {
                const double x = grid.x_of(i);
                const double theta =
                    link_integral(gauge, x, grid.y_of(j), x, grid.y_of(j + 1), quad) / h;
                const cd hop = -ty * std::exp(cd(0, -theta));
                trip.emplace_back(row, id[qn], hop);
                trip.emplace_back(id[qn], row, std::conj(hop));
            }
        }
    }
    op.M.resize(n, n);
    op.M.setFromTriplets(trip.begin(), trip.end());
    op.M.makeCompressed();
    op.scale = diag;
    if (mask.count() != grid.n_total()) {
        op.mask_map = map;
        op.tag = OperatorTag::DirichletWell;
    }
    return op;
}

DiscreteOperator assemble_montgomery_1d(double h, double beta, int k, const Grid& grid) {
    if (grid.dim != 1) throw ConfigError("assemble_montgomery_1d: 1D grid required");
    DiscreteOperator op;
    op.h = h;
    op.grid = grid;
    op.tag = OperatorTag::Montgomery1D;
    double kfact = 1;
    for (int i = 2; i <= k + 1; ++i) kfact *= i;
    const int n = grid.nx;
    const double t = h * h / (grid.dx * grid.dx);
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<size_t>(n) * 3);
    double vmax = 0;
    for (int i = 0; i < n; ++i) {
        const double y = grid.x_of(i);
        const double w = beta - std::pow(y, k + 1) / kfact;
        const double v = w * w;
        vmax = std::max(vmax, v);
        trip.emplace_back(i, i, cd(2 * t + v, 0));
        if (i + 1 < n) {
            trip.emplace_back(i, i + 1, cd(-t, 0));
            trip.emplace_back(i + 1, i, cd(-t, 0));
        }
    }
    op.M.resize(n, n);
    op.M.setFromTriplets(trip.begin(), trip.end());
    op.M.makeCompressed();
    op.scale = 2 * t + vmax;
    return op;
}

DiscreteOperator assemble_cylinder_fiber(double h, int p, double L, double dx,
                                         const std::function<double(double)>& a1_of_y,
                                         const Grid& ygrid) {
    if (ygrid.dim != 1) throw ConfigError("assemble_cylinder_fiber: 1D grid required");
    DiscreteOperator op;
    op.h = h;
    op.grid = ygrid;
    op.tag = OperatorTag::Fiber1D;
    const int n = ygrid.nx;
    const double t = h * h / (ygrid.dx * ygrid.dx);
    const double kx = 2 * 3.14159265358979323846 * p / L;
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<size_t>(n) * 3);
    double vmax = 0;
    for (int i = 0; i < n; ++i) {
        const double y = ygrid.x_of(i);
        const double s = std::sin(0.5 * dx / h * (h * kx - a1_of_y(y)));
        const double v = 4 * h * h / (dx * dx) * s * s;
        vmax = std::max(vmax, v);
        trip.emplace_back(i, i, cd(2 * t + v, 0));
        if (i + 1 < n) {
            trip.emplace_back(i, i + 1, cd(-t, 0));
            trip.emplace_back(i + 1, i, cd(-t, 0));
        }
    }
    op.M.resize(n, n);
    op.M.setFromTriplets(trip.begin(), trip.end());
    op.M.makeCompressed();
    op.scale = 2 * t + vmax;
    return op;
}

double montgomery_truncation_halfwidth(int k, double beta_max) {
    double kfact = 1;
    for (int i = 2; i <= k + 1; ++i) kfact *= i;
    return 2 * std::pow(kfact * (std::abs(beta_max) + 10.0), 1.0 / (k + 1));
}

void export_triplets(const DiscreteOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out.precision(17);
    for (int c = 0; c < op.M.outerSize(); ++c)
        for (SpMat::InnerIterator it(op.M, c); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
                << it.value().imag() << '\n';
}

SpMat import_triplets(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<Eigen::Triplet<cd>> trip;
    int r, c;
    double re, im;
    while (in >> r >> c >> re >> im) trip.emplace_back(r, c, cd(re, im));
    SpMat m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

} // namespace specgap

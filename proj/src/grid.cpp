#include "specgap/grid.hpp"

#include <cmath>

namespace specgap {

Grid Grid::dirichlet_1d(double a, double b, int n_interior) {
    Grid g;
    g.dim = 1;
    g.boundary = Boundary::Dirichlet;
    g.x0 = a;
    g.nx = n_interior;
    g.ny = 1;
    g.dx = (b - a) / (n_interior + 1);
    g.dy = g.dx;
    return g;
}

Grid Grid::dirichlet_rect(const Rect& r, int nx_interior, int ny_interior) {
    Grid g;
    g.dim = 2;
    g.boundary = Boundary::Dirichlet;
    g.x0 = r.x0;
    g.y0 = r.y0;
    g.nx = nx_interior;
    g.ny = ny_interior;
    g.dx = r.width() / (nx_interior + 1);
    g.dy = r.height() / (ny_interior + 1);
    return g;
}

Grid Grid::cylinder(double L, int nx, double y_a, double y_b, int ny_interior) {
    Grid g;
    g.dim = 2;
    g.boundary = Boundary::PeriodicX_DirichletY;
    g.x0 = 0;
    g.y0 = y_a;
    g.nx = nx;
    g.ny = ny_interior;
    g.dx = L / nx;
    g.dy = (y_b - y_a) / (ny_interior + 1);
    return g;
}

int GridMask::count() const {
    int c = 0;
    for (auto v : inside) c += v != 0;
    return c;
}

GridMask sublevel_mask(const FieldSpec& field, const Grid& grid, double b0, double eps) {
    GridMask m;
    m.inside.assign(grid.n_total(), 0);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double v = std::abs(field.b(grid.x_of(i), grid.y_of(j)));
            m.inside[grid.index(i, j)] = v < b0 + eps ? 1 : 0;
        }
    return m;
}

} // namespace specgap

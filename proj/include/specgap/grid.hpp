#pragma once

#include <cstdint>
#include <vector>

#include "specgap/field.hpp"

namespace specgap {

enum class Boundary { Dirichlet, PeriodicX_DirichletY };

// Uniform tensor grid of unknowns. For Dirichlet axes the stored nodes are
// strictly interior: x_i = x0 + (i+1)*dx, i = 0..nx-1, with the walls at x0
// and x0 + (nx+1)*dx. For the periodic axis the nodes are x_i = x0 + i*dx,
// i = 0..nx-1, and dx = L/nx exactly.
struct Grid {
    int dim = 1;
    Boundary boundary = Boundary::Dirichlet;
    double x0 = 0, y0 = 0;
    double dx = 0, dy = 0;
    int nx = 0, ny = 1;

    int n_total() const { return nx * ny; }
    int index(int i, int j) const { return i + nx * j; }

    double x_of(int i) const {
        return boundary == Boundary::PeriodicX_DirichletY ? x0 + i * dx
                                                          : x0 + (i + 1) * dx;
    }
    double y_of(int j) const { return y0 + (j + 1) * dy; }

    // extent of the x axis including walls (Dirichlet) or the period (periodic)
    double x_extent() const {
        return boundary == Boundary::PeriodicX_DirichletY ? nx * dx : (nx + 1) * dx;
    }
    double y_extent() const { return (ny + 1) * dy; }

    static Grid dirichlet_1d(double a, double b, int n_interior);
    static Grid dirichlet_rect(const Rect& r, int nx_interior, int ny_interior);
    // Cylinder S^1_L x (y_a, y_b): periodic in x with nx nodes, Dirichlet in y.
    static Grid cylinder(double L, int nx, double y_a, double y_b, int ny_interior);
};

// Subset of a parent grid's nodes (1 = inside). Used for Dirichlet
// realizations on sublevel-set domains.
struct GridMask {
    std::vector<std::uint8_t> inside; // size grid.n_total()
    int count() const;
};

// Mask of {trplus(field) < b0 + eps} nodes, the discrete U_eps.
GridMask sublevel_mask(const FieldSpec& field, const Grid& grid, double b0, double eps);

} // namespace specgap

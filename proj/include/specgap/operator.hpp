#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "specgap/gauge.hpp"
#include "specgap/grid.hpp"

namespace specgap {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd>;

enum class OperatorTag {
    FullH,          // H^h on a rectangle or supercell, Dirichlet
    DirichletWell,  // H^h_D on a masked sublevel domain
    Cylinder,       // H^{h,0} and its full-field variants
    Model2D,        // K^h at a point zero
    Montgomery1D,   // H(h,beta) on an interval
    Fiber1D,        // momentum-sector fiber of a discrete cylinder operator
};

// Sparse complex-Hermitian discretization of a magnetic Schrodinger operator.
// Assembly inserts every off-diagonal link together with its exact conjugate,
// so M == M^dagger holds entrywise; the operator is D^dagger D over links and
// therefore positive semidefinite.
struct DiscreteOperator {
    SpMat M;
    double h = 0;
    Grid grid;
    GaugeTag gauge = GaugeTag::Landau;
    OperatorTag tag = OperatorTag::FullH;
    double scale = 0;             // max diagonal magnitude, used for tolerances
    bool grid_warning = false;    // resolution rule Delta <= h^{1/(k+2)}/8 violated
    // For masked (sublevel) domains: unknown -> parent grid node.
    std::optional<std::vector<int>> mask_map;

    int n() const { return static_cast<int>(M.rows()); }
};

struct AssembleOptions {
    int quad_points = 5;   // Gauss-Legendre points per link integral
    int k_for_rule = -1;   // vanishing order for the resolution rule; -1: from field
    bool enforce_rule = true;
};

// Gauge-covariant 5-point (2D) / 3-point (1D) Peierls stencil for
// H^h = (ih d + A)^*(ih d + A) on a flat rectangle or cylinder. Hopping
// p -> q carries exp(-(i/h) int_p^q A.dl); the link integral uses fixed
// Gauss-Legendre quadrature, which is exact for polynomial gauges (so gauge
// shifts by polynomial grad(phi) act as exact diagonal unitaries). Hard
// error GridTooCoarse when Delta > h^{1/(k+2)}.
DiscreteOperator assemble(const FieldSpec& field, const GaugeField& gauge,
                          const Grid& grid, double h,
                          const AssembleOptions& opts = {});

// Same stencil restricted to the masked nodes (Dirichlet outside the mask):
// the paper's H^h_D on D = closure of a sublevel set.
DiscreteOperator assemble_masked(const FieldSpec& field, const GaugeField& gauge,
                                 const Grid& grid, const GridMask& mask, double h,
                                 const AssembleOptions& opts = {});

// The 1D family H(h,beta) = -h^2 d^2/dy^2 + (beta - y^{k+1}/(k+1)!)^2 on a
// Dirichlet interval; 3-point kinetic stencil plus diagonal potential.
DiscreteOperator assemble_montgomery_1d(double h, double beta, int k, const Grid& grid);

// Exact momentum-p sector of a discrete cylinder operator with x-independent
// gauge A1(y) and x step dx: 3-point y-kinetic plus diagonal
// (4h^2/dx^2) sin^2( (dx/2h) (2 pi p h / L - A1(y)) ).
// As dx -> 0 this converges to -h^2 d^2/dy^2 + (2 pi p h/L - A1(y))^2.
DiscreteOperator assemble_cylinder_fiber(double h, int p, double L, double dx,
                                         const std::function<double(double)>& a1_of_y,
                                         const Grid& ygrid);

// Truncation rule for 1D Montgomery-type solves.
double montgomery_truncation_halfwidth(int k, double beta_max);

// Writes the sparse matrix as "row col re im" lines (upper triangle included
// explicitly; 0-based indices).
void export_triplets(const DiscreteOperator& op, const std::string& path);
// Reads the format back (for the round-trip test and external oracles).
SpMat import_triplets(const std::string& path, int n);

} // namespace specgap

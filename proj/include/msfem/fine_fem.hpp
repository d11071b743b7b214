#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "msfem/linalg.hpp"
#include "msfem/mesh.hpp"

namespace msfem {

using ScalarFunction = std::function<double(Point2)>;

namespace q1 {

using ElementMatrix = std::array<std::array<double, 4>, 4>;

/// Stiffness of a square Q1 cell (independent of the cell size in 2D).
/// Local node order matches CellBox: (0,0), (1,0), (0,1), (1,1).
constexpr ElementMatrix stiffness{{{2.0 / 3, -1.0 / 6, -1.0 / 6, -1.0 / 3},
                                   {-1.0 / 6, 2.0 / 3, -1.0 / 3, -1.0 / 6},
                                   {-1.0 / 6, -1.0 / 3, 2.0 / 3, -1.0 / 6},
                                   {-1.0 / 3, -1.0 / 6, -1.0 / 6, 2.0 / 3}}};

/// Mass of the unit square cell; multiply by h^2.
constexpr ElementMatrix mass{{{4.0 / 36, 2.0 / 36, 2.0 / 36, 1.0 / 36},
                              {2.0 / 36, 4.0 / 36, 1.0 / 36, 2.0 / 36},
                              {2.0 / 36, 1.0 / 36, 4.0 / 36, 2.0 / 36},
                              {1.0 / 36, 2.0 / 36, 2.0 / 36, 4.0 / 36}}};

/// Cell matrices computed by 2x2 Gauss quadrature on the reference square.
ElementMatrix gauss_stiffness();
ElementMatrix gauss_mass();

}  // namespace q1

/// Full (Neumann) penalized matrix  nu*K + sigma*h^2*M  on the nodes of a box.
CsrMatrix assemble_box(const FineGrid& grid, const CellBox& box, bool with_sigma = true);

/// M f, with f sampled at the nodes of the box (unweighted Q1 mass matrix).
std::vector<double> load_box(const FineGrid& grid, const CellBox& box, const ScalarFunction& f);

/// Penalized operator on the whole grid with the boundary nodes of the unit
/// square eliminated (homogeneous Dirichlet data).
struct PenalizedOperator {
  const FineGrid* grid = nullptr;
  CsrMatrix matrix;                // on free nodes
  std::vector<int> free_nodes;     // free index -> global node
  std::vector<int> node_to_free;   // global node -> free index or -1
};

PenalizedOperator assemble(const FineGrid& grid);

/// A reduced Dirichlet problem on a box: the nodes flagged in `fixed` carry
/// prescribed values, the others are unknowns.
class DirichletProblem {
 public:
  DirichletProblem(const CsrMatrix& full, std::vector<char> fixed);

  const CsrMatrix& reduced() const { return reduced_; }
  const std::vector<int>& free_nodes() const { return free_; }
  int size() const { return reduced_.size(); }

  /// Right-hand side on the free nodes for load `load` (full length, may be
  /// empty) and boundary data `data` (full length, only fixed entries read).
  std::vector<double> rhs(std::span<const double> load, std::span<const double> data) const;
  /// Scatter free values back into a full vector holding `data` on fixed nodes.
  std::vector<double> expand(std::span<const double> free_values, std::span<const double> data) const;

 private:
  CsrMatrix full_;
  std::vector<char> fixed_;
  std::vector<int> free_;
  CsrMatrix reduced_;
};

struct ReferenceOptions {
  InnerSolver solver = InnerSolver::Cg;
  double tol = 1e-10;
};

ScalarField solve_reference(const FineGrid& grid, const ScalarFunction& f,
                            const ReferenceOptions& opts = {});
ScalarField solve_reference(const PerforationSet& perf, const ScalarFunction& f, int m,
                            const ReferenceOptions& opts = {});

/// Periodic corrector on the unit cell: -div(nu grad w) + sigma w = 1 with
/// penalization inside the perforation.
struct CellProblemResult {
  ScalarField w;  // (m_cell+1)^2 nodes, last row/column duplicate the first
  int m_cell = 0;

  /// Periodic bilinear interpolation at a point of the unit cell.
  double value(Point2 y) const;
};

CellProblemResult solve_cell_problem(const PerforationSet& unit_perf, int m_cell,
                                     const ReferenceOptions& opts = {});

/// Nodal field eps^2 w(x/eps - shift) f(x).
ScalarField two_scale_reconstruction(const CellProblemResult& cell, double eps,
                                     const ScalarFunction& f, const FineGrid& grid,
                                     Vec2 shift = {});

/// CSV "x,y,value" over the grid nodes.
void write_field_csv(std::ostream& os, const ScalarField& field);

}  // namespace msfem

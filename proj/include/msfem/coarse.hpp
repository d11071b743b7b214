#pragma once

#include <iosfwd>
#include <vector>

#include "msfem/basis.hpp"
#include "msfem/fine_fem.hpp"
#include "msfem/linalg.hpp"

namespace msfem {

/// Galerkin system on the live DOFs of a basis set. The bilinear form is the
/// penalized fine form, nu K + sigma h^2 M, summed element by element.
struct CoarseSystem {
  const MsBasisSet* basis = nullptr;
  CsrMatrix matrix;
  std::vector<double> load;

  int size() const { return matrix.size(); }
};

CoarseSystem assemble_coarse(const MsBasisSet& basis, const ScalarFunction& f, int jobs = 1);

struct CoarseSolution {
  const MsBasisSet* basis = nullptr;
  std::vector<double> coefficients;  // by live DOF index
  /// u_H on each element box; neighbouring elements may disagree on shared
  /// nodes for nonconforming bases.
  std::vector<std::vector<double>> element_values;
  int iterations = 0;
  double relative_residual = 0.0;

  /// Nodal field, taking each node from the lowest-numbered element holding it.
  ScalarField to_field() const;
};

CoarseSolution solve_coarse(const CoarseSystem& sys, double tol = 1e-12);

/// Element-wise combination sum_i c_i b_i for arbitrary coefficients.
std::vector<std::vector<double>> combine(const MsBasisSet& basis, std::span<const double> coefficients);

int dof_count(const MsBasisSet& basis);

/// Blocks of "element_id,x,y,value", one line per node of every element.
void write_solution_csv(std::ostream& os, const CoarseSolution& sol);

}  // namespace msfem

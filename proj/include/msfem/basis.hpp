#pragma once

#include <string>
#include <utility>
#include <vector>

#include "msfem/fine_fem.hpp"
#include "msfem/linalg.hpp"
#include "msfem/mesh.hpp"

namespace msfem {

enum class Method { Q1, MsLin, MsOsc, MsOS, CR };

struct MethodSpec {
  Method method = Method::CR;
  bool bubbles = true;
  /// Oversampling ratio (patch side / H); only read for MsOS.
  double os_ratio = 3.0;

  /// "q1", "mslin", "msosc", "msos3", "cr".
  std::string name() const;
};

/// Parses a method name as produced by MethodSpec::name() ("msos" means ratio 3).
MethodSpec parse_method(const std::string& name, bool bubbles);

enum class DofKind { Edge, Node, Bubble };

struct Dof {
  DofKind kind = DofKind::Edge;
  int entity = -1;  // coarse edge, coarse node or element id
  bool live = true;
  int index = -1;   // position among live DOFs, -1 if dead
};

/// Restriction of one basis function to one element, on the element's box nodes.
struct LocalFunction {
  int dof = -1;  // position in MsBasisSet::dofs
  std::vector<double> values;
};

struct ElementBasis {
  CellBox box;
  std::vector<LocalFunction> functions;
  /// Oversampling recombination fell back to a pseudo-inverse.
  bool pinv_fallback = false;
};

struct MsBasisSet {
  MethodSpec spec;
  const CoarseMesh* mesh = nullptr;
  const FineGrid* grid = nullptr;
  std::vector<Dof> dofs;
  std::vector<ElementBasis> elements;
  int live_count = 0;

  int pinv_fallbacks() const;
};

struct BuildOptions {
  int jobs = 1;
  InnerSolver solver = InnerSolver::Cholesky;
  double cg_tol = 1e-10;
};

/// Trapezoid weights of the fine nodes on a coarse edge; they sum to |E|.
struct EdgeAverageRule {
  int edge = -1;
  std::vector<int> nodes;  // global fine node ids
  std::vector<double> weights;
};

EdgeAverageRule edge_average_rule(const FineGrid& grid, const CoarseMesh& mesh, int edge);

/// Same rule for local side s (0 bottom, 1 right, 2 top, 3 left) of a box,
/// as (local node, weight) pairs.
std::vector<std::pair<int, double>> side_rule(const CellBox& box, int side, double h);

/// Some fine cell of the box touching side s is unperforated.
bool side_live(const FineGrid& grid, const CellBox& box, int side);
/// The box has at least one unperforated cell.
bool box_live(const FineGrid& grid, const CellBox& box);

MsBasisSet build_cr_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles = true,
                          const BuildOptions& opts = {});
MsBasisSet build_q1_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles = false,
                          const BuildOptions& opts = {});
MsBasisSet build_mslin_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles = false,
                             const BuildOptions& opts = {});
MsBasisSet build_msosc_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles = false,
                             const BuildOptions& opts = {});
MsBasisSet build_msos_basis(const CoarseMesh& mesh, const FineGrid& grid, double ratio,
                            bool bubbles = false, const BuildOptions& opts = {});
MsBasisSet build_basis(const CoarseMesh& mesh, const FineGrid& grid, const MethodSpec& spec,
                       const BuildOptions& opts = {});

/// Zero-Dirichlet bubbles with unit load on every element, one field per
/// element (empty when the element is entirely perforated).
std::vector<std::vector<double>> build_variant_bubbles(const CoarseMesh& mesh, const FineGrid& grid,
                                                       const BuildOptions& opts = {});

/// Edge data of the oscillatory boundary condition on side s of a box:
/// 0 at the side's first node, 1 at its last, with slope proportional to
/// 1/nu. nu on a fine segment is the largest nu of the cells touching it.
std::vector<double> oscillatory_profile(const FineGrid& grid, const CellBox& box, int side);

}  // namespace msfem

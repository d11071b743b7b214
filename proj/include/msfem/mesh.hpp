#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "msfem/geometry.hpp"

namespace msfem {

/// Rectangle of fine cells [i0, i0+nx) x [j0, j0+ny). Nodes of the box are
/// numbered lexicographically, x fastest: local(i, j) = j*(nx+1) + i.
struct CellBox {
  int i0 = 0;
  int j0 = 0;
  int nx = 0;
  int ny = 0;

  int node_count() const { return (nx + 1) * (ny + 1); }
  int local_node(int i, int j) const { return j * (nx + 1) + i; }
  bool operator==(const CellBox&) const = default;
};

/// Uniform m x m grid of square Q1 cells over the unit square, carrying the
/// penalization coefficients of every cell.
class FineGrid {
 public:
  FineGrid() = default;

  int m() const { return m_; }
  double h() const { return h_; }
  int nodes_per_side() const { return m_ + 1; }
  int node_count() const { return (m_ + 1) * (m_ + 1); }
  int node(int i, int j) const { return j * (m_ + 1) + i; }
  Point2 node_point(int i, int j) const { return {i * h_, j * h_}; }

  int cell(int i, int j) const { return j * m_ + i; }
  double nu(int i, int j) const { return nu_[static_cast<std::size_t>(cell(i, j))]; }
  double sigma(int i, int j) const { return sigma_[static_cast<std::size_t>(cell(i, j))]; }
  bool perforated(int i, int j) const { return perforated_[static_cast<std::size_t>(cell(i, j))] != 0; }

  /// Perforation scale declared by the geometry (0 if none).
  double eps() const { return eps_; }
  const PerforationSet& perforations() const { return perf_; }
  CellBox full_box() const { return {0, 0, m_, m_}; }

  friend FineGrid build_fine(int m, const PerforationSet& perf, double penal_h);

 private:
  int m_ = 0;
  double h_ = 0.0;
  double eps_ = 0.0;
  PerforationSet perf_;
  std::vector<double> nu_;
  std::vector<double> sigma_;
  std::vector<std::uint8_t> perforated_;
};

/// nu = 1/penal_h, sigma = 1/penal_h^3 in perforated cells (tested at the
/// cell centre), nu = 1, sigma = 0 elsewhere.
FineGrid build_fine(int m, const PerforationSet& perf, double penal_h);
inline FineGrid build_fine(int m, const PerforationSet& perf) {
  return build_fine(m, perf, 1.0 / m);
}

/// Nodal Q1 field on a FineGrid (or on any (m+1)^2 node set).
struct ScalarField {
  int m = 0;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(int m_, double fill = 0.0)
      : m(m_), values(static_cast<std::size_t>((m_ + 1) * (m_ + 1)), fill) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(j * (m + 1) + i)]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j * (m + 1) + i)]; }
};

struct CoarseEdge {
  bool vertical = false;
  Point2 a;  // lower / left endpoint
  Point2 b;
  std::array<int, 2> elements{-1, -1};  // left/bottom, right/top; -1 on the boundary
  bool boundary() const { return elements[0] < 0 || elements[1] < 0; }
};

/// Local edge order of a quad: 0 bottom, 1 right, 2 top, 3 left.
/// Local corner order: 0 (x0,y0), 1 (x1,y0), 2 (x0,y1), 3 (x1,y1).
struct CoarseElement {
  int ix = 0;
  int iy = 0;
  std::array<int, 4> edges{};
  std::array<int, 4> nodes{};
};

class CoarseMesh {
 public:
  int n() const { return n_; }
  double H() const { return 1.0 / n_; }
  const std::vector<CoarseElement>& elements() const { return elements_; }
  const std::vector<CoarseEdge>& edges() const { return edges_; }
  int element_id(int ix, int iy) const { return iy * n_ + ix; }
  int node_id(int ix, int iy) const { return iy * (n_ + 1) + ix; }
  int node_count() const { return (n_ + 1) * (n_ + 1); }
  bool boundary_node(int node) const;
  Point2 node_point(int node) const;
  int internal_edge_count() const;
  /// Edge shared by two elements, or -1 if they are not neighbours.
  int shared_edge(int t1, int t2) const;

  friend CoarseMesh build_coarse(int n_per_side);

 private:
  int n_ = 0;
  std::vector<CoarseElement> elements_;
  std::vector<CoarseEdge> edges_;
};

CoarseMesh build_coarse(int n_per_side);

/// Fine cell box of coarse element t. Throws ConfigurationError unless the
/// grids are nested.
CellBox element_box(const FineGrid& grid, const CoarseMesh& mesh, int t);

/// Local-to-global fine node map of a box.
struct LocalIndexMap {
  CellBox box;
  std::vector<int> global_nodes;
};

LocalIndexMap restrict_to_box(const FineGrid& grid, const CellBox& box);
LocalIndexMap restrict_to_element(const FineGrid& grid, const CoarseMesh& mesh, int t);

}  // namespace msfem

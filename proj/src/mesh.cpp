#include "msfem/mesh.hpp"

#include <string>

namespace msfem {

FineGrid build_fine(int m, const PerforationSet& perf, double penal_h) {
  if (m < 1) throw ParameterError("build_fine: m must be >= 1");
  if (!(penal_h > 0.0)) throw ParameterError("build_fine: penalization length must be > 0");
  FineGrid g;
  g.m_ = m;
  g.h_ = 1.0 / m;
  g.eps_ = perf.period();
  g.perf_ = perf;
  const auto cells = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  g.nu_.assign(cells, 1.0);
  g.sigma_.assign(cells, 0.0);
  g.perforated_.assign(cells, 0);
  if (perf.empty()) return g;
  const double nu_in = 1.0 / penal_h;
  const double sigma_in = 1.0 / (penal_h * penal_h * penal_h);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const Point2 c{(i + 0.5) * g.h_, (j + 0.5) * g.h_};
      if (perf.contains(c)) {
        const auto k = static_cast<std::size_t>(g.cell(i, j));
        g.nu_[k] = nu_in;
        g.sigma_[k] = sigma_in;
        g.perforated_[k] = 1;
      }
    }
  }
  return g;
}

CoarseMesh build_coarse(int n) {
  if (n < 2) throw ParameterError("build_coarse: need at least 2 elements per side");
  CoarseMesh mesh;
  mesh.n_ = n;
  const double H = 1.0 / n;
  // Horizontal edges first: edge (ix, iy) spans [ix H, (ix+1) H] at y = iy H.
  const auto hedge = [n](int ix, int iy) { return iy * n + ix; };
  const int n_h = n * (n + 1);
  const auto vedge = [n, n_h](int ix, int iy) { return n_h + iy * (n + 1) + ix; };
  mesh.edges_.resize(static_cast<std::size_t>(2 * n * (n + 1)));
  for (int iy = 0; iy <= n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      CoarseEdge& e = mesh.edges_[static_cast<std::size_t>(hedge(ix, iy))];
      e.vertical = false;
      e.a = {ix * H, iy * H};
      e.b = {(ix + 1) * H, iy * H};
      e.elements = {iy > 0 ? (iy - 1) * n + ix : -1, iy < n ? iy * n + ix : -1};
    }
  }
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix <= n; ++ix) {
      CoarseEdge& e = mesh.edges_[static_cast<std::size_t>(vedge(ix, iy))];
      e.vertical = true;
      e.a = {ix * H, iy * H};
      e.b = {ix * H, (iy + 1) * H};
      e.elements = {ix > 0 ? iy * n + ix - 1 : -1, ix < n ? iy * n + ix : -1};
    }
  }
  mesh.elements_.resize(static_cast<std::size_t>(n * n));
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      CoarseElement& el = mesh.elements_[static_cast<std::size_t>(iy * n + ix)];
      el.ix = ix;
      el.iy = iy;
      el.edges = {hedge(ix, iy), vedge(ix + 1, iy), hedge(ix, iy + 1), vedge(ix, iy)};
      el.nodes = {mesh.node_id(ix, iy), mesh.node_id(ix + 1, iy), mesh.node_id(ix, iy + 1),
                  mesh.node_id(ix + 1, iy + 1)};
    }
  }
  return mesh;
}

bool CoarseMesh::boundary_node(int node) const {
  const int ix = node % (n_ + 1);
  const int iy = node / (n_ + 1);
  return ix == 0 || iy == 0 || ix == n_ || iy == n_;
}

Point2 CoarseMesh::node_point(int node) const {
  return {static_cast<double>(node % (n_ + 1)) / n_, static_cast<double>(node / (n_ + 1)) / n_};
}

int CoarseMesh::internal_edge_count() const {
  int count = 0;
  for (const auto& e : edges_) count += e.boundary() ? 0 : 1;
  return count;
}

int CoarseMesh::shared_edge(int t1, int t2) const {
  for (int e : elements_[static_cast<std::size_t>(t1)].edges) {
    const auto& el = edges_[static_cast<std::size_t>(e)].elements;
    if ((el[0] == t1 && el[1] == t2) || (el[0] == t2 && el[1] == t1)) return e;
  }
  return -1;
}

CellBox element_box(const FineGrid& grid, const CoarseMesh& mesh, int t) {
  if (grid.m() % mesh.n() != 0) {
    throw ConfigurationError("fine grid m=" + std::to_string(grid.m()) +
                             " is not nested in coarse mesh n=" + std::to_string(mesh.n()));
  }
  const int p = grid.m() / mesh.n();
  const CoarseElement& el = mesh.elements().at(static_cast<std::size_t>(t));
  return {el.ix * p, el.iy * p, p, p};
}

LocalIndexMap restrict_to_box(const FineGrid& grid, const CellBox& box) {
  if (box.i0 < 0 || box.j0 < 0 || box.i0 + box.nx > grid.m() || box.j0 + box.ny > grid.m()) {
    throw ConfigurationError("restrict_to_box: box outside the fine grid");
  }
  LocalIndexMap map{box, {}};
  map.global_nodes.resize(static_cast<std::size_t>(box.node_count()));
  for (int j = 0; j <= box.ny; ++j) {
    for (int i = 0; i <= box.nx; ++i) {
      map.global_nodes[static_cast<std::size_t>(box.local_node(i, j))] =
          grid.node(box.i0 + i, box.j0 + j);
    }
  }
  return map;
}

LocalIndexMap restrict_to_element(const FineGrid& grid, const CoarseMesh& mesh, int t) {
  return restrict_to_box(grid, element_box(grid, mesh, t));
}

}  // namespace msfem

#include "msfem/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "msfem/parallel.hpp"

namespace msfem {

namespace {

// Corners of each side, in the side's node order (first, last).
constexpr std::array<std::array<int, 2>, 4> kSideCorners{{{0, 1}, {1, 3}, {2, 3}, {0, 2}}};

// Local node of position k along side s.
int side_node(const CellBox& box, int side, int k) {
  switch (side) {
    case 0: return box.local_node(k, 0);
    case 1: return box.local_node(box.nx, k);
    case 2: return box.local_node(k, box.ny);
    default: return box.local_node(0, k);
  }
}

int side_length(const CellBox& box, int side) { return (side % 2 == 0) ? box.nx : box.ny; }

std::vector<char> boundary_mask(const CellBox& box) {
  std::vector<char> fixed(static_cast<std::size_t>(box.node_count()), 0);
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k <= side_length(box, s); ++k) fixed[static_cast<std::size_t>(side_node(box, s, k))] = 1;
  }
  return fixed;
}

// Bilinear hat of corner c of the box, evaluated at local node (i, j).
double box_hat(const CellBox& box, int c, int i, int j) {
  const double s = static_cast<double>(i) / box.nx;
  const double t = static_cast<double>(j) / box.ny;
  return ((c & 1) ? s : 1.0 - s) * ((c & 2) ? t : 1.0 - t);
}

std::vector<double> hat_values(const CellBox& box, int c) {
  std::vector<double> v(static_cast<std::size_t>(box.node_count()));
  for (int j = 0; j <= box.ny; ++j) {
    for (int i = 0; i <= box.nx; ++i) v[static_cast<std::size_t>(box.local_node(i, j))] = box_hat(box, c, i, j);
  }
  return v;
}

// Solves the penalized Dirichlet problem on a box for several data vectors
// sharing one operator.
class BoxDirichletSolver {
 public:
  BoxDirichletSolver(const FineGrid& grid, const CellBox& box, const BuildOptions& opts)
      : problem_(assemble_box(grid, box), boundary_mask(box)), opts_(opts) {
    if (opts.solver == InnerSolver::Cholesky && problem_.size() > 0) {
      factor_ = std::make_unique<SpdFactorization>(problem_.reduced());
    }
  }

  std::vector<double> solve(std::span<const double> load, std::span<const double> data) const {
    const auto b = problem_.rhs(load, data);
    std::vector<double> x;
    if (b.empty()) {
      x = {};
    } else if (factor_) {
      x = factor_->solve(b);
    } else {
      x = cg_solve(problem_.reduced(), b, opts_.cg_tol);
    }
    return problem_.expand(x, data);
  }

 private:
  DirichletProblem problem_;
  BuildOptions opts_;
  std::unique_ptr<SpdFactorization> factor_;
};

std::vector<double> unit_load(const FineGrid& grid, const CellBox& box) {
  return load_box(grid, box, [](Point2) { return 1.0; });
}

// DOF table for nodal methods: interior coarse nodes, then bubbles.
void nodal_dofs(MsBasisSet& set, const CoarseMesh& mesh) {
  for (int node = 0; node < mesh.node_count(); ++node) {
    if (!mesh.boundary_node(node)) set.dofs.push_back({DofKind::Node, node, true, -1});
  }
}

void add_bubble_dofs(MsBasisSet& set, const CoarseMesh& mesh, const FineGrid& grid) {
  for (int t = 0; t < static_cast<int>(mesh.elements().size()); ++t) {
    set.dofs.push_back({DofKind::Bubble, t, box_live(grid, element_box(grid, mesh, t)), -1});
  }
}

void number_live(MsBasisSet& set) {
  set.live_count = 0;
  for (auto& d : set.dofs) d.index = d.live ? set.live_count++ : -1;
}

// dof position lookup tables
std::vector<int> node_dof_table(const MsBasisSet& set, const CoarseMesh& mesh) {
  std::vector<int> t(static_cast<std::size_t>(mesh.node_count()), -1);
  for (int d = 0; d < static_cast<int>(set.dofs.size()); ++d) {
    if (set.dofs[static_cast<std::size_t>(d)].kind == DofKind::Node) {
      t[static_cast<std::size_t>(set.dofs[static_cast<std::size_t>(d)].entity)] = d;
    }
  }
  return t;
}

std::vector<int> bubble_dof_table(const MsBasisSet& set, const CoarseMesh& mesh) {
  std::vector<int> t(mesh.elements().size(), -1);
  for (int d = 0; d < static_cast<int>(set.dofs.size()); ++d) {
    if (set.dofs[static_cast<std::size_t>(d)].kind == DofKind::Bubble) {
      t[static_cast<std::size_t>(set.dofs[static_cast<std::size_t>(d)].entity)] = d;
    }
  }
  return t;
}

void check_nested(const CoarseMesh& mesh, const FineGrid& grid) {
  (void)element_box(grid, mesh, 0);
}

std::vector<double> zero_dirichlet_bubble(const FineGrid& grid, const CellBox& box,
                                          const BuildOptions& opts) {
  const BoxDirichletSolver solver(grid, box, opts);
  const auto load = unit_load(grid, box);
  const std::vector<double> data(static_cast<std::size_t>(box.node_count()), 0.0);
  return solver.solve(load, data);
}

// Shared driver for the conforming nodal methods: per element, the function
// of corner c has Dirichlet data trace(c) on the box boundary.
template <class TraceFn>
MsBasisSet build_nodal_dirichlet(const CoarseMesh& mesh, const FineGrid& grid, MethodSpec spec,
                                 const BuildOptions& opts, TraceFn&& trace) {
  check_nested(mesh, grid);
  MsBasisSet set;
  set.spec = spec;
  set.mesh = &mesh;
  set.grid = &grid;
  nodal_dofs(set, mesh);
  if (spec.bubbles) add_bubble_dofs(set, mesh, grid);
  number_live(set);
  const auto node_dof = node_dof_table(set, mesh);
  const auto bubble_dof = bubble_dof_table(set, mesh);
  const int ne = static_cast<int>(mesh.elements().size());
  set.elements.resize(static_cast<std::size_t>(ne));
  parallel_for(ne, opts.jobs, [&](int t) {
    const CellBox box = element_box(grid, mesh, t);
    ElementBasis& eb = set.elements[static_cast<std::size_t>(t)];
    eb.box = box;
    const auto& el = mesh.elements()[static_cast<std::size_t>(t)];
    std::unique_ptr<BoxDirichletSolver> solver;
    for (int c = 0; c < 4; ++c) {
      const int d = node_dof[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(c)])];
      if (d < 0) continue;
      auto data = trace(box, c);
      if (!data.second) {
        eb.functions.push_back({d, std::move(data.first)});
        continue;
      }
      if (!solver) solver = std::make_unique<BoxDirichletSolver>(grid, box, opts);
      eb.functions.push_back({d, solver->solve({}, data.first)});
    }
    if (spec.bubbles) {
      const int d = bubble_dof[static_cast<std::size_t>(t)];
      if (set.dofs[static_cast<std::size_t>(d)].live) {
        if (!solver) solver = std::make_unique<BoxDirichletSolver>(grid, box, opts);
        const std::vector<double> zero(static_cast<std::size_t>(box.node_count()), 0.0);
        eb.functions.push_back({d, solver->solve(unit_load(grid, box), zero)});
      }
    }
  });
  return set;
}

}  // namespace

std::string MethodSpec::name() const {
  switch (method) {
    case Method::Q1: return "q1";
    case Method::MsLin: return "mslin";
    case Method::MsOsc: return "msosc";
    case Method::MsOS: {
      const double r = os_ratio;
      if (r == std::floor(r)) return "msos" + std::to_string(static_cast<int>(r));
      return "msos" + std::to_string(r);
    }
    case Method::CR: return "cr";
  }
  return "unknown";
}

MethodSpec parse_method(const std::string& name, bool bubbles) {
  MethodSpec s;
  s.bubbles = bubbles;
  if (name == "q1") {
    s.method = Method::Q1;
  } else if (name == "mslin") {
    s.method = Method::MsLin;
  } else if (name == "msosc") {
    s.method = Method::MsOsc;
  } else if (name == "cr") {
    s.method = Method::CR;
  } else if (name.rfind("msos", 0) == 0) {
    s.method = Method::MsOS;
    const std::string r = name.substr(4);
    if (!r.empty()) {
      try {
        s.os_ratio = std::stod(r);
      } catch (const std::exception&) {
        throw ParameterError("unknown method: " + name);
      }
    }
  } else {
    throw ParameterError("unknown method: " + name);
  }
  return s;
}

int MsBasisSet::pinv_fallbacks() const {
  int c = 0;
  for (const auto& e : elements) c += e.pinv_fallback ? 1 : 0;
  return c;
}

EdgeAverageRule edge_average_rule(const FineGrid& grid, const CoarseMesh& mesh, int edge) {
  const CoarseEdge& e = mesh.edges().at(static_cast<std::size_t>(edge));
  const int m = grid.m();
  const int i0 = static_cast<int>(std::lround(e.a.x * m));
  const int j0 = static_cast<int>(std::lround(e.a.y * m));
  const int i1 = static_cast<int>(std::lround(e.b.x * m));
  const int j1 = static_cast<int>(std::lround(e.b.y * m));
  if (std::abs(e.a.x * m - i0) > 1e-9 || std::abs(e.b.y * m - j1) > 1e-9 ||
      std::abs(e.a.y * m - j0) > 1e-9 || std::abs(e.b.x * m - i1) > 1e-9) {
    throw ConfigurationError("edge_average_rule: edge does not lie on fine grid lines");
  }
  EdgeAverageRule rule;
  rule.edge = edge;
  const int len = e.vertical ? j1 - j0 : i1 - i0;
  for (int k = 0; k <= len; ++k) {
    rule.nodes.push_back(e.vertical ? grid.node(i0, j0 + k) : grid.node(i0 + k, j0));
    rule.weights.push_back((k == 0 || k == len) ? 0.5 * grid.h() : grid.h());
  }
  return rule;
}

std::vector<std::pair<int, double>> side_rule(const CellBox& box, int side, double h) {
  const int len = side_length(box, side);
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(len) + 1);
  for (int k = 0; k <= len; ++k) out.emplace_back(side_node(box, side, k), (k == 0 || k == len) ? 0.5 * h : h);
  return out;
}

bool side_live(const FineGrid& grid, const CellBox& box, int side) {
  const int len = side_length(box, side);
  for (int k = 0; k < len; ++k) {
    int ci = 0;
    int cj = 0;
    switch (side) {
      case 0: ci = k; cj = 0; break;
      case 1: ci = box.nx - 1; cj = k; break;
      case 2: ci = k; cj = box.ny - 1; break;
      default: ci = 0; cj = k; break;
    }
    if (!grid.perforated(box.i0 + ci, box.j0 + cj)) return true;
  }
  return false;
}

bool box_live(const FineGrid& grid, const CellBox& box) {
  for (int j = 0; j < box.ny; ++j) {
    for (int i = 0; i < box.nx; ++i) {
      if (!grid.perforated(box.i0 + i, box.j0 + j)) return true;
    }
  }
  return false;
}

std::vector<double> oscillatory_profile(const FineGrid& grid, const CellBox& box, int side) {
  const int len = side_length(box, side);
  const int m = grid.m();
  std::vector<double> inv(static_cast<std::size_t>(len));
  for (int k = 0; k < len; ++k) {
    // Cells on both sides of the fine segment, in global indices.
    int ia = 0, ja = 0, ib = 0, jb = 0;
    if (side % 2 == 0) {
      const int j = box.j0 + (side == 0 ? 0 : box.ny);
      ia = ib = box.i0 + k;
      ja = j - 1;
      jb = j;
    } else {
      const int i = box.i0 + (side == 3 ? 0 : box.nx);
      ja = jb = box.j0 + k;
      ia = i - 1;
      ib = i;
    }
    double nu = 0.0;
    if (ia >= 0 && ja >= 0 && ia < m && ja < m) nu = std::max(nu, grid.nu(ia, ja));
    if (ib >= 0 && jb >= 0 && ib < m && jb < m) nu = std::max(nu, grid.nu(ib, jb));
    inv[static_cast<std::size_t>(k)] = 1.0 / nu;
  }
  std::vector<double> phi(static_cast<std::size_t>(len) + 1, 0.0);
  for (int k = 0; k < len; ++k) phi[static_cast<std::size_t>(k) + 1] = phi[static_cast<std::size_t>(k)] + inv[static_cast<std::size_t>(k)];
  const double total = phi.back();
  for (auto& v : phi) v /= total;
  phi.back() = 1.0;
  return phi;
}

MsBasisSet build_q1_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles,
                          const BuildOptions& opts) {
  MethodSpec spec{Method::Q1, bubbles, 0.0};
  return build_nodal_dirichlet(mesh, grid, spec, opts, [](const CellBox& box, int c) {
    return std::make_pair(hat_values(box, c), false);
  });
}

MsBasisSet build_mslin_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles,
                             const BuildOptions& opts) {
  MethodSpec spec{Method::MsLin, bubbles, 0.0};
  return build_nodal_dirichlet(mesh, grid, spec, opts, [](const CellBox& box, int c) {
    auto v = hat_values(box, c);
    const auto fixed = boundary_mask(box);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!fixed[k]) v[k] = 0.0;
    }
    return std::make_pair(std::move(v), true);
  });
}

MsBasisSet build_msosc_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles,
                             const BuildOptions& opts) {
  MethodSpec spec{Method::MsOsc, bubbles, 0.0};
  return build_nodal_dirichlet(mesh, grid, spec, opts, [&grid](const CellBox& box, int c) {
    std::vector<double> v(static_cast<std::size_t>(box.node_count()), 0.0);
    for (int s = 0; s < 4; ++s) {
      const auto& sc = kSideCorners[static_cast<std::size_t>(s)];
      if (sc[0] != c && sc[1] != c) continue;
      const auto phi = oscillatory_profile(grid, box, s);
      for (int k = 0; k <= side_length(box, s); ++k) {
        const double p = phi[static_cast<std::size_t>(k)];
        v[static_cast<std::size_t>(side_node(box, s, k))] = (sc[1] == c) ? p : 1.0 - p;
      }
    }
    return std::make_pair(std::move(v), true);
  });
}

MsBasisSet build_msos_basis(const CoarseMesh& mesh, const FineGrid& grid, double ratio,
                            bool bubbles, const BuildOptions& opts) {
  if (!(ratio >= 1.0)) throw ParameterError("build_msos_basis: oversampling ratio must be >= 1");
  check_nested(mesh, grid);
  const int p = grid.m() / mesh.n();
  const double ext_real = (ratio - 1.0) * p / 2.0;
  const int ext = static_cast<int>(std::lround(ext_real));
  if (std::abs(ext_real - ext) > 1e-9) {
    throw ConfigurationError("build_msos_basis: patch extension of " + std::to_string(ext_real) +
                             " fine cells is not an integer");
  }
  MsBasisSet set;
  set.spec = {Method::MsOS, bubbles, ratio};
  set.mesh = &mesh;
  set.grid = &grid;
  nodal_dofs(set, mesh);
  if (bubbles) add_bubble_dofs(set, mesh, grid);
  number_live(set);
  const auto node_dof = node_dof_table(set, mesh);
  const auto bubble_dof = bubble_dof_table(set, mesh);
  const int ne = static_cast<int>(mesh.elements().size());
  set.elements.resize(static_cast<std::size_t>(ne));
  const int m = grid.m();
  parallel_for(ne, opts.jobs, [&](int t) {
    const CellBox box = element_box(grid, mesh, t);
    ElementBasis& eb = set.elements[static_cast<std::size_t>(t)];
    eb.box = box;
    const int pi0 = std::max(0, box.i0 - ext);
    const int pj0 = std::max(0, box.j0 - ext);
    const int pi1 = std::min(m, box.i0 + box.nx + ext);
    const int pj1 = std::min(m, box.j0 + box.ny + ext);
    const CellBox patch{pi0, pj0, pi1 - pi0, pj1 - pj0};
    const BoxDirichletSolver solver(grid, patch, opts);
    const auto fixed = boundary_mask(patch);

    // psi[j] restricted to the element box
    std::array<std::vector<double>, 4> psi;
    for (int c = 0; c < 4; ++c) {
      auto data = hat_values(patch, c);
      for (std::size_t k = 0; k < data.size(); ++k) {
        if (!fixed[k]) data[k] = 0.0;
      }
      const auto full = solver.solve({}, data);
      auto& r = psi[static_cast<std::size_t>(c)];
      r.resize(static_cast<std::size_t>(box.node_count()));
      for (int j = 0; j <= box.ny; ++j) {
        for (int i = 0; i <= box.nx; ++i) {
          r[static_cast<std::size_t>(box.local_node(i, j))] =
              full[static_cast<std::size_t>(patch.local_node(box.i0 - pi0 + i, box.j0 - pj0 + j))];
        }
      }
    }
    const std::array<int, 4> corner_nodes{box.local_node(0, 0), box.local_node(box.nx, 0),
                                          box.local_node(0, box.ny), box.local_node(box.nx, box.ny)};
    Eigen::Matrix4d pm;
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        pm(j, k) = psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(corner_nodes[static_cast<std::size_t>(k)])];
      }
    }
    // chi_k = sum_j A(k, j) psi_j with chi_k(corner l) = delta_kl, i.e. A P = I.
    Eigen::Matrix4d a;
    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(pm);
    const auto sv = svd.singularValues();
    const double cond = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
    if (cond < 1e10) {
      a = pm.inverse();
    } else {
      a = pm.completeOrthogonalDecomposition().pseudoInverse();
      eb.pinv_fallback = true;
    }
    const auto& el = mesh.elements()[static_cast<std::size_t>(t)];
    for (int k = 0; k < 4; ++k) {
      const int d = node_dof[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(k)])];
      if (d < 0) continue;
      std::vector<double> v(static_cast<std::size_t>(box.node_count()), 0.0);
      for (int j = 0; j < 4; ++j) {
        const double w = a(k, j);
        if (w == 0.0) continue;
        const auto& pj = psi[static_cast<std::size_t>(j)];
        for (std::size_t q = 0; q < v.size(); ++q) v[q] += w * pj[q];
      }
      eb.functions.push_back({d, std::move(v)});
    }
    if (bubbles) {
      const int d = bubble_dof[static_cast<std::size_t>(t)];
      if (set.dofs[static_cast<std::size_t>(d)].live) {
        eb.functions.push_back({d, zero_dirichlet_bubble(grid, box, opts)});
      }
    }
  });
  return set;
}

MsBasisSet build_cr_basis(const CoarseMesh& mesh, const FineGrid& grid, bool bubbles,
                          const BuildOptions& opts) {
  check_nested(mesh, grid);
  MsBasisSet set;
  set.spec = {Method::CR, bubbles, 0.0};
  set.mesh = &mesh;
  set.grid = &grid;
  const int ne = static_cast<int>(mesh.elements().size());
  const int nedges = static_cast<int>(mesh.edges().size());

  // Side liveness per (element, local side); an edge is live if a side is.
  std::vector<std::array<char, 4>> live_side(static_cast<std::size_t>(ne));
  for (int t = 0; t < ne; ++t) {
    const CellBox box = element_box(grid, mesh, t);
    for (int s = 0; s < 4; ++s) live_side[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] = side_live(grid, box, s);
  }
  std::vector<int> edge_dof(static_cast<std::size_t>(nedges), -1);
  for (int e = 0; e < nedges; ++e) {
    const CoarseEdge& ce = mesh.edges()[static_cast<std::size_t>(e)];
    if (ce.boundary()) continue;
    bool live = false;
    for (int t : ce.elements) {
      const auto& el = mesh.elements()[static_cast<std::size_t>(t)];
      for (int s = 0; s < 4; ++s) {
        if (el.edges[static_cast<std::size_t>(s)] == e && live_side[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)]) live = true;
      }
    }
    edge_dof[static_cast<std::size_t>(e)] = static_cast<int>(set.dofs.size());
    set.dofs.push_back({DofKind::Edge, e, live, -1});
  }
  if (bubbles) add_bubble_dofs(set, mesh, grid);
  number_live(set);
  const auto bubble_dof = bubble_dof_table(set, mesh);
  set.elements.resize(static_cast<std::size_t>(ne));

  parallel_for(ne, opts.jobs, [&](int t) {
    const CellBox box = element_box(grid, mesh, t);
    ElementBasis& eb = set.elements[static_cast<std::size_t>(t)];
    eb.box = box;
    const auto& el = mesh.elements()[static_cast<std::size_t>(t)];

    // Boundary sides of the domain carry v = 0.
    std::vector<char> fixed(static_cast<std::size_t>(box.node_count()), 0);
    std::vector<int> constrained;  // local sides with an average constraint
    for (int s = 0; s < 4; ++s) {
      const int e = el.edges[static_cast<std::size_t>(s)];
      if (mesh.edges()[static_cast<std::size_t>(e)].boundary()) {
        for (const auto& [node, w] : side_rule(box, s, grid.h())) fixed[static_cast<std::size_t>(node)] = 1;
      } else if (live_side[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)]) {
        constrained.push_back(s);
      }
    }
    const bool bubble_live = bubbles && set.dofs[static_cast<std::size_t>(bubble_dof[static_cast<std::size_t>(t)])].live;
    if (constrained.empty() && !bubble_live) return;

    const DirichletProblem prob(assemble_box(grid, box), fixed);
    std::vector<int> to_free(static_cast<std::size_t>(box.node_count()), -1);
    for (std::size_t q = 0; q < prob.free_nodes().size(); ++q) to_free[static_cast<std::size_t>(prob.free_nodes()[q])] = static_cast<int>(q);

    const SaddleOptions sopts{opts.solver, opts.cg_tol, 1e-12};
    std::unique_ptr<SaddleSolver> solver;
    for (;;) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(constrained.size()), prob.size());
      for (std::size_t r = 0; r < constrained.size(); ++r) {
        for (const auto& [node, w] : side_rule(box, constrained[r], grid.h())) {
          const int q = to_free[static_cast<std::size_t>(node)];
          if (q >= 0) c(static_cast<Eigen::Index>(r), q) += w;
        }
      }
      try {
        solver = std::make_unique<SaddleSolver>(prob.reduced(), std::move(c), sopts);
        break;
      } catch (const DegenerateConstraint& ex) {
        // Constraint that cannot be imposed: its side is treated as dead.
        const int r = std::clamp(ex.row(), 0, static_cast<int>(constrained.size()) - 1);
        constrained.erase(constrained.begin() + r);
      }
    }

    const int k = static_cast<int>(constrained.size());
    std::vector<double> g(static_cast<std::size_t>(k), 0.0);
    const std::vector<double> zero_data;
    for (int r = 0; r < k; ++r) {
      const int e = el.edges[static_cast<std::size_t>(constrained[static_cast<std::size_t>(r)])];
      std::fill(g.begin(), g.end(), 0.0);
      g[static_cast<std::size_t>(r)] = 1.0;  // unit integral over the edge
      const auto res = solver->solve_constraints_only(g);
      eb.functions.push_back({edge_dof[static_cast<std::size_t>(e)], prob.expand(res.x, zero_data)});
    }
    if (bubble_live) {
      const auto load = unit_load(grid, box);
      std::vector<double> f(prob.free_nodes().size());
      for (std::size_t q = 0; q < f.size(); ++q) f[q] = load[static_cast<std::size_t>(prob.free_nodes()[q])];
      std::fill(g.begin(), g.end(), 0.0);
      const auto res = solver->solve(f, g);
      eb.functions.push_back({bubble_dof[static_cast<std::size_t>(t)], prob.expand(res.x, zero_data)});
    }
  });
  return set;
}

MsBasisSet build_basis(const CoarseMesh& mesh, const FineGrid& grid, const MethodSpec& spec,
                       const BuildOptions& opts) {
  switch (spec.method) {
    case Method::Q1: return build_q1_basis(mesh, grid, spec.bubbles, opts);
    case Method::MsLin: return build_mslin_basis(mesh, grid, spec.bubbles, opts);
    case Method::MsOsc: return build_msosc_basis(mesh, grid, spec.bubbles, opts);
    case Method::MsOS: return build_msos_basis(mesh, grid, spec.os_ratio, spec.bubbles, opts);
    case Method::CR: return build_cr_basis(mesh, grid, spec.bubbles, opts);
  }
  throw ParameterError("build_basis: unknown method");
}

std::vector<std::vector<double>> build_variant_bubbles(const CoarseMesh& mesh, const FineGrid& grid,
                                                       const BuildOptions& opts) {
  check_nested(mesh, grid);
  const int ne = static_cast<int>(mesh.elements().size());
  std::vector<std::vector<double>> out(static_cast<std::size_t>(ne));
  parallel_for(ne, opts.jobs, [&](int t) {
    const CellBox box = element_box(grid, mesh, t);
    if (box_live(grid, box)) out[static_cast<std::size_t>(t)] = zero_dirichlet_bubble(grid, box, opts);
  });
  return out;
}

}  // namespace msfem

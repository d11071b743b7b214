#include "msfem/fine_fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace msfem {

namespace q1 {

namespace {

double shape(int k, double x, double y) {
  const double sx = (k & 1) ? x : 1.0 - x;
  const double sy = (k & 2) ? y : 1.0 - y;
  return sx * sy;
}

std::array<double, 2> shape_grad(int k, double x, double y) {
  const double sx = (k & 1) ? x : 1.0 - x;
  const double sy = (k & 2) ? y : 1.0 - y;
  const double dsx = (k & 1) ? 1.0 : -1.0;
  const double dsy = (k & 2) ? 1.0 : -1.0;
  return {dsx * sy, sx * dsy};
}

template <class Integrand>
ElementMatrix gauss_2x2(Integrand&& integrand) {
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> pts{0.5 - g, 0.5 + g};
  ElementMatrix out{};
  for (double x : pts) {
    for (double y : pts) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) out[a][b] += 0.25 * integrand(a, b, x, y);
      }
    }
  }
  return out;
}

}  // namespace

ElementMatrix gauss_stiffness() {
  return gauss_2x2([](int a, int b, double x, double y) {
    const auto ga = shape_grad(a, x, y);
    const auto gb = shape_grad(b, x, y);
    return ga[0] * gb[0] + ga[1] * gb[1];
  });
}

ElementMatrix gauss_mass() {
  return gauss_2x2([](int a, int b, double x, double y) { return shape(a, x, y) * shape(b, x, y); });
}

}  // namespace q1

namespace {

// Local corner offsets in CellBox order.
constexpr std::array<std::array<int, 2>, 4> kCorner{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

}  // namespace

CsrMatrix assemble_box(const FineGrid& grid, const CellBox& box, bool with_sigma) {
  const int nx = box.nx;
  const int ny = box.ny;
  const int n = box.node_count();
  std::vector<int> rp(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int ci = (i > 0) + 1 + (i < nx);
      const int cj = (j > 0) + 1 + (j < ny);
      rp[static_cast<std::size_t>(box.local_node(i, j)) + 1] = ci * cj;
    }
  }
  for (int r = 0; r < n; ++r) rp[static_cast<std::size_t>(r) + 1] += rp[static_cast<std::size_t>(r)];
  std::vector<int> cols(static_cast<std::size_t>(rp.back()));
  std::vector<double> vals(cols.size(), 0.0);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      int pos = rp[static_cast<std::size_t>(box.local_node(i, j))];
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di;
          const int jj = j + dj;
          if (ii < 0 || ii > nx || jj < 0 || jj > ny) continue;
          cols[static_cast<std::size_t>(pos++)] = box.local_node(ii, jj);
        }
      }
    }
  }
  const auto slot = [&](int i, int j, int di, int dj) {
    const int di_min = i > 0 ? -1 : 0;
    const int dj_min = j > 0 ? -1 : 0;
    const int width = (i > 0) + 1 + (i < nx);
    return rp[static_cast<std::size_t>(box.local_node(i, j))] + (dj - dj_min) * width + (di - di_min);
  };
  const double h2 = grid.h() * grid.h();
  for (int cj = 0; cj < ny; ++cj) {
    for (int ci = 0; ci < nx; ++ci) {
      const double nu = grid.nu(box.i0 + ci, box.j0 + cj);
      const double sm = with_sigma ? grid.sigma(box.i0 + ci, box.j0 + cj) * h2 : 0.0;
      for (int a = 0; a < 4; ++a) {
        const int ia = ci + kCorner[static_cast<std::size_t>(a)][0];
        const int ja = cj + kCorner[static_cast<std::size_t>(a)][1];
        for (int b = 0; b < 4; ++b) {
          const int ib = ci + kCorner[static_cast<std::size_t>(b)][0];
          const int jb = cj + kCorner[static_cast<std::size_t>(b)][1];
          vals[static_cast<std::size_t>(slot(ia, ja, ib - ia, jb - ja))] +=
              nu * q1::stiffness[a][b] + sm * q1::mass[a][b];
        }
      }
    }
  }
  return CsrMatrix(n, std::move(rp), std::move(cols), std::move(vals));
}

std::vector<double> load_box(const FineGrid& grid, const CellBox& box, const ScalarFunction& f) {
  std::vector<double> fn(static_cast<std::size_t>(box.node_count()));
  for (int j = 0; j <= box.ny; ++j) {
    for (int i = 0; i <= box.nx; ++i) {
      fn[static_cast<std::size_t>(box.local_node(i, j))] = f(grid.node_point(box.i0 + i, box.j0 + j));
    }
  }
  std::vector<double> out(fn.size(), 0.0);
  const double h2 = grid.h() * grid.h();
  for (int cj = 0; cj < box.ny; ++cj) {
    for (int ci = 0; ci < box.nx; ++ci) {
      std::array<int, 4> idx{};
      for (int a = 0; a < 4; ++a) {
        idx[static_cast<std::size_t>(a)] =
            box.local_node(ci + kCorner[static_cast<std::size_t>(a)][0], cj + kCorner[static_cast<std::size_t>(a)][1]);
      }
      for (int a = 0; a < 4; ++a) {
        double s = 0.0;
        for (int b = 0; b < 4; ++b) s += q1::mass[a][b] * fn[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])];
        out[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])] += h2 * s;
      }
    }
  }
  return out;
}

PenalizedOperator assemble(const FineGrid& grid) {
  PenalizedOperator op;
  op.grid = &grid;
  const int m = grid.m();
  op.node_to_free.assign(static_cast<std::size_t>(grid.node_count()), -1);
  for (int j = 1; j < m; ++j) {
    for (int i = 1; i < m; ++i) {
      op.node_to_free[static_cast<std::size_t>(grid.node(i, j))] = static_cast<int>(op.free_nodes.size());
      op.free_nodes.push_back(grid.node(i, j));
    }
  }
  op.matrix = assemble_box(grid, grid.full_box()).submatrix(op.free_nodes);
  return op;
}

DirichletProblem::DirichletProblem(const CsrMatrix& full, std::vector<char> fixed)
    : full_(full), fixed_(std::move(fixed)) {
  for (int i = 0; i < full_.size(); ++i) {
    if (!fixed_[static_cast<std::size_t>(i)]) free_.push_back(i);
  }
  reduced_ = full_.submatrix(free_);
}

std::vector<double> DirichletProblem::rhs(std::span<const double> load,
                                          std::span<const double> data) const {
  std::vector<double> out(free_.size(), 0.0);
  const auto& rp = full_.row_ptr();
  const auto& ci = full_.cols();
  const auto& v = full_.values();
  for (std::size_t p = 0; p < free_.size(); ++p) {
    const int row = free_[p];
    double s = load.empty() ? 0.0 : load[static_cast<std::size_t>(row)];
    if (!data.empty()) {
      for (int k = rp[static_cast<std::size_t>(row)]; k < rp[static_cast<std::size_t>(row) + 1]; ++k) {
        const int col = ci[static_cast<std::size_t>(k)];
        if (fixed_[static_cast<std::size_t>(col)]) s -= v[static_cast<std::size_t>(k)] * data[static_cast<std::size_t>(col)];
      }
    }
    out[p] = s;
  }
  return out;
}

std::vector<double> DirichletProblem::expand(std::span<const double> free_values,
                                             std::span<const double> data) const {
  std::vector<double> out(fixed_.size(), 0.0);
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    if (fixed_[i] && !data.empty()) out[i] = data[i];
  }
  for (std::size_t p = 0; p < free_.size(); ++p) out[static_cast<std::size_t>(free_[p])] = free_values[p];
  return out;
}

ScalarField solve_reference(const FineGrid& grid, const ScalarFunction& f,
                            const ReferenceOptions& opts) {
  const PenalizedOperator op = assemble(grid);
  const auto load = load_box(grid, grid.full_box(), f);
  std::vector<double> b(op.free_nodes.size());
  for (std::size_t p = 0; p < b.size(); ++p) b[p] = load[static_cast<std::size_t>(op.free_nodes[p])];
  std::vector<double> x;
  if (opts.solver == InnerSolver::Cholesky) {
    x = SpdFactorization(op.matrix).solve(b);
  } else {
    x = cg_solve(op.matrix, b, opts.tol);
  }
  ScalarField u(grid.m());
  for (std::size_t p = 0; p < x.size(); ++p) u.values[static_cast<std::size_t>(op.free_nodes[p])] = x[p];
  return u;
}

ScalarField solve_reference(const PerforationSet& perf, const ScalarFunction& f, int m,
                            const ReferenceOptions& opts) {
  return solve_reference(build_fine(m, perf), f, opts);
}

CellProblemResult solve_cell_problem(const PerforationSet& unit_perf, int m_cell,
                                     const ReferenceOptions& opts) {
  if (m_cell < 2) throw ParameterError("solve_cell_problem: m_cell must be >= 2");
  const FineGrid cell = build_fine(m_cell, unit_perf);
  bool any = false;
  for (int j = 0; j < m_cell && !any; ++j) {
    for (int i = 0; i < m_cell && !any; ++i) any = cell.perforated(i, j);
  }
  if (!any) {
    throw ConfigurationError(
        "solve_cell_problem: no perforated cell, the periodic operator is singular");
  }
  const int mc = m_cell;
  const auto idx = [mc](int i, int j) { return (j % mc) * mc + (i % mc); };
  const double h2 = cell.h() * cell.h();
  SparseBuilder builder(mc * mc);
  builder.reserve(static_cast<std::size_t>(16 * mc * mc));
  std::vector<double> b(static_cast<std::size_t>(mc * mc), 0.0);
  for (int cj = 0; cj < mc; ++cj) {
    for (int ci = 0; ci < mc; ++ci) {
      const double nu = cell.nu(ci, cj);
      const double sm = cell.sigma(ci, cj) * h2;
      for (int a = 0; a < 4; ++a) {
        const int ra = idx(ci + kCorner[static_cast<std::size_t>(a)][0], cj + kCorner[static_cast<std::size_t>(a)][1]);
        double la = 0.0;
        for (int bb = 0; bb < 4; ++bb) {
          const int rb = idx(ci + kCorner[static_cast<std::size_t>(bb)][0], cj + kCorner[static_cast<std::size_t>(bb)][1]);
          builder.add(ra, rb, nu * q1::stiffness[a][bb] + sm * q1::mass[a][bb]);
          la += h2 * q1::mass[a][bb];
        }
        b[static_cast<std::size_t>(ra)] += la;
      }
    }
  }
  const CsrMatrix k = builder.build();
  std::vector<double> x;
  if (opts.solver == InnerSolver::Cholesky) {
    x = SpdFactorization(k).solve(b);
  } else {
    x = cg_solve(k, b, opts.tol);
  }
  CellProblemResult res;
  res.m_cell = mc;
  res.w = ScalarField(mc);
  for (int j = 0; j <= mc; ++j) {
    for (int i = 0; i <= mc; ++i) res.w.at(i, j) = x[static_cast<std::size_t>(idx(i, j))];
  }
  return res;
}

double CellProblemResult::value(Point2 y) const {
  double u = y.x - std::floor(y.x);
  double v = y.y - std::floor(y.y);
  u *= m_cell;
  v *= m_cell;
  int i = std::min(static_cast<int>(u), m_cell - 1);
  int j = std::min(static_cast<int>(v), m_cell - 1);
  const double s = u - i;
  const double t = v - j;
  return (1 - s) * (1 - t) * w.at(i, j) + s * (1 - t) * w.at(i + 1, j) + (1 - s) * t * w.at(i, j + 1) +
         s * t * w.at(i + 1, j + 1);
}

ScalarField two_scale_reconstruction(const CellProblemResult& cell, double eps,
                                     const ScalarFunction& f, const FineGrid& grid, Vec2 shift) {
  if (!(eps > 0.0)) throw ParameterError("two_scale_reconstruction: eps must be > 0");
  ScalarField out(grid.m());
  const double e2 = eps * eps;
  for (int j = 0; j <= grid.m(); ++j) {
    for (int i = 0; i <= grid.m(); ++i) {
      const Point2 p = grid.node_point(i, j);
      const double fv = f(p);
      if (fv == 0.0) continue;
      out.at(i, j) = e2 * cell.value({p.x / eps - shift.x, p.y / eps - shift.y}) * fv;
    }
  }
  return out;
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
  os << "x,y,value\n";
  const double h = 1.0 / field.m;
  char buf[96];
  for (int j = 0; j <= field.m; ++j) {
    for (int i = 0; i <= field.m; ++i) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.17g\n", i * h, j * h, field.at(i, j));
      os << buf;
    }
  }
}

}  // namespace msfem

#include "msfem/coarse.hpp"

#include <cstdio>
#include <ostream>

#include "msfem/parallel.hpp"

namespace msfem {

namespace {

struct ElementBlock {
  std::vector<int> rows;  // live DOF indices
  std::vector<double> a;  // rows.size()^2, row major
  std::vector<double> f;
};

}  // namespace

CoarseSystem assemble_coarse(const MsBasisSet& basis, const ScalarFunction& f, int jobs) {
  if (basis.live_count == 0) throw ConfigurationError("assemble_coarse: no live degrees of freedom");
  const FineGrid& grid = *basis.grid;
  const int ne = static_cast<int>(basis.elements.size());
  std::vector<ElementBlock> blocks(static_cast<std::size_t>(ne));
  parallel_for(ne, jobs, [&](int t) {
    const ElementBasis& eb = basis.elements[static_cast<std::size_t>(t)];
    ElementBlock& blk = blocks[static_cast<std::size_t>(t)];
    std::vector<const LocalFunction*> fns;
    for (const auto& lf : eb.functions) {
      const int idx = basis.dofs[static_cast<std::size_t>(lf.dof)].index;
      if (idx < 0) continue;
      fns.push_back(&lf);
      blk.rows.push_back(idx);
    }
    if (fns.empty()) return;
    const CsrMatrix k = assemble_box(grid, eb.box);
    const auto load = load_box(grid, eb.box, f);
    const std::size_t nf = fns.size();
    blk.a.assign(nf * nf, 0.0);
    blk.f.assign(nf, 0.0);
    for (std::size_t i = 0; i < nf; ++i) {
      const auto kb = k.multiply(fns[i]->values);
      blk.f[i] = dot(fns[i]->values, load);
      for (std::size_t j = 0; j < nf; ++j) blk.a[j * nf + i] = dot(fns[j]->values, kb);
    }
    // exact symmetry
    for (std::size_t i = 0; i < nf; ++i) {
      for (std::size_t j = i + 1; j < nf; ++j) {
        const double s = 0.5 * (blk.a[i * nf + j] + blk.a[j * nf + i]);
        blk.a[i * nf + j] = blk.a[j * nf + i] = s;
      }
    }
  });
  SparseBuilder builder(basis.live_count);
  CoarseSystem sys;
  sys.basis = &basis;
  sys.load.assign(static_cast<std::size_t>(basis.live_count), 0.0);
  for (const auto& blk : blocks) {
    const std::size_t nf = blk.rows.size();
    for (std::size_t i = 0; i < nf; ++i) {
      sys.load[static_cast<std::size_t>(blk.rows[i])] += blk.f[i];
      for (std::size_t j = 0; j < nf; ++j) builder.add(blk.rows[i], blk.rows[j], blk.a[i * nf + j]);
    }
  }
  sys.matrix = builder.build();
  return sys;
}

std::vector<std::vector<double>> combine(const MsBasisSet& basis, std::span<const double> coefficients) {
  std::vector<std::vector<double>> out(basis.elements.size());
  for (std::size_t t = 0; t < basis.elements.size(); ++t) {
    const ElementBasis& eb = basis.elements[t];
    auto& v = out[t];
    v.assign(static_cast<std::size_t>(eb.box.node_count()), 0.0);
    for (const auto& lf : eb.functions) {
      const int idx = basis.dofs[static_cast<std::size_t>(lf.dof)].index;
      if (idx < 0) continue;
      const double c = coefficients[static_cast<std::size_t>(idx)];
      if (c == 0.0) continue;
      for (std::size_t q = 0; q < v.size(); ++q) v[q] += c * lf.values[q];
    }
  }
  return out;
}

CoarseSolution solve_coarse(const CoarseSystem& sys, double tol) {
  CgOptions opts;
  opts.tol = tol;
  const CgResult res = cg_solve_detailed(sys.matrix, sys.load, opts);
  CoarseSolution sol;
  sol.basis = sys.basis;
  sol.coefficients = res.x;
  sol.iterations = res.iterations;
  sol.relative_residual = res.relative_residual;
  sol.element_values = combine(*sys.basis, sol.coefficients);
  return sol;
}

ScalarField CoarseSolution::to_field() const {
  const FineGrid& grid = *basis->grid;
  ScalarField out(grid.m());
  std::vector<char> set(out.values.size(), 0);
  for (std::size_t t = 0; t < basis->elements.size(); ++t) {
    const CellBox& box = basis->elements[t].box;
    for (int j = 0; j <= box.ny; ++j) {
      for (int i = 0; i <= box.nx; ++i) {
        const auto g = static_cast<std::size_t>(grid.node(box.i0 + i, box.j0 + j));
        if (set[g]) continue;
        set[g] = 1;
        out.values[g] = element_values[t][static_cast<std::size_t>(box.local_node(i, j))];
      }
    }
  }
  return out;
}

int dof_count(const MsBasisSet& basis) { return basis.live_count; }

void write_solution_csv(std::ostream& os, const CoarseSolution& sol) {
  os << "element_id,x,y,value\n";
  const double h = sol.basis->grid->h();
  char buf[128];
  for (std::size_t t = 0; t < sol.basis->elements.size(); ++t) {
    const CellBox& box = sol.basis->elements[t].box;
    for (int j = 0; j <= box.ny; ++j) {
      for (int i = 0; i <= box.nx; ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.17g\n", t, (box.i0 + i) * h, (box.j0 + j) * h,
                      sol.element_values[t][static_cast<std::size_t>(box.local_node(i, j))]);
        os << buf;
      }
    }
  }
}

}  // namespace msfem

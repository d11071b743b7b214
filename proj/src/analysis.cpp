#include "msfem/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace msfem {

namespace {

template <class Form>
double cell_sum(const FineGrid& grid, const CellBox& box, std::span<const double> u, const Form& form) {
  double s = 0.0;
  for (int cj = 0; cj < box.ny; ++cj) {
    for (int ci = 0; ci < box.nx; ++ci) {
      if (grid.perforated(box.i0 + ci, box.j0 + cj)) continue;
      const std::array<double, 4> v{u[static_cast<std::size_t>(box.local_node(ci, cj))],
                                    u[static_cast<std::size_t>(box.local_node(ci + 1, cj))],
                                    u[static_cast<std::size_t>(box.local_node(ci, cj + 1))],
                                    u[static_cast<std::size_t>(box.local_node(ci + 1, cj + 1))]};
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) s += v[static_cast<std::size_t>(a)] * form[a][b] * v[static_cast<std::size_t>(b)];
      }
    }
  }
  return s;
}

std::vector<double> restrict_field(const ScalarField& u, const CellBox& box) {
  std::vector<double> out(static_cast<std::size_t>(box.node_count()));
  for (int j = 0; j <= box.ny; ++j) {
    for (int i = 0; i <= box.nx; ++i) out[static_cast<std::size_t>(box.local_node(i, j))] = u.at(box.i0 + i, box.j0 + j);
  }
  return out;
}

struct ErrorPair {
  double l2 = 0.0;
  double h1 = 0.0;
};

ErrorPair relative_errors(const ScalarField& u_ref, const CoarseSolution& u_h) {
  const FineGrid& grid = *u_h.basis->grid;
  double eh1 = 0.0, el2 = 0.0, rh1 = 0.0, rl2 = 0.0;
  for (std::size_t t = 0; t < u_h.basis->elements.size(); ++t) {
    const CellBox& box = u_h.basis->elements[t].box;
    auto r = restrict_field(u_ref, box);
    rh1 += h1_seminorm_sq(grid, box, r);
    rl2 += l2_norm_sq(grid, box, r);
    for (std::size_t q = 0; q < r.size(); ++q) r[q] -= u_h.element_values[t][q];
    eh1 += h1_seminorm_sq(grid, box, r);
    el2 += l2_norm_sq(grid, box, r);
  }
  if (!(rh1 > 0.0) || !(rl2 > 0.0)) throw ConfigurationError("relative error: reference solution is zero");
  return {std::sqrt(el2 / rl2), std::sqrt(eh1 / rh1)};
}

}  // namespace

double h1_seminorm_sq(const FineGrid& grid, const CellBox& box, std::span<const double> u) {
  return cell_sum(grid, box, u, q1::stiffness);
}

double l2_norm_sq(const FineGrid& grid, const CellBox& box, std::span<const double> u) {
  return grid.h() * grid.h() * cell_sum(grid, box, u, q1::mass);
}

double h1_seminorm(const FineGrid& grid, const ScalarField& u) {
  return std::sqrt(h1_seminorm_sq(grid, grid.full_box(), u.values));
}

double l2_norm(const FineGrid& grid, const ScalarField& u) {
  return std::sqrt(l2_norm_sq(grid, grid.full_box(), u.values));
}

double broken_h1_error(const ScalarField& u_ref, const CoarseSolution& u_h) {
  return relative_errors(u_ref, u_h).h1;
}

double l2_error(const ScalarField& u_ref, const CoarseSolution& u_h) {
  return relative_errors(u_ref, u_h).l2;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalarFunction random_cosine_load(std::uint64_t seed, int modes) {
  Xoshiro256 rng(seed);
  std::vector<double> c(static_cast<std::size_t>(modes * modes));
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  constexpr double pi = 3.14159265358979323846;
  return [c, modes](Point2 p) {
    double s = 0.0;
    for (int l = 0; l < modes; ++l) {
      const double cy = std::cos(l * pi * p.y);
      for (int k = 0; k < modes; ++k) s += c[static_cast<std::size_t>(l * modes + k)] * std::cos(k * pi * p.x) * cy;
    }
    return s;
  };
}

PoincareRow poincare_ratio(const PerforationSet& perf, int m, int trials, std::uint64_t seed) {
  const FineGrid grid = build_fine(m, perf);
  PoincareRow row;
  row.eps = perf.period();
  for (int k = 0; k < trials; ++k) {
    const auto f = random_cosine_load(seed + static_cast<std::uint64_t>(k));
    const ScalarField phi = solve_reference(grid, f);
    row.ratios.push_back(l2_norm(grid, phi) / h1_seminorm(grid, phi));
  }
  double s = 0.0;
  for (double r : row.ratios) s += r;
  row.mean = row.ratios.empty() ? 0.0 : s / static_cast<double>(row.ratios.size());
  return row;
}

std::vector<PoincareRow> poincare_ratio(const std::vector<double>& eps_list, double radius_ratio,
                                        int m, int trials, std::uint64_t seed) {
  std::vector<PoincareRow> out;
  for (double eps : eps_list) out.push_back(poincare_ratio(periodic_discs(eps, radius_ratio), m, trials, seed));
  return out;
}

std::vector<HomogenizationRow> homogenization_check(const std::vector<double>& eps_list,
                                                    double radius_ratio, const ScalarFunction& f,
                                                    bool f_vanishes, int m, int m_cell) {
  const CellProblemResult cell = solve_cell_problem(periodic_discs(1.0, radius_ratio), m_cell);
  std::vector<HomogenizationRow> out;
  for (double eps : eps_list) {
    const FineGrid grid = build_fine(m, periodic_discs(eps, radius_ratio));
    const ScalarField u = solve_reference(grid, f);
    ScalarField diff = two_scale_reconstruction(cell, eps, f, grid);
    for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] = u.values[k] - diff.values[k];
    HomogenizationRow r;
    r.eps = eps;
    r.error = h1_seminorm(grid, diff);
    r.scaled = r.error / (f_vanishes ? eps * eps : std::pow(eps, 1.5));
    r.u_h1 = h1_seminorm(grid, u);
    r.u_h1_over_eps = r.u_h1 / eps;
    out.push_back(r);
  }
  return out;
}

bool SweepResult::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ErrorReport& r) { return r.ok; });
}

ErrorReport run_single(const FineGrid& grid, const ScalarField& u_ref, const ScalarFunction& f,
                       const MethodSpec& spec, int n, const BuildOptions& build, bool timing,
                       const std::string& geometry_tag) {
  ErrorReport rep;
  rep.method = spec.name();
  rep.bubbles = spec.bubbles;
  rep.H = 1.0 / n;
  rep.eps = grid.eps();
  rep.geometry = geometry_tag.empty() ? grid.perforations().tag() : geometry_tag;
  const auto start = std::chrono::steady_clock::now();
  try {
    const CoarseMesh mesh = build_coarse(n);
    const MsBasisSet basis = build_basis(mesh, grid, spec, build);
    const CoarseSystem sys = assemble_coarse(basis, f, build.jobs);
    const CoarseSolution sol = solve_coarse(sys);
    const ErrorPair e = relative_errors(u_ref, sol);
    rep.l2_rel = e.l2;
    rep.h1_rel = e.h1;
    rep.dof = dof_count(basis);
    rep.pinv_fallbacks = basis.pinv_fallbacks();
  } catch (const std::exception& ex) {
    rep.ok = false;
    rep.error = ex.what();
  }
  if (timing) {
    rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rep;
}

SweepResult run_sweep(const SweepConfig& config) {
  const FineGrid grid = build_fine(config.m, config.geometry);
  const ScalarField u_ref = solve_reference(grid, config.f, config.reference);
  BuildOptions build = config.build;
  build.jobs = config.jobs;
  SweepResult res;
  for (const auto& spec : config.methods) {
    for (int n : config.n_list) {
      res.rows.push_back(run_single(grid, u_ref, config.f, spec, n, build, config.timing, config.geometry_tag));
    }
  }
  return res;
}

void write_sweep_csv(std::ostream& os, const std::vector<ErrorReport>& rows) {
  os << "method,bubbles,H,eps,geometry,l2_rel,h1_rel,dof,wall_s\n";
  char buf[512];
  for (const auto& r : rows) {
    if (r.ok) {
      std::snprintf(buf, sizeof buf, "%s,%d,%.10g,%.10g,%s,%.10g,%.10g,%d,%.3f\n", r.method.c_str(),
                    r.bubbles ? 1 : 0, r.H, r.eps, r.geometry.c_str(), r.l2_rel, r.h1_rel, r.dof, r.wall_s);
    } else {
      std::snprintf(buf, sizeof buf, "%s,%d,%.10g,%.10g,%s,nan,nan,%d,%.3f\n", r.method.c_str(),
                    r.bubbles ? 1 : 0, r.H, r.eps, r.geometry.c_str(), r.dof, r.wall_s);
    }
    os << buf;
  }
}

void write_sweep_svg(std::ostream& os, const std::vector<ErrorReport>& rows, const std::string& norm) {
  const bool h1 = norm == "h1";
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double xmin = 1e300, xmax = -1e300, ymax = 0.0;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    const double v = 100.0 * (h1 ? r.h1_rel : r.l2_rel);
    const double lx = std::log10(r.H);
    series[r.method + (r.bubbles ? "+bubbles" : "")].emplace_back(lx, v);
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    ymax = std::max(ymax, v);
  }
  const double w = 640, hgt = 420, ml = 60, mr = 170, mt = 30, mb = 50;
  if (xmax <= xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;
  const auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (w - ml - mr); };
  const auto py = [&](double v) { return hgt - mb - v / ymax * (hgt - mt - mb); };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\">\n",
                w, hgt);
  os << buf;
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"18\">relative %s error (%%) vs H</text>\n", ml,
                h1 ? "broken H1" : "L2");
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, hgt - mb, w - mr, hgt - mb, ml, mt, ml, hgt - mb);
  os << buf;
  for (int d = static_cast<int>(std::floor(xmin)); d <= static_cast<int>(std::ceil(xmax)); ++d) {
    for (int k = 1; k < 10; ++k) {
      const double lx = d + std::log10(static_cast<double>(k));
      if (lx < xmin - 1e-9 || lx > xmax + 1e-9) continue;
      std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>\n",
                    px(lx), hgt - mb, px(lx), hgt - mb + (k == 1 ? 8.0 : 4.0));
      os << buf;
      if (k == 1) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">1e%d</text>\n", px(lx),
                      hgt - mb + 22, d);
        os << buf;
      }
    }
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", ml - 4, py(ymax) + 4, ymax);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">0</text>\n", ml - 4, py(0.0) + 4);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">H (log scale)</text>\n",
                0.5 * (ml + w - mr), hgt - 8);
  os << buf;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  int idx = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = colors[idx % 10];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [lx, v] : pts) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(lx), py(v));
      os << buf;
    }
    os << "\"/>\n";
    for (const auto& [lx, v] : pts) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", px(lx), py(v), color);
      os << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  w - mr + 10, mt + 16.0 * idx, w - mr + 30, mt + 16.0 * idx, color, w - mr + 35,
                  mt + 16.0 * idx + 4, name.c_str());
    os << buf;
    ++idx;
  }
  os << "</svg>\n";
}

}  // namespace msfem

#include "msfem/msfem1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "msfem/analysis.hpp"
#include "msfem/geometry.hpp"

namespace msfem {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

double adaptive(const std::function<double(double)>& g, double a, double b) {
  if (b <= a) return 0.0;
  return gauss_kronrod<double, 31>::integrate(g, a, b, 6, 1e-11);
}

}  // namespace

Mesh1D Mesh1D::uniform(int n, std::vector<std::pair<double, double>> holes, double length, double eps) {
  if (n < 1) throw ParameterError("Mesh1D::uniform: need at least one segment");
  Mesh1D m;
  m.length = length;
  m.eps = eps;
  for (int i = 0; i <= n; ++i) m.nodes.push_back(length * i / n);
  m.nodes.back() = length;
  // reuse the validation of the perforation factory
  (void)segments_1d(holes, length, eps);
  m.holes = std::move(holes);
  return m;
}

std::vector<std::pair<double, double>> Mesh1D::gaps() const {
  std::vector<std::pair<double, double>> out;
  double pos = 0.0;
  for (const auto& [a, b] : holes) {
    if (a > pos) out.emplace_back(pos, a);
    pos = std::max(pos, b);
  }
  if (length > pos) out.emplace_back(pos, length);
  return out;
}

bool Mesh1D::in_hole(double x) const {
  return std::any_of(holes.begin(), holes.end(), [x](const auto& h) { return x >= h.first && x <= h.second; });
}

double BasisFunction1D::value(double x) const {
  for (const auto& p : pieces) {
    if (x >= p.a && x <= p.b) return p.value(x);
  }
  return 0.0;
}

double BasisFunction1D::derivative(double x) const {
  for (const auto& p : pieces) {
    if (x >= p.a && x < p.b) return p.derivative(x);
  }
  return 0.0;
}

std::vector<BasisFunction1D> build_basis_1d(const Mesh1D& mesh) {
  const auto gaps = mesh.gaps();
  const int n = static_cast<int>(mesh.nodes.size()) - 1;
  std::vector<BasisFunction1D> out;
  for (int i = 1; i < n; ++i) {
    BasisFunction1D phi;
    phi.entity = i;
    const double xi = mesh.nodes[static_cast<std::size_t>(i)];
    phi.live = !mesh.in_hole(xi);
    if (phi.live) {
      for (const auto& [l, r] : gaps) {
        if (xi <= l || xi >= r) continue;
        const double lo = std::max(l, mesh.nodes[static_cast<std::size_t>(i) - 1]);
        const double hi = std::min(r, mesh.nodes[static_cast<std::size_t>(i) + 1]);
        phi.pieces.push_back({lo, xi, 0.0, 1.0 / (xi - lo), 0.0});
        phi.pieces.push_back({xi, hi, 1.0, -1.0 / (hi - xi), 0.0});
      }
    }
    out.push_back(std::move(phi));
  }
  for (int i = 1; i <= n; ++i) {
    BasisFunction1D psi;
    psi.bubble = true;
    psi.entity = i;
    const double x0 = mesh.nodes[static_cast<std::size_t>(i) - 1];
    const double x1 = mesh.nodes[static_cast<std::size_t>(i)];
    for (const auto& [l, r] : gaps) {
      const double p = std::max(l, x0);
      const double q = std::min(r, x1);
      if (q <= p) continue;
      // (s - p)(q - s)/2 expanded around p
      psi.pieces.push_back({p, q, 0.0, 0.5 * (q - p), -0.5});
    }
    psi.live = !psi.pieces.empty();
    out.push_back(std::move(psi));
  }
  return out;
}

double energy_product_1d(const BasisFunction1D& u, const BasisFunction1D& v) {
  double s = 0.0;
  for (const auto& pu : u.pieces) {
    for (const auto& pv : v.pieces) {
      const double a = std::max(pu.a, pv.a);
      const double b = std::min(pu.b, pv.b);
      if (b <= a) continue;
      s += gauss<double, 3>::integrate([&](double x) { return pu.derivative(x) * pv.derivative(x); }, a, b);
    }
  }
  return s;
}

double load_1d(const BasisFunction1D& v, const Function1D& f) {
  double s = 0.0;
  for (const auto& p : v.pieces) {
    s += gauss<double, 20>::integrate([&](double x) { return f(x) * p.value(x); }, p.a, p.b);
  }
  return s;
}

Solution1D solve_msfem_1d(const Mesh1D& mesh, const Function1D& f) {
  Solution1D sol;
  sol.basis = build_basis_1d(mesh);
  sol.coefficients.assign(sol.basis.size(), 0.0);
  std::vector<int> live;
  for (int k = 0; k < static_cast<int>(sol.basis.size()); ++k) {
    if (sol.basis[static_cast<std::size_t>(k)].live) live.push_back(k);
  }
  if (live.empty()) {
    sol.trivial = true;
    return sol;
  }
  const auto nl = static_cast<Eigen::Index>(live.size());
  Eigen::MatrixXd a(nl, nl);
  Eigen::VectorXd b(nl);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const auto& bi = sol.basis[static_cast<std::size_t>(live[static_cast<std::size_t>(i)])];
    b(i) = load_1d(bi, f);
    for (Eigen::Index j = 0; j <= i; ++j) {
      a(i, j) = a(j, i) = energy_product_1d(bi, sol.basis[static_cast<std::size_t>(live[static_cast<std::size_t>(j)])]);
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw SolverError("solve_msfem_1d: stiffness matrix is not SPD", 0.0, 0);
  const Eigen::VectorXd x = llt.solve(b);
  for (Eigen::Index i = 0; i < nl; ++i) sol.coefficients[static_cast<std::size_t>(live[static_cast<std::size_t>(i)])] = x(i);
  return sol;
}

double Solution1D::value(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (coefficients[k] != 0.0) s += coefficients[k] * basis[k].value(x);
  }
  return s;
}

double Solution1D::derivative(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (coefficients[k] != 0.0) s += coefficients[k] * basis[k].derivative(x);
  }
  return s;
}

ExactSolution1D::ExactSolution1D(std::vector<std::pair<double, double>> gaps, Function1D f)
    : gaps_(std::move(gaps)), f_(std::move(f)) {
  for (const auto& [l, r] : gaps_) {
    const double integral = adaptive([&](double t) { return (r - t) * f_(t); }, l, r);
    flux_.push_back(integral / (r - l));
  }
}

const std::pair<double, double>* ExactSolution1D::gap_of(double x) const {
  for (const auto& g : gaps_) {
    if (x >= g.first && x <= g.second) return &g;
  }
  return nullptr;
}

double ExactSolution1D::value(double x) const {
  const auto* g = gap_of(x);
  if (!g) return 0.0;
  const double flux = flux_[static_cast<std::size_t>(g - gaps_.data())];
  return (x - g->first) * flux - adaptive([&](double t) { return (x - t) * f_(t); }, g->first, x);
}

double ExactSolution1D::derivative(double x) const {
  const auto* g = gap_of(x);
  if (!g) return 0.0;
  const double flux = flux_[static_cast<std::size_t>(g - gaps_.data())];
  return flux - adaptive(f_, g->first, x);
}

ExactSolution1D exact_solution_1d(const Mesh1D& mesh, const Function1D& f) {
  return ExactSolution1D(mesh.gaps(), f);
}

double h1_error_1d(const ExactSolution1D& u, const Solution1D& u_h, const Mesh1D& mesh) {
  double s = 0.0;
  // integrate on pieces where u_h is polynomial: gaps cut by the coarse nodes
  for (const auto& [l, r] : mesh.gaps()) {
    std::vector<double> cuts{l};
    for (double x : mesh.nodes) {
      if (x > l && x < r) cuts.push_back(x);
    }
    cuts.push_back(r);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k];
      const double b = cuts[k + 1];
      const double mid = 0.5 * (a + b);
      s += gauss<double, 20>::integrate(
          [&](double x) {
            // evaluate u_h' from the inside of the piece to avoid node ties
            const double xe = x == b ? mid : x;
            const double d = u.derivative(x) - u_h.derivative(xe);
            return d * d;
          },
          a, b);
    }
  }
  return std::sqrt(s);
}

std::vector<std::pair<double, double>> random_holes_1d(double eps, double length, std::uint64_t seed) {
  if (!(eps > 0.0) || !(length > 0.0)) throw ParameterError("random_holes_1d: eps and length must be > 0");
  Xoshiro256 rng(seed);
  std::vector<std::pair<double, double>> holes;
  double pos = 0.0;
  for (;;) {
    const double g = eps * rng.uniform(0.5, 1.0);
    if (length - pos <= g) break;
    const double a = pos + g;
    double b = a + eps * rng.uniform(0.2, 0.6);
    if (b >= length - 0.25 * eps) {
      b = 0.5 * (a + length);
      holes.emplace_back(a, b);
      break;
    }
    holes.emplace_back(a, b);
    pos = b;
  }
  return holes;
}

std::vector<RateRow> verify_estimate_1d(const std::vector<double>& eps_list, const std::vector<int>& n_list,
                                        const Function1D& f, const Function1D& fprime, std::uint64_t seed) {
  const double fp_norm = std::sqrt(adaptive([&](double x) { return fprime(x) * fprime(x); }, 0.0, 1.0));
  std::vector<RateRow> rows;
  for (double eps : eps_list) {
    const auto holes = random_holes_1d(eps, 1.0, seed);
    const auto exact = ExactSolution1D(Mesh1D::uniform(1, holes, 1.0, eps).gaps(), f);
    std::vector<double> hs, es;
    const std::size_t first = rows.size();
    for (int n : n_list) {
      const Mesh1D mesh = Mesh1D::uniform(n, holes, 1.0, eps);
      const Solution1D sol = solve_msfem_1d(mesh, f);
      RateRow r;
      r.eps = eps;
      r.H = 1.0 / n;
      r.h1_err = h1_error_1d(exact, sol, mesh);
      r.normalized_err = r.h1_err / (eps * r.H * fp_norm);
      rows.push_back(r);
      hs.push_back(r.H);
      es.push_back(r.h1_err);
    }
    const double slope = hs.size() >= 2 ? loglog_slope(hs, es) : 0.0;
    for (std::size_t k = first; k < rows.size(); ++k) rows[k].slope = slope;
  }
  return rows;
}

void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << "eps,H,h1_err,normalized_err,slope\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.6f\n", r.eps, r.H, r.h1_err, r.normalized_err, r.slope);
    os << buf;
  }
}

}  // namespace msfem

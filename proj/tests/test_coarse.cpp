#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "msfem/analysis.hpp"
#include "msfem/coarse.hpp"

using namespace msfem;

namespace {

const ScalarFunction kOne = [](Point2) { return 1.0; };

double energy_sum(const MsBasisSet& basis, const std::vector<std::vector<double>>& values) {
  double s = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    const auto k = assemble_box(*basis.grid, basis.elements[t].box);
    s += dot(values[t], k.multiply(values[t]));
  }
  return s;
}

double load_sum(const MsBasisSet& basis, const std::vector<std::vector<double>>& values, const ScalarFunction& f) {
  double s = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) s += dot(values[t], load_box(*basis.grid, basis.elements[t].box, f));
  return s;
}

}  // namespace

TEST_CASE("Q1 coarse stiffness is the classical one") {
  const auto grid = build_fine(32, PerforationSet::none());
  const auto mesh = build_coarse(4);
  const auto basis = build_q1_basis(mesh, grid, false);
  const auto sys = assemble_coarse(basis, kOne);
  REQUIRE(sys.size() == 9);
  // Live DOFs are interior nodes in lexicographic order: 3x3.
  CHECK(sys.matrix.at(4, 4) == doctest::Approx(8.0 / 3));
  CHECK(sys.matrix.at(4, 1) == doctest::Approx(-1.0 / 3));
  CHECK(sys.matrix.at(4, 0) == doctest::Approx(-1.0 / 3));
  CHECK(sys.matrix.at(0, 8) == 0.0);
  // Load of an interior hat is H^2 for f = 1.
  CHECK(sys.load[4] == doctest::Approx(1.0 / 16));
}

TEST_CASE("coarse systems are symmetric and Galerkin") {
  const auto grid = build_fine(64, periodic_discs(0.125, 0.3));
  const auto mesh = build_coarse(4);
  const ScalarFunction f = [](Point2 p) { return std::sin(3.0 * p.x) + p.y; };
  for (Method m : {Method::Q1, Method::MsLin, Method::MsOsc, Method::MsOS, Method::CR}) {
    for (bool bubbles : {false, true}) {
      const MethodSpec spec{m, bubbles, 3.0};
      CAPTURE(spec.name());
      CAPTURE(bubbles);
      const auto basis = build_basis(mesh, grid, spec);
      const auto sys = assemble_coarse(basis, f);
      CHECK(sys.matrix.asymmetry() <= 1e-12);
      const auto sol = solve_coarse(sys);
      CHECK(sol.relative_residual <= 1e-12);
      // a_H(u_H, b_i) = F(b_i): residual of the coarse system.
      auto r = sys.matrix.multiply(sol.coefficients);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.load[i];
      CHECK(norm2(r) <= 1e-11 * norm2(sys.load));
      // Energy identity, once through the coarse system and once element by element.
      const double a = dot(sol.coefficients, sys.matrix.multiply(sol.coefficients));
      const double l = dot(sol.coefficients, sys.load);
      CHECK(a == doctest::Approx(l).epsilon(1e-8));
      CHECK(energy_sum(basis, sol.element_values) == doctest::Approx(load_sum(basis, sol.element_values, f)).epsilon(1e-8));
    }
  }
}

TEST_CASE("zero load gives zero solution") {
  const auto grid = build_fine(32, periodic_discs(0.25, 0.3));
  const auto mesh = build_coarse(4);
  const auto basis = build_cr_basis(mesh, grid, true);
  const auto sol = solve_coarse(assemble_coarse(basis, [](Point2) { return 0.0; }));
  for (double c : sol.coefficients) CHECK(c == 0.0);
}

TEST_CASE("Q1 converges at second order in L2") {
  const double pi = std::numbers::pi;
  const ScalarFunction f = [pi](Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
  const auto grid = build_fine(256, PerforationSet::none());
  const auto u = solve_reference(grid, f, {InnerSolver::Cholesky, 1e-12});
  std::vector<double> err;
  for (int n : {8, 16, 32}) {
    const auto r = run_single(grid, u, f, {Method::Q1, false, 0.0}, n, {}, false);
    REQUIRE(r.ok);
    err.push_back(r.l2_rel);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.12));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.12));
}

TEST_CASE("elements inside a perforation are skipped") {
  RandomRects rr;
  rr.count = 1;
  rr.w_range = {0.5, 0.5};
  rr.h_range = {0.25, 0.25};
  rr.rects = {{0.25, 0.25, 0.75, 0.5}};
  const auto grid = build_fine(32, PerforationSet{rr});
  const auto mesh = build_coarse(4);
  for (Method m : {Method::CR, Method::MsLin}) {
    const auto basis = build_basis(mesh, grid, {m, true, 3.0});
    const auto sol = solve_coarse(assemble_coarse(basis, kOne));
    for (double c : sol.coefficients) CHECK(std::isfinite(c));
    if (m == Method::CR) {
      for (int t : {mesh.element_id(1, 1), mesh.element_id(2, 1)})
        for (double v : sol.element_values[static_cast<std::size_t>(t)]) CHECK(v == 0.0);
    }
  }
  // All of the domain perforated: nothing to solve.
  const auto dead = build_fine(32, PerforationSet{RandomRects{1, {1, 1}, {1, 1}, 0, {{0, 0, 1, 1}}}});
  const auto basis = build_cr_basis(mesh, dead, true);
  CHECK(basis.live_count == 0);
  CHECK_THROWS_AS(assemble_coarse(basis, kOne), ConfigurationError);
}

TEST_CASE("solution csv is reproducible and thread independent") {
  const auto grid = build_fine(64, periodic_discs(0.125, 0.3, {0.5, 0.5}));
  const auto mesh = build_coarse(4);
  std::vector<std::string> out;
  for (int jobs : {1, 1, 4}) {
    BuildOptions opts;
    opts.jobs = jobs;
    const auto basis = build_cr_basis(mesh, grid, true, opts);
    const auto sol = solve_coarse(assemble_coarse(basis, kOne, jobs));
    std::ostringstream os;
    write_solution_csv(os, sol);
    out.push_back(os.str());
  }
  CHECK(out[0] == out[1]);
  CHECK(out[0] == out[2]);
  CHECK(out[0].rfind("element_id,x,y,value\n", 0) == 0);
}

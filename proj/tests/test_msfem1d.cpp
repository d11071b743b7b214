#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "msfem/msfem1d.hpp"

using namespace msfem;

namespace {

// -u'' = sin(3x) on (a, b), u(a) = u(b) = 0, in closed form.
struct SinGapSolution {
  double a, b;
  double slope() const { return -(std::sin(3 * b) - std::sin(3 * a)) / (9 * (b - a)); }
  double value(double x) const { return std::sin(3 * x) / 9 + slope() * (x - a) - std::sin(3 * a) / 9; }
  double derivative(double x) const { return std::cos(3 * x) / 3 + slope(); }
};

const Function1D kSin3 = [](double x) { return std::sin(3 * x); };
const Function1D kOne = [](double) { return 1.0; };

}  // namespace

TEST_CASE("exact solution on gaps") {
  const auto mesh = Mesh1D::uniform(4, {{0.4, 0.5}});
  const auto u = exact_solution_1d(mesh, kOne);
  for (double x : {0.05, 0.2, 0.33}) CHECK(u.value(x) == doctest::Approx(x * (0.4 - x) / 2));
  CHECK(u.value(0.2) == doctest::Approx(0.4 * 0.4 / 8));
  CHECK(u.value(0.45) == 0.0);
  CHECK(u.value(0.75) == doctest::Approx(0.25 * 0.25 / 2));

  const auto whole = exact_solution_1d(Mesh1D::uniform(2, {}), kOne);
  CHECK(whole.value(0.5) == doctest::Approx(0.125));
  const auto zero = exact_solution_1d(mesh, [](double) { return 0.0; });
  CHECK(zero.value(0.3) == 0.0);

  const auto us = exact_solution_1d(mesh, kSin3);
  const SinGapSolution g1{0.0, 0.4}, g2{0.5, 1.0};
  for (double x : {0.01, 0.17, 0.39}) {
    CHECK(us.value(x) == doctest::Approx(g1.value(x)).epsilon(1e-10));
    CHECK(us.derivative(x) == doctest::Approx(g1.derivative(x)).epsilon(1e-10));
  }
  for (double x : {0.51, 0.8, 0.99}) {
    CHECK(us.value(x) == doctest::Approx(g2.value(x)).epsilon(1e-10));
    CHECK(us.derivative(x) == doctest::Approx(g2.derivative(x)).epsilon(1e-10));
  }
}

TEST_CASE("basis supports") {
  const auto mesh = Mesh1D::uniform(4, {{0.2, 0.3}, {0.45, 0.55}});
  const auto basis = build_basis_1d(mesh);
  REQUIRE(basis.size() == 3 + 4);
  // Node 0.5 lies in a hole.
  CHECK_FALSE(basis[1].live);
  CHECK(basis[1].pieces.empty());
  for (const auto& b : basis) {
    for (const auto& p : b.pieces) {
      const auto e = static_cast<std::size_t>(b.entity);
      const double lo = mesh.nodes[e - 1];
      const double hi = b.bubble ? mesh.nodes[e] : mesh.nodes[e + 1];
      CHECK(p.a >= lo - 1e-15);
      CHECK(p.b <= hi + 1e-15);
      CHECK_FALSE(mesh.in_hole(0.5 * (p.a + p.b)));
    }
  }
  // The bubbles next to the dead node are still there.
  CHECK(basis[3 + 1].live);
  CHECK(basis[3 + 2].live);
}

TEST_CASE("no perforations: exact for constant load") {
  for (int n : {2, 5, 8}) {
    const auto mesh = Mesh1D::uniform(n, {});
    const auto sol = solve_msfem_1d(mesh, kOne);
    const auto u = exact_solution_1d(mesh, kOne);
    CHECK(h1_error_1d(u, sol, mesh) <= 1e-12);
    for (double x : {0.1, 0.37, 0.5, 0.93}) CHECK(sol.value(x) == doctest::Approx(x * (1 - x) / 2).epsilon(1e-12));
  }
}

TEST_CASE("zero load") {
  const auto mesh = Mesh1D::uniform(6, random_holes_1d(0.1, 1.0, 3), 1.0, 0.1);
  const auto sol = solve_msfem_1d(mesh, [](double) { return 0.0; });
  for (double c : sol.coefficients) CHECK(c == 0.0);
}

TEST_CASE("fully perforated line") {
  Mesh1D mesh;
  mesh.nodes = {0.0, 0.5, 1.0};
  mesh.holes = {{0.0, 1.0}};
  const auto sol = solve_msfem_1d(mesh, kOne);
  CHECK(sol.trivial);
  CHECK(sol.value(0.3) == 0.0);
}

TEST_CASE("Galerkin orthogonality and vanishing on holes") {
  const double eps = 0.05;
  const auto holes = random_holes_1d(eps, 1.0, 42);
  const auto mesh = Mesh1D::uniform(16, holes, 1.0, eps);
  const auto sol = solve_msfem_1d(mesh, kSin3);
  std::vector<SinGapSolution> gaps;
  for (const auto& [a, b] : mesh.gaps()) gaps.push_back({a, b});
  const auto du = [&](double x) {
    for (const auto& g : gaps)
      if (x >= g.a && x <= g.b) return g.derivative(x);
    return 0.0;
  };
  double worst = 0.0;
  for (const auto& b : sol.basis) {
    double s = 0.0;
    for (const auto& p : b.pieces) {
      s += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double x) { return (du(x) - sol.derivative(x)) * p.derivative(x); }, p.a, p.b);
    }
    worst = std::max(worst, std::abs(s));
  }
  CHECK(worst <= 1e-10);
  for (const auto& [a, b] : holes) {
    for (double t : {0.1, 0.3, 0.5, 0.9}) CHECK(sol.value(a + t * (b - a)) == 0.0);
    CHECK(std::abs(sol.value(a)) <= 1e-15);
    CHECK(std::abs(sol.value(b)) <= 1e-15);
  }
}

TEST_CASE("stiffness matrix") {
  const auto mesh = Mesh1D::uniform(8, random_holes_1d(0.1, 1.0, 5), 1.0, 0.1);
  const auto basis = build_basis_1d(mesh);
  std::vector<const BasisFunction1D*> live;
  for (const auto& b : basis)
    if (b.live) live.push_back(&b);
  const auto n = static_cast<Eigen::Index>(live.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = energy_product_1d(*live[static_cast<std::size_t>(i)], *live[static_cast<std::size_t>(j)]);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(a).info() == Eigen::Success);
  CHECK(live.size() <= 2 * 8 - 1);
  // Bubble of segment 1 against the tent of node 5: disjoint supports.
  const auto& psi1 = basis[7];
  const auto& phi5 = basis[4];
  REQUIRE(psi1.bubble);
  CHECK(energy_product_1d(psi1, phi5) == 0.0);
}

TEST_CASE("random holes respect the gap bound") {
  for (std::uint64_t seed : {1u, 2u, 42u}) {
    const auto holes = random_holes_1d(0.05, 1.0, seed);
    const auto mesh = Mesh1D::uniform(4, holes, 1.0, 0.05);
    for (const auto& [a, b] : mesh.gaps()) CHECK(b - a <= 0.05 * (1 + 1e-12));
    CHECK(holes == random_holes_1d(0.05, 1.0, seed));
  }
}

TEST_CASE("rate table") {
  const auto rows = verify_estimate_1d({0.05}, {8, 16}, kSin3, [](double x) { return 3 * std::cos(3 * x); }, 42);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].h1_err < rows[0].h1_err);
  std::ostringstream os;
  write_rate_csv(os, rows);
  CHECK(os.str().rfind("eps,H,h1_err,normalized_err,slope\n", 0) == 0);
}

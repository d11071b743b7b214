#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace msfem {

using Function1D = std::function<double(double)>;

/// Coarse nodes of (0, length) and the holes (a_j, b_j) of the perforated line.
struct Mesh1D {
  double length = 1.0;
  std::vector<double> nodes;
  std::vector<std::pair<double, double>> holes;  // sorted, disjoint, open
  double eps = 0.0;

  static Mesh1D uniform(int n, std::vector<std::pair<double, double>> holes, double length = 1.0,
                        double eps = 0.0);
  /// Complement of the holes in (0, length), in increasing order.
  std::vector<std::pair<double, double>> gaps() const;
  /// Closed membership in a hole.
  bool in_hole(double x) const;
};

/// c0 + c1 (x - a) + c2 (x - a)^2 on [a, b].
struct Piece {
  double a = 0.0;
  double b = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;

  double value(double x) const { return c0 + (x - a) * (c1 + c2 * (x - a)); }
  double derivative(double x) const { return c1 + 2.0 * c2 * (x - a); }
};

struct BasisFunction1D {
  bool bubble = false;
  int entity = 0;  // node index or segment index (1-based segment K_i = [x_{i-1}, x_i])
  bool live = true;
  std::vector<Piece> pieces;

  double value(double x) const;
  double derivative(double x) const;
};

/// Tents Phi_i for internal nodes, then bubbles Psi_i for segments.
std::vector<BasisFunction1D> build_basis_1d(const Mesh1D& mesh);

struct Solution1D {
  std::vector<BasisFunction1D> basis;
  std::vector<double> coefficients;  // one per basis function, 0 for dead ones
  /// Every basis function was dead.
  bool trivial = false;

  double value(double x) const;
  double derivative(double x) const;
};

/// Galerkin solution in span{Phi_i, Psi_i}; integrals by Gauss quadrature on
/// the gap pieces.
Solution1D solve_msfem_1d(const Mesh1D& mesh, const Function1D& f);

/// a(u, v) over the gaps.
double energy_product_1d(const BasisFunction1D& u, const BasisFunction1D& v);
/// Integral of f v over the gaps.
double load_1d(const BasisFunction1D& v, const Function1D& f);

/// -u'' = f on each gap, zero at both gap ends, from the Green's function
/// on the gap with adaptive quadrature.
class ExactSolution1D {
 public:
  ExactSolution1D(std::vector<std::pair<double, double>> gaps, Function1D f);
  double value(double x) const;
  double derivative(double x) const;

 private:
  const std::pair<double, double>* gap_of(double x) const;
  std::vector<std::pair<double, double>> gaps_;
  std::vector<double> flux_;  // (1/L) int (b - t) f(t) dt per gap
  Function1D f_;
};

ExactSolution1D exact_solution_1d(const Mesh1D& mesh, const Function1D& f);

/// |u - u_H|_{H^1} over the gaps.
double h1_error_1d(const ExactSolution1D& u, const Solution1D& u_h, const Mesh1D& mesh);

/// Alternating gap/hole lengths: gaps uniform in [eps/2, eps], holes uniform
/// in [eps/5, 3 eps/5]. Every gap, including the last one, is at most eps.
std::vector<std::pair<double, double>> random_holes_1d(double eps, double length, std::uint64_t seed);

struct RateRow {
  double eps = 0.0;
  double H = 0.0;
  double h1_err = 0.0;
  double normalized_err = 0.0;  // h1_err / (eps H ||f'||)
  double slope = 0.0;           // log-log slope in H for this eps
};

std::vector<RateRow> verify_estimate_1d(const std::vector<double>& eps_list, const std::vector<int>& n_list,
                                        const Function1D& f, const Function1D& fprime, std::uint64_t seed);

void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows);

}  // namespace msfem

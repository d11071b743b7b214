#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "msfem/basis.hpp"
#include "msfem/coarse.hpp"
#include "msfem/fine_fem.hpp"

namespace msfem {

// All norms below are restricted to unperforated fine cells (nu = 1), and
// evaluated exactly for Q1 fields.

/// sum over unperforated cells of the box of |grad u|^2
double h1_seminorm_sq(const FineGrid& grid, const CellBox& box, std::span<const double> u);
/// sum over unperforated cells of the box of u^2
double l2_norm_sq(const FineGrid& grid, const CellBox& box, std::span<const double> u);

double h1_seminorm(const FineGrid& grid, const ScalarField& u);
double l2_norm(const FineGrid& grid, const ScalarField& u);

/// Broken H1 error |u_ref - u_H| / |u_ref|, element-interior gradients only.
double broken_h1_error(const ScalarField& u_ref, const CoarseSolution& u_h);
double l2_error(const ScalarField& u_ref, const CoarseSolution& u_h);

struct ErrorReport {
  std::string method;
  bool bubbles = false;
  double H = 0.0;
  double eps = 0.0;
  std::string geometry;
  double l2_rel = 0.0;
  double h1_rel = 0.0;
  int dof = 0;
  double wall_s = 0.0;
  bool ok = true;
  std::string error;
  int pinv_fallbacks = 0;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Random smooth load: sum of cos(k pi x) cos(l pi y), 0 <= k,l < modes, with
/// coefficients uniform in [-1, 1].
ScalarFunction random_cosine_load(std::uint64_t seed, int modes = 4);

struct PoincareRow {
  double eps = 0.0;
  std::vector<double> ratios;  // ||phi||_L2 / |phi|_H1 per trial
  double mean = 0.0;
};

/// Fine solutions phi of the penalized problem for random loads, on periodic
/// discs of each eps.
std::vector<PoincareRow> poincare_ratio(const std::vector<double>& eps_list, double radius_ratio,
                                        int m, int trials, std::uint64_t seed);
/// Same for an arbitrary perforation set (single row, eps from the set).
PoincareRow poincare_ratio(const PerforationSet& perf, int m, int trials, std::uint64_t seed);

struct HomogenizationRow {
  double eps = 0.0;
  double error = 0.0;   // |u_ref - eps^2 w(x/eps) f|_H1
  double scaled = 0.0;  // error / eps^2 or error / eps^1.5
  double u_h1 = 0.0;
  double u_h1_over_eps = 0.0;
};

/// f_vanishes selects the eps^2 scaling, otherwise eps^{3/2}.
std::vector<HomogenizationRow> homogenization_check(const std::vector<double>& eps_list,
                                                    double radius_ratio, const ScalarFunction& f,
                                                    bool f_vanishes, int m, int m_cell = 256);

struct SweepConfig {
  PerforationSet geometry;
  std::string geometry_tag;
  ScalarFunction f;
  std::vector<MethodSpec> methods;
  std::vector<int> n_list;  // coarse elements per side, H = 1/n
  int m = 512;
  int jobs = 1;
  bool timing = true;
  BuildOptions build;
  ReferenceOptions reference;
};

struct SweepResult {
  std::vector<ErrorReport> rows;
  bool all_ok() const;
};

/// One coarse run against a precomputed reference on the same grid.
ErrorReport run_single(const FineGrid& grid, const ScalarField& u_ref, const ScalarFunction& f,
                       const MethodSpec& spec, int n, const BuildOptions& build, bool timing,
                       const std::string& geometry_tag = "");

SweepResult run_sweep(const SweepConfig& config);

void write_sweep_csv(std::ostream& os, const std::vector<ErrorReport>& rows);
/// Line chart of one norm ("l2" or "h1") against H on a log axis.
void write_sweep_svg(std::ostream& os, const std::vector<ErrorReport>& rows, const std::string& norm);

}  // namespace msfem

#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace msfem {

/// Iterative or direct solve that did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Linearly dependent (or vanishing) constraint rows in a saddle problem.
class DegenerateConstraint : public std::runtime_error {
 public:
  DegenerateConstraint(const std::string& what, int row)
      : std::runtime_error(what), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

/// Square sparse matrix in CSR form. Symmetric operators are stored with
/// both triangles; column indices are sorted within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> vals);

  int size() const { return n_; }
  std::size_t nnz() const { return vals_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  double at(int i, int j) const;
  /// max |A_ij - A_ji|
  double asymmetry() const;
  /// Principal submatrix on the listed rows/columns (new index = position).
  CsrMatrix submatrix(std::span<const int> keep) const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// Triplet accumulator; duplicates are summed on finalize.
class SparseBuilder {
 public:
  explicit SparseBuilder(int n) : n_(n) {}
  void reserve(std::size_t count) { entries_.reserve(count); }
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  CsrMatrix build() const;

 private:
  struct Entry {
    int i, j;
    double v;
  };
  int n_;
  std::vector<Entry> entries_;
};

struct CgOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0: 10*n + 1000
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  /// Preconditioned residual norms r^T z per iteration (for diagnostics/tests).
  std::vector<double> history;
};

/// Jacobi-preconditioned conjugate gradient. Stops when
/// ||b - Ax||_2 <= tol ||b||_2; throws SolverError after max_iter.
CgResult cg_solve_detailed(const CsrMatrix& a, std::span<const double> b, const CgOptions& opts = {},
                           std::span<const double> x0 = {});
std::vector<double> cg_solve(const CsrMatrix& a, std::span<const double> b, double tol = 1e-10,
                             int max_iter = 0);

/// Sparse Cholesky (fill-reducing ordering, no pivoting) of an SPD matrix,
/// reusable for many right-hand sides.
class SpdFactorization {
 public:
  explicit SpdFactorization(const CsrMatrix& a);
  ~SpdFactorization();
  SpdFactorization(SpdFactorization&&) noexcept;
  SpdFactorization& operator=(SpdFactorization&&) noexcept;

  int size() const { return n_; }
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  int n_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Which inner SPD solver the saddle and local problems use.
enum class InnerSolver { Cholesky, Cg };

struct SaddleOptions {
  InnerSolver solver = InnerSolver::Cholesky;
  double cg_tol = 1e-10;
  /// Relative pivot threshold of the Schur complement below which the
  /// constraint rows are declared degenerate.
  double degenerate_tol = 1e-12;
};

struct SaddleResult {
  std::vector<double> x;
  std::vector<double> multipliers;
};

/// Minimizes 1/2 x^T K x - f^T x subject to C x = g by a Schur complement on
/// the k multipliers. K may be singular as long as ker K and ker C intersect
/// trivially: the solver works with K + rho C^T C, which has the same
/// constrained minimizer and the same multipliers. Stationarity reads
/// K x - f + C^T lambda = 0.
class SaddleSolver {
 public:
  SaddleSolver(const CsrMatrix& k, Eigen::MatrixXd c, const SaddleOptions& opts = {});
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  int constraint_count() const { return static_cast<int>(c_.rows()); }
  SaddleResult solve(std::span<const double> f, std::span<const double> g) const;
  /// Solve with f = 0 (one inner solve fewer).
  SaddleResult solve_constraints_only(std::span<const double> g) const;

 private:
  struct Impl;
  Eigen::MatrixXd c_;
  std::unique_ptr<Impl> impl_;
};

SaddleResult saddle_solve(const CsrMatrix& k, const Eigen::MatrixXd& c, std::span<const double> f,
                          std::span<const double> g, const SaddleOptions& opts = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace msfem

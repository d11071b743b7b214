#include "msfem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace msfem {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

CsrMatrix::CsrMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols,
                     std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const int* rp = row_ptr_.data();
  const int* ci = cols_.data();
  const double* v = vals_.data();
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[static_cast<std::size_t>(ci[k])];
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_));
  multiply(x, y);
  return y;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
  return d;
}

double CsrMatrix::at(int i, int j) const {
  const auto first = cols_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto last = cols_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = cols_[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(vals_[static_cast<std::size_t>(k)] - at(j, i)));
    }
  }
  return worst;
}

CsrMatrix CsrMatrix::submatrix(std::span<const int> keep) const {
  std::vector<int> new_index(static_cast<std::size_t>(n_), -1);
  for (std::size_t p = 0; p < keep.size(); ++p) new_index[static_cast<std::size_t>(keep[p])] = static_cast<int>(p);
  std::vector<int> rp{0};
  std::vector<int> ci;
  std::vector<double> v;
  rp.reserve(keep.size() + 1);
  for (int row : keep) {
    for (int k = row_ptr_[static_cast<std::size_t>(row)]; k < row_ptr_[static_cast<std::size_t>(row) + 1]; ++k) {
      const int j = new_index[static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)])];
      if (j < 0) continue;
      ci.push_back(j);
      v.push_back(vals_[static_cast<std::size_t>(k)]);
    }
    rp.push_back(static_cast<int>(ci.size()));
  }
  // keep may be unsorted; restore column order per row
  CsrMatrix out(static_cast<int>(keep.size()), std::move(rp), std::move(ci), std::move(v));
  if (!std::is_sorted(keep.begin(), keep.end())) {
    SparseBuilder b(out.size());
    for (int i = 0; i < out.size(); ++i) {
      for (int k = out.row_ptr_[static_cast<std::size_t>(i)]; k < out.row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
        b.add(i, out.cols_[static_cast<std::size_t>(k)], out.vals_[static_cast<std::size_t>(k)]);
      }
    }
    return b.build();
  }
  return out;
}

CsrMatrix SparseBuilder::build() const {
  std::vector<int> counts(static_cast<std::size_t>(n_) + 1, 0);
  for (const Entry& e : entries_) ++counts[static_cast<std::size_t>(e.i) + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<int> cols(entries_.size());
  std::vector<double> vals(entries_.size());
  std::vector<int> fill(counts.begin(), counts.end() - 1);
  for (const Entry& e : entries_) {
    const auto pos = static_cast<std::size_t>(fill[static_cast<std::size_t>(e.i)]++);
    cols[pos] = e.j;
    vals[pos] = e.v;
  }
  // sort each row by column and merge duplicates
  std::vector<int> rp{0};
  rp.reserve(static_cast<std::size_t>(n_) + 1);
  std::vector<int> out_cols;
  std::vector<double> out_vals;
  out_cols.reserve(entries_.size());
  out_vals.reserve(entries_.size());
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < n_; ++i) {
    row.clear();
    for (int k = counts[static_cast<std::size_t>(i)]; k < counts[static_cast<std::size_t>(i) + 1]; ++k) {
      row.emplace_back(cols[static_cast<std::size_t>(k)], vals[static_cast<std::size_t>(k)]);
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == out_cols.back() &&
          static_cast<int>(out_cols.size()) > rp.back()) {
        out_vals.back() += row[k].second;
      } else {
        out_cols.push_back(row[k].first);
        out_vals.push_back(row[k].second);
      }
    }
    rp.push_back(static_cast<int>(out_cols.size()));
  }
  return CsrMatrix(n_, std::move(rp), std::move(out_cols), std::move(out_vals));
}

CgResult cg_solve_detailed(const CsrMatrix& a, std::span<const double> b, const CgOptions& opts,
                           std::span<const double> x0) {
  const int n = a.size();
  const auto un = static_cast<std::size_t>(n);
  CgResult res;
  res.x.assign(un, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n + 1000;

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(b.begin(), b.end());
  if (!x0.empty()) {
    std::copy(x0.begin(), x0.end(), res.x.begin());
    const auto ax = a.multiply(res.x);
    for (std::size_t i = 0; i < un; ++i) r[i] -= ax[i];
  }
  std::vector<double> z(un), p(un), q(un);
  for (std::size_t i = 0; i < un; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = norm2(r);
  const double target = opts.tol * bnorm;
  int it = 0;
  while (rnorm > target) {
    if (it >= max_iter) {
      throw SolverError("cg_solve: no convergence, relative residual " +
                            std::to_string(rnorm / bnorm) + " after " + std::to_string(it) +
                            " iterations",
                        rnorm / bnorm, it);
    }
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw SolverError("cg_solve: operator is not positive definite", rnorm / bnorm, it);
    }
    const double alpha = rz / pq;
    double rr = 0.0;
    double rz_new = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = inv_diag[i] * r[i];
      rr += r[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < un; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(rr);
    res.history.push_back(rz);
    ++it;
  }
  res.iterations = it;
  res.relative_residual = rnorm / bnorm;
  return res;
}

std::vector<double> cg_solve(const CsrMatrix& a, std::span<const double> b, double tol,
                             int max_iter) {
  return cg_solve_detailed(a, b, CgOptions{tol, max_iter}).x;
}

// ---------------------------------------------------------------------------

struct SpdFactorization::Impl {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SpdFactorization::SpdFactorization(const CsrMatrix& a) : n_(a.size()), impl_(std::make_unique<Impl>()) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nnz() / 2 + static_cast<std::size_t>(n_));
  const auto& rp = a.row_ptr();
  const auto& ci = a.cols();
  const auto& v = a.values();
  for (int i = 0; i < n_; ++i) {
    for (int k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = ci[static_cast<std::size_t>(k)];
      if (j <= i) trips.emplace_back(i, j, v[static_cast<std::size_t>(k)]);
    }
  }
  Eigen::SparseMatrix<double> m(n_, n_);
  m.setFromTriplets(trips.begin(), trips.end());
  impl_->llt.compute(m);
  if (impl_->llt.info() != Eigen::Success) {
    throw SolverError("SpdFactorization: matrix is not positive definite", 0.0, 0);
  }
}

SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

std::vector<double> SpdFactorization::solve(std::span<const double> b) const {
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = impl_->llt.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

// ---------------------------------------------------------------------------

struct SaddleSolver::Impl {
  SaddleOptions opts;
  CsrMatrix augmented;
  std::unique_ptr<SpdFactorization> factor;
  double rho = 0.0;
  Eigen::MatrixXd y;  // n x k, augmented^{-1} C^T
  Eigen::LDLT<Eigen::MatrixXd> schur;

  std::vector<double> inner_solve(std::span<const double> b) const {
    if (factor) return factor->solve(b);
    return cg_solve(augmented, b, opts.cg_tol);
  }
};

SaddleSolver::SaddleSolver(const CsrMatrix& k, Eigen::MatrixXd c, const SaddleOptions& opts)
    : c_(std::move(c)), impl_(std::make_unique<Impl>()) {
  const int n = k.size();
  const auto rows = static_cast<int>(c_.rows());
  if (rows > 0 && c_.cols() != n) {
    throw std::invalid_argument("SaddleSolver: constraint width does not match the operator");
  }
  impl_->opts = opts;

  double max_row = 0.0;
  for (int i = 0; i < rows; ++i) {
    const double rn = c_.row(i).squaredNorm();
    if (rn == 0.0) throw DegenerateConstraint("SaddleSolver: constraint row is zero", i);
    max_row = std::max(max_row, rn);
  }

  if (rows == 0) {
    impl_->augmented = k;
  } else {
    const auto diag = k.diagonal();
    const double mean_diag = std::accumulate(diag.begin(), diag.end(), 0.0) / n;
    impl_->rho = mean_diag / max_row;
    SparseBuilder b(n);
    b.reserve(k.nnz() + static_cast<std::size_t>(rows) * 4096);
    const auto& rp = k.row_ptr();
    for (int i = 0; i < n; ++i) {
      for (int p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i) + 1]; ++p) {
        b.add(i, k.cols()[static_cast<std::size_t>(p)], k.values()[static_cast<std::size_t>(p)]);
      }
    }
    std::vector<int> support;
    for (int r = 0; r < rows; ++r) {
      support.clear();
      for (int j = 0; j < n; ++j) {
        if (c_(r, j) != 0.0) support.push_back(j);
      }
      for (int a : support) {
        for (int bb : support) b.add(a, bb, impl_->rho * c_(r, a) * c_(r, bb));
      }
    }
    impl_->augmented = b.build();
  }

  if (opts.solver == InnerSolver::Cholesky) {
    impl_->factor = std::make_unique<SpdFactorization>(impl_->augmented);
  }

  if (rows == 0) return;
  impl_->y.resize(n, rows);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < n; ++j) col[static_cast<std::size_t>(j)] = c_(r, j);
    const auto sol = impl_->inner_solve(col);
    impl_->y.col(r) = Eigen::Map<const Eigen::VectorXd>(sol.data(), n);
  }
  Eigen::MatrixXd s = c_ * impl_->y;
  s = 0.5 * (s + s.transpose()).eval();
  impl_->schur.compute(s);
  const Eigen::VectorXd d = impl_->schur.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  for (int i = 0; i < rows; ++i) {
    if (!(d(i) > opts.degenerate_tol * dmax)) {
      const int row = impl_->schur.transpositionsP().indices()(i);
      throw DegenerateConstraint("SaddleSolver: constraint rows are linearly dependent", row);
    }
  }
}

SaddleSolver::~SaddleSolver() = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

SaddleResult SaddleSolver::solve(std::span<const double> f, std::span<const double> g) const {
  const auto n = static_cast<Eigen::Index>(impl_->augmented.size());
  const auto rows = c_.rows();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  if (!f.empty() && norm2(f) > 0.0) {
    const auto sol = impl_->inner_solve(f);
    z = Eigen::Map<const Eigen::VectorXd>(sol.data(), n);
  }
  SaddleResult out;
  if (rows == 0) {
    out.x.assign(z.data(), z.data() + n);
    return out;
  }
  const Eigen::Map<const Eigen::VectorXd> gv(g.data(), rows);
  z += impl_->rho * (impl_->y * gv);
  const Eigen::VectorXd lambda = impl_->schur.solve(c_ * z - gv);
  const Eigen::VectorXd x = z - impl_->y * lambda;
  out.x.assign(x.data(), x.data() + n);
  out.multipliers.assign(lambda.data(), lambda.data() + rows);
  return out;
}

SaddleResult SaddleSolver::solve_constraints_only(std::span<const double> g) const {
  return solve({}, g);
}

SaddleResult saddle_solve(const CsrMatrix& k, const Eigen::MatrixXd& c, std::span<const double> f,
                          std::span<const double> g, const SaddleOptions& opts) {
  return SaddleSolver(k, c, opts).solve(f, g);
}

}  // namespace msfem

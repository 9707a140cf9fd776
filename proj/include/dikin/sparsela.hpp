#pragma once

// Sparse and dense linear-algebra kernels: CSR storage, matrix-vector
// products, weighted Gram assembly, and a dense symmetric (Cholesky)
// factorization with a log-determinant query. The dense path is the
// reference/oracle and initialization path; per-step work in the walk goes
// through matvec/matvec_t and low-rank corrections built on top of these.

#include <cstddef>
#include <vector>

#include "dikin/errors.hpp"

namespace dikin {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

struct CooEntry {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Within each row, column indices are strictly
// increasing; all values finite. The only sparse format in the library —
// polytope files carry COO triplets and are converted on load.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  static SparseMatrix from_coo(std::size_t n_rows, std::size_t n_cols,
                               std::vector<CooEntry> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  // y = M x
  Vector matvec(const Vector& x) const;
  void matvec(const Vector& x, Vector& y) const;
  // y = M^T x
  Vector matvec_t(const Vector& y) const;
  void matvec_t(const Vector& y, Vector& out) const;
  // row_dot(i, x) = (M x)[i] for a single row
  double row_dot(std::size_t i, const Vector& x) const;

 private:
  void check_invariants() const;

  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

// Positive diagonal of length m+d: inverse squared slacks for the constraint
// rows, the constant alpha/eta for the regularizer rows.
struct DiagWeights {
  Vector entries;

  DiagWeights() = default;
  explicit DiagWeights(Vector e);
  std::size_t size() const { return entries.size(); }
  double operator[](std::size_t i) const { return entries[i]; }
};

// Dense symmetric matrix, row-major full storage. Reference/oracle paths only.
struct DenseSym {
  std::size_t dim = 0;
  std::vector<double> entries;  // dim * dim

  DenseSym() = default;
  explicit DenseSym(std::size_t d) : dim(d), entries(d * d, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return entries[i * dim + j]; }
  double at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

// G = M^T C M as a dense symmetric matrix.
DenseSym gram(const SparseMatrix& m, const DiagWeights& c);

// Cholesky factorization G = L L^T of a symmetric positive definite matrix,
// supporting solves and log-determinant queries.
class Factorization {
 public:
  Factorization() = default;

  std::size_t dim() const { return dim_; }
  double log_det() const { return log_det_; }

  Vector solve(const Vector& v) const;
  void solve_in_place(Vector& v) const;
  // Solves L y = v only (forward substitution).
  void solve_lower_in_place(Vector& v) const;
  // Solves L^T x = v only (backward substitution).
  void solve_lower_transpose_in_place(Vector& v) const;

  friend Factorization factor(const DenseSym& g);

 private:
  std::size_t dim_ = 0;
  std::vector<double> lower_;  // row-major, lower triangle used
  double log_det_ = 0.0;
};

// Throws NotPositiveDefinite when a pivot is not strictly positive.
Factorization factor(const DenseSym& g);

// log det G via a fresh factorization.
double logdet_dense(const DenseSym& g);

// General dense LU with partial pivoting, for the small (possibly indefinite)
// capacitance systems of low-rank corrections.
class LuFactor {
 public:
  LuFactor() = default;
  // a is n x n row-major; throws NotPositiveDefinite on a singular pivot.
  static LuFactor factor(std::size_t n, std::vector<double> a);
  void solve_in_place(Vector& v) const;
  std::size_t dim() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace dikin

#include "dikin/sparsela.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dikin {

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  check_invariants();
}

void SparseMatrix::check_invariants() const {
  if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != values_.size() || col_indices_.size() != values_.size()) {
    throw DimensionMismatch("SparseMatrix: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) {
      throw DimensionMismatch("SparseMatrix: row offsets not monotone");
    }
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= n_cols_) throw DimensionMismatch("SparseMatrix: column out of range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
        throw DimensionMismatch("SparseMatrix: columns not strictly increasing in row " +
                                std::to_string(i));
      }
      if (!std::isfinite(values_[k])) throw DimensionMismatch("SparseMatrix: non-finite value");
    }
  }
}

SparseMatrix SparseMatrix::from_coo(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<CooEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col) {
      throw DimensionMismatch("from_coo: duplicate entry at (" + std::to_string(entries[k].row) +
                              ", " + std::to_string(entries[k].col) + ")");
    }
  }
  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(entries.size());
  vals.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row >= n_rows) throw DimensionMismatch("from_coo: row out of range");
    ++offsets[e.row + 1];
    cols.push_back(e.col);
    vals.push_back(e.value);
  }
  for (std::size_t i = 0; i < n_rows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  std::vector<double> vals(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
}

void SparseMatrix::matvec(const Vector& x, Vector& y) const {
  if (x.size() != n_cols_) throw DimensionMismatch("matvec: x has wrong length");
  y.assign(n_rows_, 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      s += values_[k] * x[col_indices_[k]];
    }
    y[i] = s;
  }
}

Vector SparseMatrix::matvec(const Vector& x) const {
  Vector y;
  matvec(x, y);
  return y;
}

void SparseMatrix::matvec_t(const Vector& y, Vector& out) const {
  if (y.size() != n_rows_) throw DimensionMismatch("matvec_t: y has wrong length");
  out.assign(n_cols_, 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out[col_indices_[k]] += values_[k] * yi;
    }
  }
}

Vector SparseMatrix::matvec_t(const Vector& y) const {
  Vector out;
  matvec_t(y, out);
  return out;
}

double SparseMatrix::row_dot(std::size_t i, const Vector& x) const {
  double s = 0.0;
  for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
    s += values_[k] * x[col_indices_[k]];
  }
  return s;
}

DiagWeights::DiagWeights(Vector e) : entries(std::move(e)) {
  for (double v : entries) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DimensionMismatch("DiagWeights: entries must be positive and finite");
    }
  }
}

DenseSym gram(const SparseMatrix& m, const DiagWeights& c) {
  if (c.size() != m.rows()) throw DimensionMismatch("gram: weight length != row count");
  DenseSym g(m.cols());
  const auto& off = m.row_offsets();
  const auto& col = m.col_indices();
  const auto& val = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double ci = c[i];
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const double w = ci * val[k];
      const std::size_t jk = col[k];
      for (std::size_t l = off[i]; l < off[i + 1]; ++l) {
        g.at(jk, col[l]) += w * val[l];
      }
    }
  }
  return g;
}

Factorization factor(const DenseSym& g) {
  Factorization f;
  const std::size_t n = g.dim;
  f.dim_ = n;
  f.lower_.assign(n * n, 0.0);
  f.log_det_ = 0.0;
  std::vector<double>& L = f.lower_;
  for (std::size_t j = 0; j < n; ++j) {
    double diag = g.at(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= L[j * n + k] * L[j * n + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw NotPositiveDefinite("factor: non-positive pivot at index " + std::to_string(j));
    }
    const double ljj = std::sqrt(diag);
    L[j * n + j] = ljj;
    f.log_det_ += 2.0 * std::log(ljj);
    const double inv = 1.0 / ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g.at(i, j);
      const double* Li = &L[i * n];
      const double* Lj = &L[j * n];
      for (std::size_t k = 0; k < j; ++k) s -= Li[k] * Lj[k];
      L[i * n + j] = s * inv;
    }
  }
  return f;
}

void Factorization::solve_lower_in_place(Vector& v) const {
  const std::size_t n = dim_;
  for (std::size_t i = 0; i < n; ++i) {
    double s = v[i];
    const double* Li = &lower_[i * n];
    for (std::size_t k = 0; k < i; ++k) s -= Li[k] * v[k];
    v[i] = s / Li[i];
  }
}

void Factorization::solve_lower_transpose_in_place(Vector& v) const {
  const std::size_t n = dim_;
  for (std::size_t i = n; i-- > 0;) {
    double s = v[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= lower_[k * n + i] * v[k];
    v[i] = s / lower_[i * n + i];
  }
}

void Factorization::solve_in_place(Vector& v) const {
  if (v.size() != dim_) throw DimensionMismatch("Factorization::solve: wrong length");
  solve_lower_in_place(v);
  solve_lower_transpose_in_place(v);
}

Vector Factorization::solve(const Vector& v) const {
  Vector x = v;
  solve_in_place(x);
  return x;
}

double logdet_dense(const DenseSym& g) { return factor(g).log_det(); }

LuFactor LuFactor::factor(std::size_t n, std::vector<double> a) {
  if (a.size() != n * n) throw DimensionMismatch("LuFactor: wrong storage size");
  LuFactor f;
  f.n_ = n;
  f.lu_ = std::move(a);
  f.perm_.resize(n);
  std::vector<double>& lu = f.lu_;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) {
      throw NotPositiveDefinite("LuFactor: singular pivot at index " + std::to_string(k));
    }
    f.perm_[k] = piv;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
    }
    const double inv = 1.0 / lu[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu[i * n + k] * inv;
      lu[i * n + k] = factor;
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= factor * lu[k * n + j];
    }
  }
  return f;
}

void LuFactor::solve_in_place(Vector& v) const {
  if (v.size() != n_) throw DimensionMismatch("LuFactor::solve: wrong length");
  for (std::size_t k = 0; k < n_; ++k) {
    std::swap(v[k], v[perm_[k]]);
    for (std::size_t i = k + 1; i < n_; ++i) v[i] -= lu_[i * n_ + k] * v[k];
  }
  for (std::size_t i = n_; i-- > 0;) {
    double s = v[i];
    for (std::size_t j = i + 1; j < n_; ++j) s -= lu_[i * n_ + j] * v[j];
    v[i] = s / lu_[i * n_ + i];
  }
}

}  // namespace dikin

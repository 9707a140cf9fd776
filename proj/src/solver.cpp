#include "dikin/solver.hpp"

#include <cmath>

namespace dikin {

SolverState::SolverState(const SparseMatrix& m, const DiagWeights& c, Backend backend,
                         SolverOptions options)
    : matrix_(&m), backend_(backend), options_(options) {
  if (c.size() != m.rows()) throw DimensionMismatch("SolverState: weight length != row count");
  current_weights_ = c.entries;
  refactor(c.entries);
}

void SolverState::refactor(const Vector& weights) {
  base_weights_ = weights;
  base_factor_ = factor(gram(*matrix_, DiagWeights(Vector(weights))));
  pending_rows_.clear();
  pending_delta_.clear();
  pending_columns_.clear();
  column_cache_.clear();
  ++refactor_count_;
}

void SolverState::update(const DiagWeights& c_new) {
  if (c_new.size() != base_weights_.size()) {
    throw DimensionMismatch("SolverState::update: weight length mismatch");
  }
  current_weights_ = c_new.entries;
  pending_rows_.clear();
  pending_delta_.clear();
  for (std::size_t i = 0; i < current_weights_.size(); ++i) {
    const double rel = std::abs(current_weights_[i] / base_weights_[i] - 1.0);
    if (rel > options_.eps_lowrank) {
      pending_rows_.push_back(i);
      pending_delta_.push_back(current_weights_[i] - base_weights_[i]);
    }
  }
  if (pending_rows_.empty()) return;
  if (backend_ == Backend::ExactRefactor || pending_rows_.size() > options_.k_max) {
    refactor(current_weights_);
    return;
  }
  rebuild_correction();
  ++lowrank_count_;
}

const Vector& SolverState::base_column(std::size_t row) {
  auto it = column_cache_.find(row);
  if (it != column_cache_.end()) return it->second;
  Vector col(matrix_->cols(), 0.0);
  const auto& off = matrix_->row_offsets();
  for (std::size_t k = off[row]; k < off[row + 1]; ++k) {
    col[matrix_->col_indices()[k]] = matrix_->values()[k];
  }
  base_factor_.solve_in_place(col);
  return column_cache_.emplace(row, std::move(col)).first->second;
}

void SolverState::rebuild_correction() {
  const std::size_t k = pending_rows_.size();
  pending_columns_.resize(k);
  for (std::size_t j = 0; j < k; ++j) pending_columns_[j] = &base_column(pending_rows_[j]);
  // cap = diag(1/delta) + A_R G0^{-1} A_R^T
  std::vector<double> cap(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      cap[i * k + j] = matrix_->row_dot(pending_rows_[i], *pending_columns_[j]);
    }
    cap[i * k + i] += 1.0 / pending_delta_[i];
  }
  cap_ = LuFactor::factor(k, std::move(cap));
}

void SolverState::correct_in_place(Vector& y) const {
  const std::size_t k = pending_rows_.size();
  if (k == 0) return;
  Vector r(k);
  for (std::size_t i = 0; i < k; ++i) r[i] = matrix_->row_dot(pending_rows_[i], y);
  cap_.solve_in_place(r);
  for (std::size_t j = 0; j < k; ++j) {
    const Vector& col = *pending_columns_[j];
    const double s = r[j];
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= s * col[i];
  }
}

Vector SolverState::solve_represented(const Vector& v) const {
  if (v.size() != matrix_->cols()) throw DimensionMismatch("SolverState::solve: len(v) != d");
  solve_count_.fetch_add(1, std::memory_order_relaxed);
  Vector w = base_factor_.solve(v);
  correct_in_place(w);
  const double vnorm = norm2(v);
  if (vnorm == 0.0) return w;
  Vector residual(v.size()), gv(v.size());
  for (int pass = 0; pass < options_.max_refine; ++pass) {
    apply_represented(w, gv);
    for (std::size_t i = 0; i < v.size(); ++i) residual[i] = v[i] - gv[i];
    if (norm2(residual) <= options_.solve_tol * vnorm) break;
    Vector corr = base_factor_.solve(residual);
    correct_in_place(corr);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += corr[i];
  }
  return w;
}

void SolverState::apply_represented(const Vector& x, Vector& out) const {
  // out = M^T C_repr M x with C_repr = base overridden on the pending rows.
  Vector mx = matrix_->matvec(x);
  for (std::size_t i = 0; i < mx.size(); ++i) mx[i] *= base_weights_[i];
  for (std::size_t j = 0; j < pending_rows_.size(); ++j) {
    const std::size_t r = pending_rows_[j];
    mx[r] += pending_delta_[j] * matrix_->row_dot(r, x);
  }
  matrix_->matvec_t(mx, out);
}

Vector SolverState::solve(const Vector& v, const DiagWeights& c) const {
  if (c.size() != current_weights_.size()) {
    throw DimensionMismatch("SolverState::solve: weight length mismatch");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i] - current_weights_[i]) > options_.stale_tol * current_weights_[i]) {
      throw StaleState("SolverState::solve: weights disagree with the represented state at row " +
                       std::to_string(i) + "; call update first");
    }
  }
  return solve_represented(v);
}

double frobenius_change(const DiagWeights& c_old, const DiagWeights& c_new) {
  if (c_old.size() != c_new.size()) throw DimensionMismatch("frobenius_change: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < c_old.size(); ++i) {
    const double r = (c_new[i] - c_old[i]) / c_old[i];
    acc += r * r;
  }
  return acc;
}

}  // namespace dikin

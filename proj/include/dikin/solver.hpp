#pragma once

// Maintained linear-system solver for the sequence of matrices M^T C^(k) M
// with slowly changing positive diagonals C^(k), behind an
// Initialize/Update/Solve contract.
//
// Two backends:
//  - ExactRefactor: every weight change triggers a full refactorization.
//    Always exact; the reference.
//  - WoodburyIncremental: rows whose relative weight change against the last
//    full factorization exceeds eps_lowrank get an exact rank-k Woodbury
//    correction; the correction set overflowing k_max forces a
//    refactorization. Rows below the threshold are represented by their base
//    weights, which perturbs the operator by at most ~eps_lowrank in relative
//    spectral terms.
//
// A state is single-writer: update() mutates, solve() is read-only and may
// run concurrently with other solves.

#include <atomic>
#include <cstdint>
#include <unordered_map>

#include "dikin/sparsela.hpp"

namespace dikin {

enum class Backend { ExactRefactor, WoodburyIncremental };

struct SolverOptions {
  std::size_t k_max = 64;
  double eps_lowrank = 1e-3;
  // Relative disagreement beyond which solve() declares the caller stale.
  double stale_tol = 1e-12;
  // Target relative residual against the represented operator.
  double solve_tol = 1e-9;
  int max_refine = 2;
};

struct SolverStats {
  std::uint64_t full_refactorizations = 0;
  std::uint64_t lowrank_updates = 0;
  std::uint64_t solves = 0;
};

class SolverState {
 public:
  // Full factorization of M^T C M; M must have full column rank (otherwise
  // NotPositiveDefinite). M is borrowed and must outlive the state.
  SolverState(const SparseMatrix& m, const DiagWeights& c, Backend backend,
              SolverOptions options = {});

  // Re-points the state at the new weights. Exact bookkeeping of the
  // represented weights; factor work per the backend policy.
  void update(const DiagWeights& c_new);

  // w with ||(M^T C M) w - v|| small relative to ||v||, where C are the
  // weights this state represents. Throws StaleState when c disagrees with
  // the represented weights beyond stale_tol.
  Vector solve(const Vector& v, const DiagWeights& c) const;

  // Solve against the represented operator without the staleness check
  // (internal/trusted callers).
  Vector solve_represented(const Vector& v) const;

  const SparseMatrix& matrix() const { return *matrix_; }
  Backend backend() const { return backend_; }
  const SolverOptions& options() const { return options_; }
  SolverStats stats() const {
    return {refactor_count_, lowrank_count_, solve_count_.load(std::memory_order_relaxed)};
  }
  const Vector& base_weights() const { return base_weights_; }
  const Vector& current_weights() const { return current_weights_; }
  const Factorization& base_factor() const { return base_factor_; }
  std::size_t pending_count() const { return pending_rows_.size(); }
  const std::vector<std::size_t>& pending_rows() const { return pending_rows_; }

  // Cached column G0^{-1} (row r of M)^T against the current base
  // factorization; computed on first use. Single-writer like update().
  const Vector& base_column(std::size_t row);

 private:
  void refactor(const Vector& weights);
  void rebuild_correction();
  // y <- y - V cap^{-1} (A_R y applied implicitly); full Woodbury apply.
  void correct_in_place(Vector& y) const;
  void apply_represented(const Vector& x, Vector& out) const;

  const SparseMatrix* matrix_;
  Backend backend_;
  SolverOptions options_;
  Vector base_weights_;
  Vector current_weights_;
  Factorization base_factor_;
  std::vector<std::size_t> pending_rows_;
  Vector pending_delta_;  // current - base per pending row
  std::unordered_map<std::size_t, Vector> column_cache_;
  std::vector<const Vector*> pending_columns_;
  LuFactor cap_;
  std::uint64_t refactor_count_ = 0;
  std::uint64_t lowrank_count_ = 0;
  mutable std::atomic<std::uint64_t> solve_count_{0};
};

// sum_i ((c_new_i - c_old_i) / c_old_i)^2, the slow-change statistic;
// equals ||(C' - C) C^{-1}||_F^2.
double frobenius_change(const DiagWeights& c_old, const DiagWeights& c_new);

}  // namespace dikin

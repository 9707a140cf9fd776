#pragma once

// Randomized estimation of Delta = log det Phi(z) - log det Phi(theta) and
// conversion of i.i.d. Delta-estimates into a nearly unbiased estimate of the
// smoothed determinantal acceptance factor B(Delta) = sigmoid(Delta/2).
//
// One draw: v ~ N(0, I_d), t ~ uniform[0,1], C(t) = (1-t) D(theta) + t D(z),
//   Y = v^T (Ahat^T C(t) Ahat)^{-1} Ahat^T (D(z) - D(theta)) Ahat v,
// so that E[Y] = log det(Ahat^T D(z) Ahat) - log det(Ahat^T D(theta) Ahat)
// (the line integral of d/dt log det along the interpolation; alpha factors
// cancel in the difference).
//
// Independent draws make E[prod_{j<=l} Y_j] = Delta^l, which is what lets the
// truncated series for sigmoid(Delta/2) stay nearly unbiased — plugging a
// single estimate into a nonlinear function would not be.

#include <cstdint>
#include <vector>

#include "dikin/barrier.hpp"
#include "dikin/rng.hpp"
#include "dikin/solver.hpp"

namespace dikin {

struct EstimatorSample {
  double y = 0.0;
  std::uint64_t step = 0;  // RNG substream identifiers of the latent (v, t)
  std::uint64_t draw = 0;
};

enum class BranchKind { TaylorAtZero, ExponentialAtInfinity, SaturateOne };

// Selection is a pure function of Y_1 and gamma:
//   Y_1 <  1/4               -> TaylorAtZero
//   1/4 <= Y_1 < 2 log(1/gamma) -> ExponentialAtInfinity
//   otherwise                -> SaturateOne
struct SeriesBranch {
  BranchKind kind = BranchKind::TaylorAtZero;
  double y1 = 0.0;
  double gamma = 0.0;
};

SeriesBranch select_branch(double y1, double gamma);

// ceil(10 log(1/gamma)), floored at 1.
std::size_t default_sample_count(double gamma);

// Taylor coefficients c_0..c_n of sigmoid(t/2) at 0, from the derivative
// recursion sigma' = sigma (1 - sigma). Cached; thread-safe.
std::vector<double> sigmoid_half_taylor(std::size_t n);

// Outer truncation of the exponential branch. Capped at 2n-1; within the cap
// it stops once the geometric tail at the observed scale is below gamma,
// which also keeps every inner argument k*Delta/2 within the range the
// n-term inner Taylor resolves.
std::size_t exponential_outer_terms(double y1, double gamma, std::size_t n);

struct FactorEstimate {
  double x_raw = 0.0;      // truncated-series estimate before clamping
  double x = 0.0;          // min(max(x_raw, 0), 1)
  BranchKind branch = BranchKind::TaylorAtZero;
  std::size_t outer_terms = 0;
};

// samples are i.i.d. with common mean Delta; samples[0] is Y_1.
FactorEstimate estimate_factor(const std::vector<EstimatorSample>& samples,
                               const SeriesBranch& branch, std::size_t n);

// The same truncated series evaluated at scalar delta (every Y_j = delta);
// deterministic, used to pin the truncation error.
double series_value_at(double delta, const SeriesBranch& branch, std::size_t n);

// Per-step sampler of Y. Precomputes the correction structures against the
// walk solver's base factorization once, then serves independent draws.
//
// With the WoodburyIncremental backend the corrected row set R holds the rows
// whose endpoint weights differ relatively from the base by more than
// eps_lowrank (largest first, capped at k_max); both the interpolated solve
// diagonal and the numerator difference are restricted to R, so each draw is
// exactly unbiased for the logdet difference of the represented pair. When
// every changed row fits in R (in particular whenever m+d <= k_max) that pair
// is the true one. With ExactRefactor the interpolated system is assembled
// and factorized per draw.
class DeltaEstimator {
 public:
  DeltaEstimator(const SparseMatrix& aug, SolverState& p_state, const DiagWeights& d_theta,
                 const DiagWeights& d_z);

  EstimatorSample sample(RngStream& v_stream, RngStream& t_stream) const;
  std::size_t correction_rank() const { return rows_.size(); }
  bool truncated() const { return truncated_; }

 private:
  const SparseMatrix* aug_;
  const SolverState* state_;
  const DiagWeights* d_theta_;
  const DiagWeights* d_z_;
  bool exact_backend_;
  bool truncated_ = false;
  // Woodbury path: corrected rows with their endpoint weights, base columns,
  // and the reusable A_R G0^{-1} A_R^T block of the capacitance matrix.
  std::vector<std::size_t> rows_;
  Vector row_theta_, row_z_, row_base_;
  std::vector<const Vector*> columns_;
  std::vector<double> cap_block_;
};

// One-shot convenience wrapper around DeltaEstimator.
EstimatorSample sample_delta(const BarrierPoint& bp_theta, const BarrierPoint& bp_z,
                             const SparseMatrix& aug, SolverState& solver, std::uint64_t seed,
                             std::uint64_t step, std::uint64_t draw);

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace dikin

#pragma once

// The soft-threshold Dikin walk. Proposals are Gaussian with covariance
// Phi(theta)^{-1}; acceptance is the lazy smoothed rule
//
//   p = 1/2 * sigmoid(Delta/2)
//       * min(exp(f(theta) - f(z) + ||z-theta||^2_{Phi(theta)}/2
//                                 - ||theta-z||^2_{Phi(z)}/2), 1),
//
// with Delta = log det Phi(z) - log det Phi(theta). This is the unique
// scaling satisfying detailed balance against the proposal density with
// covariance Phi(.)^{-1}. Exact mode evaluates Delta with dense
// log-determinants; estimated mode runs the randomized series estimator.
//
// All randomness comes from counter-based substreams keyed by
// (seed, purpose, step, draw), so a chain is a pure function of its config
// and matched-seed chains share proposal and acceptance draws across modes.

#include <cstdint>
#include <functional>
#include <vector>

#include "dikin/barrier.hpp"
#include "dikin/logdet_estimator.hpp"
#include "dikin/polytope.hpp"
#include "dikin/rng.hpp"
#include "dikin/solver.hpp"
#include "dikin/target.hpp"

namespace dikin {

enum class Mode { Exact, Estimated };

// Leading constants of the hyperparameter schedule. The paper profile keeps
// the published constants; the practical profile scales them down for
// desk-scale runs while preserving every formula shape.
struct ProfileConstants {
  double c_gamma = 1e20;
  double c_alpha = 1e5;
  double c_eta = 1e4;
  double c_t = 1e9;

  static ProfileConstants paper() { return {1e20, 1e5, 1e4, 1e9}; }
  static ProfileConstants practical() { return {1.0, 10.0, 10.0, 50.0}; }
};

struct WalkConfig {
  BarrierParams params;
  double gamma = 1e-3;
  std::uint64_t steps = 0;
  std::size_t n_samples = 1;
  Mode mode = Mode::Exact;
  std::uint64_t seed = 0;
  Backend backend = Backend::ExactRefactor;
  SolverOptions solver;
  // Scales the determinantal exponent inside step()'s acceptance (the factor
  // becomes sigmoid(scale * Delta/2)). Any value != 1 breaks detailed balance
  // and tilts the stationary law toward det(Phi)^((scale-1)/2); exists so the
  // validation suite can prove it catches a broken acceptance rule. A plain
  // multiplier on the lazy probability would cancel in the detailed-balance
  // ratio and leave the stationary law untouched.
  double det_exponent_scale = 1.0;
};

// The schedule:
//   gamma = delta / (c_gamma (md + L^2 R^2) log^1.02(w/delta))   [Lipschitz]
//   gamma = delta / (c_gamma (md + beta R^2) log^1.01(w/delta))  [smooth]
//   alpha = 1 / (c_alpha d log(1/gamma))
//   eta   = 1 / (c_eta d L^2)   resp.   1 / (c_eta d beta)
//   T     = c_t (2m/alpha + R^2/eta) log(w/delta) log^1.01(of the same)
//   N     = ceil(10 log(1/gamma))
// gamma_override > 0 bypasses the gamma formula (alpha, T, N still follow).
WalkConfig hyperparams(std::size_t m, std::size_t d, double radius, const TargetFunction& target,
                       double warmness, double delta,
                       const ProfileConstants& prof = ProfileConstants::paper(),
                       double gamma_override = 0.0);

struct WalkDiagnostics {
  std::uint64_t steps = 0;
  std::uint64_t accepts = 0;
  std::uint64_t rejects_outside = 0;
  std::uint64_t rejects_mh = 0;
  double fr_sum = 0.0;
  double fr_max = 0.0;
  std::uint64_t fr_count = 0;
  std::uint64_t fr_accept_over_one = 0;  // accepted steps with frobenius_ratio > 1
  std::vector<float> fr_trace;           // per interior proposal, stride-subsampled
  std::uint64_t fr_stride = 1;

  double acceptance_rate() const { return steps ? double(accepts) / double(steps) : 0.0; }
  double out_of_k_rate() const { return steps ? double(rejects_outside) / double(steps) : 0.0; }
  void record_fr(double fr);
};

class DikinWalk {
 public:
  DikinWalk(const Polytope& p, TargetFunction target, WalkConfig cfg, const Vector& theta0);

  const Vector& theta() const { return bp_.theta; }
  const BarrierPoint& barrier_point() const { return bp_; }
  double f_value() const { return f_; }
  std::uint64_t step_index() const { return step_index_; }
  const WalkConfig& config() const { return cfg_; }
  const SparseMatrix& augmented() const { return aug_; }
  const SolverState& solver_state() const { return pstate_; }
  const WalkDiagnostics& diagnostics() const { return diag_; }

  // One Markov chain step; true iff the proposal was accepted.
  bool step();

  // The proposal the next step() will draw (pure function of seed and
  // step_index, so calling this does not perturb the chain).
  Vector upcoming_proposal() const;
  // Deterministic proposal map z = theta + sqrt(alpha) (Ahat^T D Ahat)^{-1}
  // Ahat^T D^{1/2} xi for a given xi (test surface).
  Vector propose_from_xi(const Vector& xi) const;

  // Acceptance probability of z from the current state, exact rule.
  // Throws NotInterior for exterior z.
  double accept_prob_exact(const Vector& z) const;
  // Realized acceptance probability of the estimated rule: draws the
  // n_samples estimator samples of the given step index and assembles
  // 1/2 min(max(X,0),1) min(exp-term, 1).
  double accept_prob_estimated(const Vector& z, std::uint64_t step_index);
  // Bernoulli outcome of the estimated rule using the step's accept stream.
  bool accept_bernoulli_estimated(const Vector& z, std::uint64_t step_index);

 private:
  struct Evaluation {
    BarrierPoint bp;
    double f = 0.0;
    double exp_term = 0.0;  // min(exp(...), 1)
    double logdet = 0.0;    // exact mode only
  };
  Evaluation evaluate_proposal(const Vector& z, bool need_logdet) const;
  double estimated_det_factor(const BarrierPoint& bp_z, std::uint64_t step_index);
  double eval_target(const Vector& theta) const;

  const Polytope* p_;
  SparseMatrix aug_;
  TargetFunction target_;
  WalkConfig cfg_;
  BarrierPoint bp_;
  double f_ = 0.0;
  double logdet_theta_ = 0.0;
  SolverState pstate_;
  std::uint64_t step_index_ = 0;
  WalkDiagnostics diag_;
};

struct RunOptions {
  std::uint64_t steps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  bool keep_trace = true;
  // Called on every post-burn-in step (before thinning is applied to the
  // stored trace), for streaming statistics.
  std::function<void(const DikinWalk&)> on_step;
};

struct RunResult {
  Vector final_theta;
  std::vector<Vector> trace;
  WalkDiagnostics diagnostics;
  SolverStats solver;
  double wall_ms_total = 0.0;
  double step_ms_mean = 0.0;
  double step_ms_median = 0.0;
};

RunResult run_chain(DikinWalk& walk, const RunOptions& opts);

}  // namespace dikin

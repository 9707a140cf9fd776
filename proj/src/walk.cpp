#include "dikin/walk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dikin {

WalkConfig hyperparams(std::size_t m, std::size_t d, double radius, const TargetFunction& target,
                       double warmness, double delta, const ProfileConstants& prof,
                       double gamma_override) {
  if (m < 1 || d < 1) throw ConfigError("polytope", "m >= 1 and d >= 1 required");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("R", "must be positive");
  if (!(warmness >= 1.0)) throw ConfigError("warmness", "must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  if (!(target.constant > 0.0)) throw ConfigError("target", "regularity constant must be positive");

  const bool lipschitz = target.regularity == TargetFunction::Regularity::Lipschitz;
  const double reg2 = lipschitz ? target.constant * target.constant : target.constant;
  const double log_wd = std::log(warmness / delta);

  WalkConfig cfg;
  if (gamma_override > 0.0) {
    if (!(gamma_override < 1.0)) throw ConfigError("gamma", "must lie in (0, 1)");
    cfg.gamma = gamma_override;
  } else {
    const double size_term = static_cast<double>(m) * static_cast<double>(d) +
                             reg2 * radius * radius;
    cfg.gamma = delta / (prof.c_gamma * size_term * std::pow(log_wd, lipschitz ? 1.02 : 1.01));
    cfg.gamma = std::min(cfg.gamma, 0.5);
  }
  const double log_inv_gamma = std::log(1.0 / cfg.gamma);
  cfg.params = BarrierParams(1.0 / (prof.c_alpha * static_cast<double>(d) * log_inv_gamma),
                             1.0 / (prof.c_eta * static_cast<double>(d) * reg2));
  const double t_base =
      prof.c_t * (2.0 * static_cast<double>(m) / cfg.params.alpha + radius * radius / cfg.params.eta) *
      log_wd;
  const double t = t_base * std::pow(std::max(std::log(t_base), 1.0), 1.01);
  cfg.steps = t > 4e18 ? static_cast<std::uint64_t>(4e18) : static_cast<std::uint64_t>(std::ceil(t));
  cfg.n_samples = default_sample_count(cfg.gamma);
  return cfg;
}

void WalkDiagnostics::record_fr(double fr) {
  fr_sum += fr;
  fr_max = std::max(fr_max, fr);
  ++fr_count;
  if (fr_count % fr_stride == 0) {
    fr_trace.push_back(static_cast<float>(fr));
    if (fr_trace.size() >= (1u << 21)) {
      // halve the trace, double the stride; keeps memory bounded on long runs
      std::size_t w = 0;
      for (std::size_t i = 0; i < fr_trace.size(); i += 2) fr_trace[w++] = fr_trace[i];
      fr_trace.resize(w);
      fr_stride *= 2;
    }
  }
}

DikinWalk::DikinWalk(const Polytope& p, TargetFunction target, WalkConfig cfg,
                     const Vector& theta0)
    : p_(&p),
      aug_(p.augmented()),
      target_(std::move(target)),
      cfg_(cfg),
      bp_(weights_at(p, cfg.params, theta0)),
      pstate_(aug_, bp_.weights, cfg.backend, cfg.solver) {
  f_ = eval_target(theta0);
  if (cfg_.mode == Mode::Exact) logdet_theta_ = logdet_phi_exact(aug_, bp_, cfg_.params);
  if (cfg_.n_samples < 1) throw ConfigError("n_samples", "must be >= 1");
}

double DikinWalk::eval_target(const Vector& theta) const {
  const double v = target_.eval(theta);
  if (!std::isfinite(v)) throw TargetEvaluationError("target returned a non-finite value");
  return v;
}

Vector DikinWalk::propose_from_xi(const Vector& xi) const {
  const std::size_t md = aug_.rows();
  if (xi.size() != md) throw DimensionMismatch("propose_from_xi: len(xi) != m+d");
  Vector scaled(md);
  for (std::size_t i = 0; i < md; ++i) scaled[i] = std::sqrt(bp_.weights[i]) * xi[i];
  Vector u = aug_.matvec_t(scaled);
  Vector w = pstate_.solve(u, bp_.weights);
  const double root_alpha = std::sqrt(cfg_.params.alpha);
  Vector z = bp_.theta;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += root_alpha * w[i];
  return z;
}

Vector DikinWalk::upcoming_proposal() const {
  RngStream xi_stream(cfg_.seed, StreamPurpose::Proposal, step_index_);
  Vector xi(aug_.rows());
  for (double& v : xi) v = xi_stream.gaussian();
  return propose_from_xi(xi);
}

DikinWalk::Evaluation DikinWalk::evaluate_proposal(const Vector& z, bool need_logdet) const {
  Evaluation ev;
  ev.bp = weights_at(*p_, cfg_.params, z);
  ev.f = eval_target(z);
  Vector diff(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - bp_.theta[i];
  const double nf = local_norm_sq(aug_, bp_, cfg_.params, diff);
  const double nb = local_norm_sq(aug_, ev.bp, cfg_.params, diff);
  const double exponent = f_ - ev.f + 0.5 * nf - 0.5 * nb;
  ev.exp_term = std::min(std::exp(exponent), 1.0);
  if (need_logdet) ev.logdet = logdet_phi_exact(aug_, ev.bp, cfg_.params);
  return ev;
}

double DikinWalk::accept_prob_exact(const Vector& z) const {
  if (!p_->contains_interior(z)) throw NotInterior("accept_prob_exact: z outside the interior");
  Evaluation ev = evaluate_proposal(z, true);
  const double base = (cfg_.mode == Mode::Exact)
                          ? logdet_theta_
                          : logdet_phi_exact(aug_, bp_, cfg_.params);
  const double delta = ev.logdet - base;
  return 0.5 * sigmoid(0.5 * delta) * ev.exp_term;
}

double DikinWalk::estimated_det_factor(const BarrierPoint& bp_z, std::uint64_t step_index) {
  DeltaEstimator est(aug_, pstate_, bp_.weights, bp_z.weights);
  std::vector<EstimatorSample> samples;
  samples.reserve(cfg_.n_samples);
  for (std::size_t j = 1; j <= cfg_.n_samples; ++j) {
    RngStream v(cfg_.seed, StreamPurpose::EstimatorV, step_index, j);
    RngStream t(cfg_.seed, StreamPurpose::EstimatorT, step_index, j);
    EstimatorSample s = est.sample(v, t);
    s.step = step_index;
    s.draw = j;
    samples.push_back(s);
  }
  const SeriesBranch branch = select_branch(samples[0].y, cfg_.gamma);
  return estimate_factor(samples, branch, cfg_.n_samples).x;
}

double DikinWalk::accept_prob_estimated(const Vector& z, std::uint64_t step_index) {
  if (!p_->contains_interior(z)) throw NotInterior("accept_prob_estimated: z outside the interior");
  Evaluation ev = evaluate_proposal(z, false);
  return 0.5 * estimated_det_factor(ev.bp, step_index) * ev.exp_term;
}

bool DikinWalk::accept_bernoulli_estimated(const Vector& z, std::uint64_t step_index) {
  const double p = accept_prob_estimated(z, step_index);
  return RngStream(cfg_.seed, StreamPurpose::Accept, step_index).uniform01() < p;
}

bool DikinWalk::step() {
  const Vector z = upcoming_proposal();
  bool accepted = false;
  if (!p_->contains_interior(z)) {
    ++diag_.rejects_outside;
  } else {
    Evaluation ev = evaluate_proposal(z, cfg_.mode == Mode::Exact);
    double det_factor;
    if (cfg_.mode == Mode::Exact) {
      det_factor = sigmoid(cfg_.det_exponent_scale * 0.5 * (ev.logdet - logdet_theta_));
    } else {
      det_factor = estimated_det_factor(ev.bp, step_index_);
    }
    const double p = 0.5 * det_factor * ev.exp_term;
    const double fr = frobenius_ratio(bp_, ev.bp);
    diag_.record_fr(fr);
    const double u = RngStream(cfg_.seed, StreamPurpose::Accept, step_index_).uniform01();
    if (u < p) {
      pstate_.update(ev.bp.weights);
      bp_ = std::move(ev.bp);
      f_ = ev.f;
      if (cfg_.mode == Mode::Exact) logdet_theta_ = ev.logdet;
      ++diag_.accepts;
      if (fr > 1.0) ++diag_.fr_accept_over_one;
      accepted = true;
    } else {
      ++diag_.rejects_mh;
    }
  }
  ++step_index_;
  ++diag_.steps;
  return accepted;
}

RunResult run_chain(DikinWalk& walk, const RunOptions& opts) {
  using clock = std::chrono::steady_clock;
  RunResult res;
  std::vector<float> step_ms;
  step_ms.reserve(std::min<std::uint64_t>(opts.steps, 1u << 21));
  std::size_t time_stride = 1;
  const auto t0 = clock::now();
  for (std::uint64_t i = 0; i < opts.steps; ++i) {
    const auto s0 = clock::now();
    walk.step();
    const auto s1 = clock::now();
    const double ms = std::chrono::duration<double, std::milli>(s1 - s0).count();
    res.step_ms_mean += ms;
    if (i % time_stride == 0) {
      step_ms.push_back(static_cast<float>(ms));
      if (step_ms.size() >= (1u << 21)) {
        std::size_t w = 0;
        for (std::size_t k = 0; k < step_ms.size(); k += 2) step_ms[w++] = step_ms[k];
        step_ms.resize(w);
        time_stride *= 2;
      }
    }
    if (i >= opts.burn_in) {
      if (opts.on_step) opts.on_step(walk);
      if (opts.keep_trace && (i - opts.burn_in) % opts.thin == 0) {
        res.trace.push_back(walk.theta());
      }
    }
  }
  res.wall_ms_total = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  res.step_ms_mean = opts.steps ? res.step_ms_mean / static_cast<double>(opts.steps) : 0.0;
  if (!step_ms.empty()) {
    auto mid = step_ms.begin() + step_ms.size() / 2;
    std::nth_element(step_ms.begin(), mid, step_ms.end());
    res.step_ms_median = *mid;
  }
  res.final_theta = walk.theta();
  res.diagnostics = walk.diagnostics();
  res.solver = walk.solver_state().stats();
  return res;
}

}  // namespace dikin

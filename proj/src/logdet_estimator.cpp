#include "dikin/logdet_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace dikin {

SeriesBranch select_branch(double y1, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw ConfigError("gamma", "branch selection needs gamma in (0, 1)");
  }
  SeriesBranch b;
  b.y1 = y1;
  b.gamma = gamma;
  if (y1 < 0.25) {
    b.kind = BranchKind::TaylorAtZero;
  } else if (y1 < 2.0 * std::log(1.0 / gamma)) {
    b.kind = BranchKind::ExponentialAtInfinity;
  } else {
    b.kind = BranchKind::SaturateOne;
  }
  return b;
}

std::size_t default_sample_count(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw ConfigError("gamma", "needs gamma in (0, 1)");
  const double n = std::ceil(10.0 * std::log(1.0 / gamma));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

std::vector<double> sigmoid_half_taylor(std::size_t n) {
  static std::mutex mu;
  static std::vector<long double> sigma_coeffs;  // Taylor of sigmoid(t) at 0
  std::lock_guard<std::mutex> lock(mu);
  if (sigma_coeffs.empty()) sigma_coeffs.push_back(0.5L);
  while (sigma_coeffs.size() <= n) {
    // (k+1) a_{k+1} = a_k - sum_{i=0}^{k} a_i a_{k-i}  (from sigma' = sigma - sigma^2)
    const std::size_t k = sigma_coeffs.size() - 1;
    long double conv = 0.0L;
    for (std::size_t i = 0; i <= k; ++i) conv += sigma_coeffs[i] * sigma_coeffs[k - i];
    sigma_coeffs.push_back((sigma_coeffs[k] - conv) / static_cast<long double>(k + 1));
  }
  std::vector<double> c(n + 1);
  long double half_pow = 1.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    c[k] = static_cast<double>(sigma_coeffs[k] * half_pow);
    half_pow *= 0.5L;
  }
  return c;
}

std::size_t exponential_outer_terms(double y1, double gamma, std::size_t n) {
  // Last outer index K: geometric tail sum_{k>K} e^{-k*Delta/2} <= ~gamma at
  // the observed scale Delta ~ y1, while K*y1/2 <= ~ln(1/gamma)+3 keeps the
  // n-term inner Taylor sharp. Hard cap 2n-1.
  const double scale = std::max(y1, 0.25);
  const double k_stop = std::ceil(2.0 * (std::log(1.0 / gamma) + 3.0) / scale);
  const std::size_t cap = 2 * n - 1;
  if (!(k_stop > 1.0)) return 1;
  return std::min(cap, static_cast<std::size_t>(k_stop));
}

namespace {

double clamp01(double x) {
  if (std::isnan(x)) return 0.0;  // sign of a blown-up series carries no information
  return std::min(std::max(x, 0.0), 1.0);
}

// X = sum_{l<=n} c_l prod_{j<=l} Y_j
template <typename YAt>
double taylor_estimate(const YAt& y, std::size_t n) {
  const std::vector<double> c = sigmoid_half_taylor(n);
  long double x = c[0];
  long double prod = 1.0L;
  for (std::size_t l = 1; l <= n; ++l) {
    prod *= y(l - 1);
    if (!std::isfinite(static_cast<double>(prod))) break;
    x += c[l] * prod;
  }
  return static_cast<double>(x);
}

// X = sum_{k=0}^{K} (-1)^k Ehat[e^{-k Delta/2}],
// Ehat[e^{-k Delta/2}] = sum_{l<=n} (1/l!) prod_{j<=l} (-k Y_j / 2)
template <typename YAt>
double exponential_estimate(const YAt& y, std::size_t n, std::size_t outer_last) {
  long double x = 0.0L;
  double sign = 1.0;
  for (std::size_t k = 0; k <= outer_last; ++k, sign = -sign) {
    long double ek = 1.0L;
    long double term = 1.0L;
    for (std::size_t l = 1; l <= n; ++l) {
      term *= static_cast<long double>(-0.5 * static_cast<double>(k) * y(l - 1)) /
              static_cast<long double>(l);
      ek += term;
    }
    if (!std::isfinite(static_cast<double>(ek))) break;
    x += sign * ek;
  }
  return static_cast<double>(x);
}

}  // namespace

FactorEstimate estimate_factor(const std::vector<EstimatorSample>& samples,
                               const SeriesBranch& branch, std::size_t n) {
  if (n < 1) throw ConfigError("n_samples", "needs at least one estimator sample");
  if (samples.size() < n) throw DimensionMismatch("estimate_factor: fewer samples than n");
  FactorEstimate out;
  out.branch = branch.kind;
  const auto y = [&samples](std::size_t j) { return samples[j].y; };
  switch (branch.kind) {
    case BranchKind::TaylorAtZero:
      out.x_raw = taylor_estimate(y, n);
      break;
    case BranchKind::ExponentialAtInfinity:
      out.outer_terms = exponential_outer_terms(branch.y1, branch.gamma, n);
      out.x_raw = exponential_estimate(y, n, out.outer_terms);
      break;
    case BranchKind::SaturateOne:
      out.x_raw = 1.0;
      break;
  }
  out.x = clamp01(out.x_raw);
  return out;
}

double series_value_at(double delta, const SeriesBranch& branch, std::size_t n) {
  const auto y = [delta](std::size_t) { return delta; };
  switch (branch.kind) {
    case BranchKind::TaylorAtZero:
      return taylor_estimate(y, n);
    case BranchKind::ExponentialAtInfinity:
      return exponential_estimate(y, n, exponential_outer_terms(branch.y1, branch.gamma, n));
    case BranchKind::SaturateOne:
      return 1.0;
  }
  return 1.0;
}

DeltaEstimator::DeltaEstimator(const SparseMatrix& aug, SolverState& p_state,
                               const DiagWeights& d_theta, const DiagWeights& d_z)
    : aug_(&aug),
      state_(&p_state),
      d_theta_(&d_theta),
      d_z_(&d_z),
      exact_backend_(p_state.backend() == Backend::ExactRefactor) {
  if (d_theta.size() != aug.rows() || d_z.size() != aug.rows()) {
    throw DimensionMismatch("DeltaEstimator: weight length != m+d");
  }
  if (exact_backend_) return;

  const Vector& base = p_state.base_weights();
  const double eps = p_state.options().eps_lowrank;
  std::vector<std::pair<double, std::size_t>> changed;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double rel =
        std::max(std::abs(d_theta[i] / base[i] - 1.0), std::abs(d_z[i] / base[i] - 1.0));
    if (rel > eps) changed.push_back({rel, i});
  }
  const std::size_t k_max = p_state.options().k_max;
  if (changed.size() > k_max) {
    truncated_ = true;
    std::partial_sort(changed.begin(), changed.begin() + k_max, changed.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    changed.resize(k_max);
    std::sort(changed.begin(), changed.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
  }
  const std::size_t k = changed.size();
  rows_.resize(k);
  row_theta_.resize(k);
  row_z_.resize(k);
  row_base_.resize(k);
  columns_.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = changed[j].second;
    rows_[j] = r;
    row_theta_[j] = d_theta[r];
    row_z_[j] = d_z[r];
    row_base_[j] = base[r];
    columns_[j] = &p_state.base_column(r);
  }
  cap_block_.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      cap_block_[i * k + j] = aug.row_dot(rows_[i], *columns_[j]);
    }
  }
}

EstimatorSample DeltaEstimator::sample(RngStream& v_stream, RngStream& t_stream) const {
  const std::size_t d = aug_->cols();
  Vector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = v_stream.gaussian();
  const double t = t_stream.uniform01();

  EstimatorSample s;
  if (exact_backend_) {
    const std::size_t md = aug_->rows();
    Vector q = aug_->matvec(v);
    Vector weighted(md);
    Vector ct(md);
    for (std::size_t i = 0; i < md; ++i) {
      weighted[i] = ((*d_z_)[i] - (*d_theta_)[i]) * q[i];
      ct[i] = (1.0 - t) * (*d_theta_)[i] + t * (*d_z_)[i];
    }
    Vector rhs = aug_->matvec_t(weighted);
    Vector x = factor(gram(*aug_, DiagWeights(std::move(ct)))).solve(rhs);
    s.y = dot(v, x);
    return s;
  }

  const std::size_t k = rows_.size();
  // Numerator restricted to the corrected rows: rhs = sum_r (dz_r - dtheta_r) (a_r . v) a_r
  Vector rhs(d, 0.0);
  Vector qr(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = rows_[j];
    qr[j] = aug_->row_dot(r, v);
    const double w = (row_z_[j] - row_theta_[j]) * qr[j];
    if (w == 0.0) continue;
    const auto& off = aug_->row_offsets();
    for (std::size_t p = off[r]; p < off[r + 1]; ++p) {
      rhs[aug_->col_indices()[p]] += w * aug_->values()[p];
    }
  }
  Vector x = state_->base_factor().solve(rhs);
  // Woodbury correction for the interpolated weights at this t.
  std::vector<std::size_t> active;
  active.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double delta = (1.0 - t) * row_theta_[j] + t * row_z_[j] - row_base_[j];
    if (std::abs(delta) > 1e-300 * row_base_[j]) active.push_back(j);
  }
  if (!active.empty()) {
    const std::size_t ka = active.size();
    std::vector<double> cap(ka * ka);
    Vector r(ka);
    for (std::size_t i = 0; i < ka; ++i) {
      const std::size_t ji = active[i];
      for (std::size_t j2 = 0; j2 < ka; ++j2) cap[i * ka + j2] = cap_block_[ji * k + active[j2]];
      const double delta = (1.0 - t) * row_theta_[ji] + t * row_z_[ji] - row_base_[ji];
      cap[i * ka + i] += 1.0 / delta;
      r[i] = aug_->row_dot(rows_[ji], x);
    }
    LuFactor::factor(ka, std::move(cap)).solve_in_place(r);
    for (std::size_t i = 0; i < ka; ++i) {
      const Vector& col = *columns_[active[i]];
      const double scale = r[i];
      for (std::size_t p = 0; p < d; ++p) x[p] -= scale * col[p];
    }
  }
  s.y = dot(v, x);
  return s;
}

EstimatorSample sample_delta(const BarrierPoint& bp_theta, const BarrierPoint& bp_z,
                             const SparseMatrix& aug, SolverState& solver, std::uint64_t seed,
                             std::uint64_t step, std::uint64_t draw) {
  DeltaEstimator est(aug, solver, bp_theta.weights, bp_z.weights);
  RngStream v(seed, StreamPurpose::EstimatorV, step, draw);
  RngStream t(seed, StreamPurpose::EstimatorT, step, draw);
  EstimatorSample s = est.sample(v, t);
  s.step = step;
  s.draw = draw;
  return s;
}

}  // namespace dikin

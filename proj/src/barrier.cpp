#include "dikin/barrier.hpp"

#include <cmath>

namespace dikin {

BarrierParams::BarrierParams(double alpha, double eta) : alpha(alpha), eta(eta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DimensionMismatch("BarrierParams: alpha must be positive and finite");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw DimensionMismatch("BarrierParams: eta must be positive and finite");
  }
  if (!std::isfinite(alpha / eta)) {
    throw DimensionMismatch("BarrierParams: alpha/eta must be finite");
  }
}

BarrierPoint weights_at(const Polytope& p, const BarrierParams& params, const Vector& theta) {
  BarrierPoint bp;
  bp.theta = theta;
  p.slack(theta, bp.slacks);
  const std::size_t m = p.num_constraints();
  const std::size_t d = p.dim();
  Vector w(m + d);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = bp.slacks[i];
    if (!(s > 1e-300)) throw NotInterior("weights_at: slack " + std::to_string(i) + " <= 0");
    w[i] = 1.0 / (s * s);
  }
  const double reg = params.alpha / params.eta;
  for (std::size_t j = 0; j < d; ++j) w[m + j] = reg;
  bp.weights = DiagWeights(std::move(w));
  return bp;
}

double local_norm_sq(const SparseMatrix& aug, const BarrierPoint& bp, const BarrierParams& params,
                     const Vector& u) {
  if (u.size() != aug.cols()) throw DimensionMismatch("local_norm_sq: len(u) != d");
  double acc = 0.0;
  for (std::size_t i = 0; i < aug.rows(); ++i) {
    const double r = aug.row_dot(i, u);
    acc += bp.weights[i] * r * r;
  }
  return acc / params.alpha;
}

double logdet_phi_exact(const SparseMatrix& aug, const BarrierPoint& bp,
                        const BarrierParams& params) {
  const double ld = factor(gram(aug, bp.weights)).log_det();
  return ld - static_cast<double>(aug.cols()) * std::log(params.alpha);
}

double frobenius_ratio(const BarrierPoint& from, const BarrierPoint& to) {
  if (from.weights.size() != to.weights.size()) {
    throw DimensionMismatch("frobenius_ratio: weight length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < from.weights.size(); ++i) {
    const double r = to.weights[i] / from.weights[i] - 1.0;
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace dikin

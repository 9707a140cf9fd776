#include "doctest.h"

#include "dikin/harness.hpp"
#include "dikin/logdet_estimator.hpp"
#include "dikin/walk.hpp"
#include "test_support.hpp"

using namespace dikin;
namespace ts = testsupport;

namespace {

struct FixedPair {
  Polytope poly;
  BarrierParams params;
  BarrierPoint bp_theta;
  BarrierPoint bp_z;
  SparseMatrix aug;
  double delta = 0.0;  // dense logdet difference
};

FixedPair make_pair(std::size_t d, std::uint64_t seed, double scale) {
  const Polytope poly = ts::random_box_polytope(d, d, seed);
  const BarrierParams params(0.05, 0.5);
  RngStream rng(seed, StreamPurpose::Instance, 11);
  const Vector theta = ts::random_interior(poly, rng, 0.4);
  Vector dir(d);
  for (auto& v : dir) v = rng.gaussian();
  const Vector s = poly.slack(theta);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < poly.num_constraints(); ++i) {
    max_rel = std::max(max_rel, std::abs(poly.a().row_dot(i, dir)) / s[i]);
  }
  Vector z = theta;
  for (std::size_t i = 0; i < d; ++i) z[i] += scale / max_rel * dir[i];
  FixedPair out{poly, params, weights_at(poly, params, theta), weights_at(poly, params, z),
                poly.augmented(), 0.0};
  out.delta = factor(gram(out.aug, out.bp_z.weights)).log_det() -
              factor(gram(out.aug, out.bp_theta.weights)).log_det();
  return out;
}

}  // namespace

TEST_CASE("identical endpoints give exactly zero draws") {
  FixedPair fp = make_pair(2, 60, 0.2);
  SolverState state(fp.aug, fp.bp_theta.weights, Backend::WoodburyIncremental);
  const EstimatorSample s = sample_delta(fp.bp_theta, fp.bp_theta, fp.aug, state, 7, 0, 1);
  CHECK(s.y == 0.0);

  SolverState dense_state(fp.aug, fp.bp_theta.weights, Backend::ExactRefactor);
  CHECK(sample_delta(fp.bp_theta, fp.bp_theta, fp.aug, dense_state, 7, 0, 1).y == 0.0);
}

TEST_CASE("draw mean matches the dense logdet difference") {
  FixedPair fp = make_pair(2, 61, 0.25);
  SolverState state(fp.aug, fp.bp_theta.weights, Backend::ExactRefactor);
  DeltaEstimator est(fp.aug, state, fp.bp_theta.weights, fp.bp_z.weights);
  const std::size_t n = 20000;
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream v(8, StreamPurpose::EstimatorV, 0, i);
    RngStream t(8, StreamPurpose::EstimatorT, 0, i);
    ys[i] = est.sample(v, t).y;
  }
  const auto mv = ts::mean_var(ys);
  CHECK(std::abs(mv.mean - fp.delta) <= 4.0 * mv.se);
}

TEST_CASE("woodbury-backed draws agree with the dense-backed ones in mean") {
  FixedPair fp = make_pair(3, 62, 0.2);
  SolverState state(fp.aug, fp.bp_theta.weights, Backend::WoodburyIncremental);
  DeltaEstimator est(fp.aug, state, fp.bp_theta.weights, fp.bp_z.weights);
  CHECK_FALSE(est.truncated());  // m+d well under k_max: the correction is exact
  const std::size_t n = 20000;
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream v(9, StreamPurpose::EstimatorV, 0, i);
    RngStream t(9, StreamPurpose::EstimatorT, 0, i);
    ys[i] = est.sample(v, t).y;
  }
  const auto mv = ts::mean_var(ys);
  CHECK(std::abs(mv.mean - fp.delta) <= 4.0 * mv.se);
}

TEST_CASE("the interpolation quadrature reproduces the logdet difference") {
  FixedPair fp = make_pair(3, 63, 0.25);
  const std::size_t md = fp.aug.rows();
  Vector diff(md);
  for (std::size_t i = 0; i < md; ++i) diff[i] = fp.bp_z.weights[i] - fp.bp_theta.weights[i];
  // dense trace of G(t)^{-1} B along the interpolation, via Eigen
  const Eigen::MatrixXd a = ts::dense_of(fp.aug);
  const Eigen::MatrixXd b = a.transpose() * ts::evec(diff).asDiagonal() * a;
  const double quad = integrate(
      [&](double t) {
        Vector ct(md);
        for (std::size_t i = 0; i < md; ++i) {
          ct[i] = (1.0 - t) * fp.bp_theta.weights[i] + t * fp.bp_z.weights[i];
        }
        const Eigen::MatrixXd g = a.transpose() * ts::evec(ct).asDiagonal() * a;
        return (g.ldlt().solve(b)).trace();
      },
      0.0, 1.0, 64);
  CHECK(std::abs(quad - fp.delta) <= 1e-6);
}

TEST_CASE("branch selection thresholds") {
  CHECK(select_branch(0.0, 1e-6).kind == BranchKind::TaylorAtZero);
  CHECK(select_branch(1.0, 1e-6).kind == BranchKind::ExponentialAtInfinity);
  CHECK(select_branch(100.0, 1e-6).kind == BranchKind::SaturateOne);  // 2 log(1e6) ~ 27.6
  CHECK(select_branch(0.2499, 1e-3).kind == BranchKind::TaylorAtZero);
  CHECK(select_branch(0.25, 1e-3).kind == BranchKind::ExponentialAtInfinity);
  CHECK_THROWS_AS(select_branch(0.0, 1.5), ConfigError);
}

TEST_CASE("factor estimates at fixed sample values") {
  const std::size_t n = 20;
  std::vector<EstimatorSample> zeros(n);
  const SeriesBranch taylor = select_branch(0.0, 1e-3);
  const FactorEstimate fe = estimate_factor(zeros, taylor, n);
  CHECK(fe.x_raw == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fe.x == doctest::Approx(0.5).epsilon(1e-15));

  const double gamma = 1e-3;
  const double big = 2.0 * std::log(1.0 / gamma) + 1.0;
  const SeriesBranch one = select_branch(big, gamma);
  CHECK(one.kind == BranchKind::SaturateOne);
  std::vector<EstimatorSample> bigs(n);
  for (auto& s : bigs) s.y = big;
  CHECK(estimate_factor(bigs, one, n).x == 1.0);
  // saturation is within gamma of the sigmoid whenever Delta >= 2 log(1/gamma)
  CHECK(std::abs(1.0 - sigmoid(0.5 * big)) <= gamma);
}

TEST_CASE("taylor coefficients of sigmoid(t/2)") {
  const auto c = sigmoid_half_taylor(5);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-18));
  CHECK(c[1] == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(c[2] == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(c[3] == doctest::Approx(-1.0 / 384.0).epsilon(1e-13));
  CHECK(c[4] == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(c[5] == doctest::Approx(1.0 / 15360.0).epsilon(1e-12));
}

TEST_CASE("default sample count") {
  CHECK(default_sample_count(std::exp(-1.0)) == 10);
  CHECK(default_sample_count(std::exp(-2.0)) == 20);
  CHECK(default_sample_count(0.9999) == 1);
  CHECK_THROWS_AS(default_sample_count(0.0), ConfigError);
}

TEST_CASE("sample products are unbiased for powers of the mean") {
  FixedPair fp = make_pair(2, 64, 0.2);
  SolverState state(fp.aug, fp.bp_theta.weights, Backend::ExactRefactor);
  DeltaEstimator est(fp.aug, state, fp.bp_theta.weights, fp.bp_z.weights);
  const std::size_t runs = 20000;
  std::vector<double> p1(runs), p2(runs), p3(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    double ys[3];
    for (std::size_t j = 0; j < 3; ++j) {
      RngStream v(10, StreamPurpose::EstimatorV, r, j);
      RngStream t(10, StreamPurpose::EstimatorT, r, j);
      ys[j] = est.sample(v, t).y;
    }
    p1[r] = ys[0];
    p2[r] = ys[0] * ys[1];
    p3[r] = ys[0] * ys[1] * ys[2];
  }
  const auto m1 = ts::mean_var(p1);
  const auto m2 = ts::mean_var(p2);
  const auto m3 = ts::mean_var(p3);
  CHECK(std::abs(m1.mean - fp.delta) <= 3.0 * m1.se);
  CHECK(std::abs(m2.mean - fp.delta * fp.delta) <= 3.0 * m2.se);
  CHECK(std::abs(m3.mean - fp.delta * fp.delta * fp.delta) <= 3.0 * m3.se);
}

TEST_CASE("series truncation error is below gamma over the validated ranges") {
  for (const double gamma : {1e-2, 1e-3, 1e-6}) {
    const std::size_t n = default_sample_count(gamma);
    for (double x = -0.99; x <= 0.991; x += 0.03) {
      const SeriesBranch b{BranchKind::TaylorAtZero, x, gamma};
      CHECK(std::abs(series_value_at(x, b, n) - sigmoid(0.5 * x)) <= gamma);
    }
    const double hi = 2.0 * std::log(1.0 / gamma);
    for (double x = 0.25; x < hi; x += (hi - 0.25) / 64.0) {
      const SeriesBranch b{BranchKind::ExponentialAtInfinity, x, gamma};
      CHECK(std::abs(series_value_at(x, b, n) - sigmoid(0.5 * x)) <= gamma);
    }
  }
}

TEST_CASE("proposals rarely shrink the determinant below the floor") {
  // paper-profile alpha: tiny steps, so det Phi(z)/det Phi(theta) ~ 1
  const Polytope poly = build_hypercube(3, 1.0);
  const TargetFunction target = TargetFunction::uniform();
  WalkConfig cfg = hyperparams(poly.num_constraints(), poly.dim(), poly.radius(), target, 1.5,
                               0.4, ProfileConstants::paper());
  cfg.seed = 123;
  cfg.steps = 0;
  DikinWalk walk(poly, target, cfg, poly.interior_witness());
  const SparseMatrix aug = poly.augmented();
  const double ld_theta =
      logdet_phi_exact(aug, weights_at(poly, cfg.params, poly.interior_witness()), cfg.params);
  std::size_t ok = 0;
  const std::size_t trials = 400;
  for (std::size_t i = 0; i < trials; ++i) {
    RngStream xi(cfg.seed, StreamPurpose::Proposal, i);
    Vector x(aug.rows());
    for (auto& v : x) v = xi.gaussian();
    const Vector z = walk.propose_from_xi(x);
    if (!poly.contains_interior(z)) continue;
    const double ld_z = logdet_phi_exact(aug, weights_at(poly, cfg.params, z), cfg.params);
    if (std::exp(ld_z - ld_theta) >= 48.0 / 50.0) ++ok;
  }
  CHECK(static_cast<double>(ok) / static_cast<double>(trials) >= 0.9);
}

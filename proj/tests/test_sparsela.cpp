#include "doctest.h"

#include "dikin/sparsela.hpp"
#include "test_support.hpp"

using namespace dikin;
namespace ts = testsupport;

TEST_CASE("matvec identity and zero") {
  const SparseMatrix id = SparseMatrix::identity(3);
  CHECK(id.matvec({1.0, 2.0, 3.0}) == Vector{1.0, 2.0, 3.0});

  const SparseMatrix zero = SparseMatrix::from_coo(3, 4, {});
  CHECK(zero.matvec({1.0, -2.0, 0.5, 9.0}) == Vector{0.0, 0.0, 0.0});
}

TEST_CASE("matvec matches the dense reference product") {
  const SparseMatrix m = ts::random_sparse(5, 4, 0.6, 11);
  RngStream rng(5, StreamPurpose::Instance, 1);
  Vector x(4);
  for (auto& v : x) v = rng.gaussian();
  const Eigen::VectorXd ref = ts::dense_of(m) * ts::evec(x);
  const Vector got = m.matvec(x);
  for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(ref(i)).epsilon(1e-14));
}

TEST_CASE("matvec_t identity, single entry, and dense transpose oracle") {
  const SparseMatrix id = SparseMatrix::identity(4);
  CHECK(id.matvec_t({4.0, 3.0, 2.0, 1.0}) == Vector{4.0, 3.0, 2.0, 1.0});

  const SparseMatrix single = SparseMatrix::from_coo(3, 2, {{1, 0, 5.0}});
  CHECK(single.matvec_t({0.0, 1.0, 0.0}) == Vector{5.0, 0.0});

  const SparseMatrix m = ts::random_sparse(6, 3, 0.5, 12);
  RngStream rng(6, StreamPurpose::Instance, 1);
  Vector y(6);
  for (auto& v : y) v = rng.gaussian();
  const Eigen::VectorXd ref = ts::dense_of(m).transpose() * ts::evec(y);
  const Vector got = m.matvec_t(y);
  for (std::size_t j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(ref(j)).epsilon(1e-14));

  // transposing twice is the original action
  Vector x{0.3, -0.7, 1.1};
  const Eigen::VectorXd xref = ts::dense_of(m) * ts::evec(x);
  const Vector xgot = m.matvec(x);
  for (std::size_t i = 0; i < 6; ++i) CHECK(xgot[i] == doctest::Approx(xref(i)).epsilon(1e-14));
}

TEST_CASE("gram: identity weights, stacked identity, dense triple product") {
  const SparseMatrix id = SparseMatrix::identity(3);
  const DenseSym g = gram(id, DiagWeights({2.0, 5.0, 7.0}));
  CHECK(g.at(0, 0) == 2.0);
  CHECK(g.at(1, 1) == 5.0);
  CHECK(g.at(2, 2) == 7.0);
  CHECK(g.at(0, 1) == 0.0);

  std::vector<CooEntry> coo;
  for (std::size_t i = 0; i < 2; ++i) {
    coo.push_back({i, i, 1.0});
    coo.push_back({i + 2, i, 1.0});
  }
  const SparseMatrix stacked = SparseMatrix::from_coo(4, 2, std::move(coo));
  const DenseSym g2 = gram(stacked, DiagWeights(Vector(4, 1.0)));
  CHECK(g2.at(0, 0) == 2.0);
  CHECK(g2.at(1, 1) == 2.0);
  CHECK(g2.at(0, 1) == 0.0);

  const SparseMatrix m = ts::random_sparse(8, 3, 0.7, 13);
  RngStream rng(7, StreamPurpose::Instance, 1);
  Vector c(8);
  for (auto& v : c) v = 0.1 + rng.uniform01();
  const DenseSym g3 = gram(m, DiagWeights(Vector(c)));
  const Eigen::MatrixXd a = ts::dense_of(m);
  const Eigen::MatrixXd ref = a.transpose() * ts::evec(c).asDiagonal() * a;
  CHECK((ts::dense_of(g3) - ref).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("factor: diagonal cases, pivots, residual") {
  DenseSym diag(2);
  diag.at(0, 0) = 4.0;
  diag.at(1, 1) = 9.0;
  const Factorization f = factor(diag);
  CHECK(f.solve({1.0, 0.0})[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f.log_det() == doctest::Approx(std::log(36.0)).epsilon(1e-14));

  DenseSym one(1);
  one.at(0, 0) = 5.5;
  CHECK(factor(one).log_det() == doctest::Approx(std::log(5.5)).epsilon(1e-14));

  // random SPD 6x6 via B^T B + I
  const SparseMatrix b = ts::random_sparse(6, 6, 0.8, 14);
  DenseSym g = gram(b, DiagWeights(Vector(6, 1.0)));
  for (std::size_t i = 0; i < 6; ++i) g.at(i, i) += 1.0;
  const Factorization fg = factor(g);
  RngStream rng(8, StreamPurpose::Instance, 1);
  Vector v(6);
  for (auto& x : v) x = rng.gaussian();
  const Vector w = fg.solve(v);
  const Eigen::VectorXd residual = ts::dense_of(g) * ts::evec(w) - ts::evec(v);
  CHECK(residual.norm() <= 1e-10 * ts::evec(v).norm());
}

TEST_CASE("factor rejects non positive definite input") {
  DenseSym z(2);  // all zeros
  CHECK_THROWS_AS(factor(z), NotPositiveDefinite);
  DenseSym neg(2);
  neg.at(0, 0) = 1.0;
  neg.at(1, 1) = -1.0;
  CHECK_THROWS_AS(factor(neg), NotPositiveDefinite);
}

TEST_CASE("logdet_dense: identity, diagonal, eigenvalue oracle") {
  DenseSym id(4);
  for (std::size_t i = 0; i < 4; ++i) id.at(i, i) = 1.0;
  CHECK(logdet_dense(id) == doctest::Approx(0.0).epsilon(1e-15));

  DenseSym d3(3);
  d3.at(0, 0) = 2.0;
  d3.at(1, 1) = 3.0;
  d3.at(2, 2) = 4.0;
  CHECK(logdet_dense(d3) == doctest::Approx(std::log(24.0)).epsilon(1e-14));

  const SparseMatrix b = ts::random_sparse(5, 5, 0.9, 15);
  DenseSym g = gram(b, DiagWeights(Vector(5, 1.0)));
  for (std::size_t i = 0; i < 5; ++i) g.at(i, i) += 0.5;
  CHECK(logdet_dense(g) ==
        doctest::Approx(ts::eigen_logdet_sym(ts::dense_of(g))).epsilon(1e-10));
}

TEST_CASE("adjointness holds on random instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SparseMatrix m = ts::random_sparse(7, 4, 0.5, 100 + seed);
    RngStream rng(seed, StreamPurpose::Instance, 2);
    Vector x(4), y(7);
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : y) v = rng.gaussian();
    const double lhs = dot(y, m.matvec(x));
    const double rhs = dot(m.matvec_t(y), x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("gram of the augmented system is SPD even for rank-deficient A") {
  // zero A: the identity block forces full column rank
  const Polytope p(SparseMatrix::from_coo(3, 2, {}), {1.0, 1.0, 1.0}, 2.0, {0.0, 0.0});
  const SparseMatrix aug = p.augmented();
  RngStream rng(3, StreamPurpose::Instance, 9);
  for (int rep = 0; rep < 10; ++rep) {
    Vector c(aug.rows());
    for (auto& v : c) v = 0.05 + rng.uniform01();
    CHECK_NOTHROW(factor(gram(aug, DiagWeights(std::move(c)))));
  }
}

TEST_CASE("log-determinant is monotone in the weights") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Polytope p = ts::random_box_polytope(2, 0, 300 + seed);
    const SparseMatrix aug = p.augmented();
    RngStream rng(seed, StreamPurpose::Instance, 4);
    Vector c(aug.rows());
    for (auto& v : c) v = 0.2 + rng.uniform01();
    const double base = logdet_dense(gram(aug, DiagWeights(Vector(c))));
    for (std::size_t i = 0; i < c.size(); ++i) {
      Vector bumped = c;
      bumped[i] *= 1.0 + rng.uniform01();
      const double up = logdet_dense(gram(aug, DiagWeights(std::move(bumped))));
      CHECK(up >= base - 1e-12);
    }
  }
}

TEST_CASE("CSR construction validates its invariants") {
  CHECK_THROWS_AS(SparseMatrix::from_coo(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), DimensionMismatch);
  CHECK_THROWS_AS(SparseMatrix::from_coo(2, 2, {{0, 5, 1.0}}), DimensionMismatch);
  CHECK_THROWS_AS(SparseMatrix::from_coo(2, 2, {{3, 0, 1.0}}), DimensionMismatch);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SparseMatrix::from_coo(2, 2, {{0, 0, inf}}), DimensionMismatch);
  CHECK_THROWS_AS(SparseMatrix::identity(3).matvec({1.0, 2.0}), DimensionMismatch);
  CHECK_THROWS_AS(DiagWeights({1.0, -2.0}), DimensionMismatch);
}

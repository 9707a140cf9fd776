#include <sstream>

#include "doctest.h"

#include "dikin/polytope.hpp"
#include "test_support.hpp"

using namespace dikin;
namespace ts = testsupport;

TEST_CASE("slack on the hypercube") {
  const Polytope p = build_hypercube(2, 1.0);
  CHECK(p.slack({0.0, 0.0}) == Vector{1.0, 1.0, 1.0, 1.0});

  const Vector facet = p.slack({1.0, 0.0});
  CHECK(facet[0] == 0.0);  // exactly zero on the facet
  CHECK_FALSE(p.contains_interior({1.0, 0.0}));
  CHECK(p.contains_interior(p.interior_witness()));
  CHECK_FALSE(p.contains_interior({2.0, 0.0}));
}

TEST_CASE("slack matches the dense product") {
  const Polytope p = ts::random_box_polytope(3, 4, 21);
  RngStream rng(21, StreamPurpose::Instance, 5);
  const Vector theta = ts::random_interior(p, rng);
  const Eigen::VectorXd ref = ts::evec(p.b()) - ts::dense_of(p.a()) * ts::evec(theta);
  const Vector got = p.slack(theta);
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i] == doctest::Approx(ref(static_cast<long>(i))).epsilon(1e-14));
  }
}

TEST_CASE("slack is exactly affine on integer inputs") {
  const Polytope p = build_hypercube(3, 8.0);
  const Vector t1{1.0, -2.0, 3.0};
  const Vector t2{-4.0, 0.0, 2.0};
  const Vector s1 = p.slack(t1);
  const Vector s2 = p.slack(t2);
  Vector diff(t1.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = t1[i] - t2[i];
  const Vector adiff = p.a().matvec(diff);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] - s2[i] == -adiff[i]);
}

TEST_CASE("augmented system stacks A over the identity") {
  const Polytope p(SparseMatrix::identity(2), {1.0, 1.0}, 2.0, {0.0, 0.0});
  const SparseMatrix aug = p.augmented();
  CHECK(aug.rows() == 4);
  CHECK(aug.cols() == 2);
  CHECK(aug.nnz() == p.a().nnz() + 2);
  CHECK(aug.matvec({3.0, 4.0}) == Vector{3.0, 4.0, 3.0, 4.0});

  const Polytope rank_deficient(SparseMatrix::from_coo(3, 2, {}), {1.0, 1.0, 1.0}, 2.0,
                                {0.0, 0.0});
  CHECK_NOTHROW(factor(gram(rank_deficient.augmented(),
                            DiagWeights(Vector(rank_deficient.augmented().rows(), 1.0)))));
}

TEST_CASE("builders") {
  const Polytope cube = build_hypercube(2, 1.0);
  CHECK(cube.num_constraints() == 4);
  CHECK(cube.a().nnz() == 4);
  CHECK(cube.b() == Vector{1.0, 1.0, 1.0, 1.0});
  CHECK(cube.slack({0.25, -0.5}) == Vector{0.75, 1.25, 1.5, 0.5});

  const Polytope simplex = build_simplex(2);
  CHECK(simplex.num_constraints() == 3);
  CHECK(simplex.interior_witness() == Vector{0.25, 0.25});
  // theta_i >= 0 and sum theta <= 1
  CHECK(simplex.contains_interior({0.3, 0.3}));
  CHECK_FALSE(simplex.contains_interior({-0.1, 0.5}));
  CHECK_FALSE(simplex.contains_interior({0.6, 0.6}));

  const Polytope l1 = build_l1_ball(2, 1.0);
  CHECK(l1.num_constraints() == 4);
  CHECK(l1.contains_interior({0.4, 0.4}));
  CHECK_FALSE(l1.contains_interior({0.7, 0.7}));
  CHECK_THROWS_AS(build_l1_ball(17, 1.0), UnsupportedDimension);
}

TEST_CASE("builder witnesses satisfy the construction invariants") {
  for (std::size_t d = 1; d <= 6; ++d) {
    CHECK_NOTHROW(build_hypercube(d, 0.5));
    CHECK_NOTHROW(build_simplex(d));
    if (d <= 8) CHECK_NOTHROW(build_l1_ball(d, 2.0));
  }
}

TEST_CASE("json round trip and loader validation") {
  const Polytope p = build_simplex(3);
  const std::string js = polytope_to_json(p);
  std::istringstream in(js);
  const Polytope q = load_polytope_json(in);
  CHECK(q.dim() == p.dim());
  CHECK(q.num_constraints() == p.num_constraints());
  CHECK(q.b() == p.b());
  CHECK(q.interior_witness() == p.interior_witness());

  std::istringstream dup(R"({"d":1,"m":1,"coo":[[0,0,1.0],[0,0,2.0]],"b":[1.0],"R":2.0,"witness":[0.0]})");
  CHECK_THROWS_AS(load_polytope_json(dup), ConfigError);

  std::istringstream outside(R"({"d":1,"m":1,"coo":[[0,0,1.0]],"b":[1.0],"R":2.0,"witness":[3.0]})");
  CHECK_THROWS_AS(load_polytope_json(outside), ConfigError);

  std::istringstream missing(R"({"d":1,"m":1,"coo":[],"b":[],"R":2.0})");
  CHECK_THROWS_AS(load_polytope_json(missing), ConfigError);
}

TEST_CASE("construction rejects bad invariants") {
  CHECK_THROWS_AS(Polytope(SparseMatrix::identity(2), {1.0, 1.0}, 2.0, {1.5, 0.0}), NotInterior);
  CHECK_THROWS_AS(Polytope(SparseMatrix::identity(2), {1.0, 1.0}, 0.1, {0.5, 0.5}),
                  DimensionMismatch);  // witness outside the declared ball
}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "dikin/harness.hpp"
#include "test_support.hpp"

using namespace dikin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dikin_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("sample runs are byte-identical across invocations") {
  RunManifest m;
  m.polytope = "hypercube:2,1";
  m.target = "uniform";
  m.seed = 7;
  m.steps = 4000;
  m.thin = 10;
  const fs::path d1 = fresh_dir("det1");
  const fs::path d2 = fresh_dir("det2");
  m.out_dir = d1.string();
  cmd_sample(m);
  m.out_dir = d2.string();
  cmd_sample(m);
  CHECK(slurp(d1 / "samples.jsonl") == slurp(d2 / "samples.jsonl"));
  CHECK(slurp(d1 / "metrics.json") == slurp(d2 / "metrics.json"));
  CHECK(!slurp(d1 / "samples.jsonl").empty());
}

TEST_CASE("manifest validation names the offending field") {
  RunManifest m;
  m.polytope = "simplex:3";
  m.eta = -1.0;
  try {
    resolve(m);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "eta");
  }

  RunManifest bad_mode;
  bad_mode.polytope = "hypercube:2,1";
  bad_mode.mode = "sideways";
  CHECK_THROWS_AS(resolve(bad_mode), ConfigError);

  RunManifest bad_poly;
  bad_poly.polytope = "dodecahedron:12";
  CHECK_THROWS_AS(resolve(bad_poly), ConfigError);
}

TEST_CASE("manifest json round trip") {
  RunManifest m;
  m.polytope = "l1:3,2";
  m.target = "linear:0.5,0,0";
  m.seed = 42;
  m.steps = 123;
  m.mode = "estimated";
  m.backend = "woodbury";
  const RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.polytope == m.polytope);
  CHECK(back.target == m.target);
  CHECK(back.seed == m.seed);
  CHECK(back.steps == m.steps);
  CHECK(back.mode == m.mode);
  CHECK(back.backend == m.backend);
}

TEST_CASE("simplex validation passes and reports the first moment") {
  RunManifest m;
  m.polytope = "simplex:2";
  m.target = "uniform";
  m.seed = 11;
  m.steps = 120000;
  const auto report = cmd_validate(m);
  CHECK(report.at("pass").get<bool>());
}

TEST_CASE("a broken determinantal exponent is caught by validation") {
  RunManifest m;
  m.polytope = "hypercube:2,1";
  m.target = "uniform";
  m.seed = 12;
  m.steps = 60000;
  m.det_exponent_scale = 2.0;
  const auto report = cmd_validate(m);
  CHECK_FALSE(report.at("pass").get<bool>());
}

TEST_CASE("unsupported validation combinations are rejected") {
  RunManifest m;
  m.polytope = "l1:3,1";
  m.target = "quadratic:2";
  CHECK_THROWS_AS(cmd_validate(m), UnsupportedValidation);
}

TEST_CASE("estimator check passes on a small instance") {
  EstimatorCheckSpec spec;
  spec.seed = 3;
  spec.dim = 3;
  spec.n_draws = 20000;
  spec.x_runs = 20000;
  spec.gamma = 1e-2;
  const auto report = cmd_estimator_check(spec);
  CHECK(report.at("pass").get<bool>());
  CHECK(report.at("quadrature_identity_error").get<double>() <= 1e-6);
}

TEST_CASE("bench with an empty corpus emits only the header") {
  BenchSpec spec;
  spec.dims = {};
  const auto table = cmd_bench(spec);
  const std::string csv = bench_csv(table);
  CHECK(csv ==
        "d,m,nnz,backend,mode,steps,accepts,rejects_outside,refactorizations,lowrank_updates,"
        "solves,step_ms_mean,step_ms_median\n");
}

TEST_CASE("bench rows carry the corpus shape") {
  BenchSpec spec;
  spec.dims = {8};
  spec.warmup_steps = 5;
  spec.timed_steps = 10;
  const auto table = cmd_bench(spec);
  CHECK(table.at("rows").size() == 4);  // two backends x two modes
  for (const auto& row : table.at("rows")) {
    CHECK(row.at("m").get<std::size_t>() == 32);
    CHECK(row.at("nnz").get<std::size_t>() == 48);
  }
}

TEST_CASE("file-backed polytopes run end to end") {
  const fs::path dir = fresh_dir("filepoly");
  const Polytope p = build_simplex(2);
  std::ofstream out(dir / "poly.json");
  out << polytope_to_json(p);
  out.close();
  RunManifest m;
  m.polytope = "file:" + (dir / "poly.json").string();
  m.seed = 5;
  m.steps = 500;
  const auto metrics = cmd_sample(m);
  CHECK(metrics.at("steps").get<std::uint64_t>() == 500);
}

TEST_CASE("quadrature helpers") {
  // exactness on a polynomial
  const double got = integrate([](double x) { return x * x * x - 2.0 * x + 1.0; }, -1.0, 3.0, 16);
  CHECK(got == doctest::Approx(16.0).epsilon(1e-12));  // integral of x^3-2x+1 over [-1,3]

  // tilted interval mean against the closed form -(coth L - 1/L)
  for (const double l : {1.0, 4.0}) {
    const double mean = tilted_interval_mean([l](double x) { return l * x; }, 1.0);
    const double closed = -(1.0 / std::tanh(l) - 1.0 / l);
    CHECK(mean == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("grid tv helpers") {
  // identical sample sets have zero pairwise distance
  std::vector<Vector> a;
  RngStream rng(1, StreamPurpose::Instance, 20);
  for (int i = 0; i < 2000; ++i) a.push_back({rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1});
  CHECK(grid_tv_pairwise(a, a, -1.0, 1.0) == 0.0);
  // near-uniform samples have small TV against the uniform masses
  CHECK(grid_tv_uniform_hypercube(a, 1.0) <= 0.25);
  // concentrated samples have TV near 1
  std::vector<Vector> b(2000, Vector{0.0, 0.0});
  CHECK(grid_tv_uniform_hypercube(b, 1.0) >= 0.95);
}

TEST_CASE("worker pool width honors the environment cap") {
  CHECK(worker_pool_width(10) >= 1);
  CHECK(worker_pool_width(0) == 1);
}

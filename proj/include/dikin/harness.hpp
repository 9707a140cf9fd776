#pragma once

// Front end: run manifests, file I/O, statistical validation, estimator
// checks, and the per-step-cost benchmark comparing solver backends.
//
// Output formats are chosen to be trivially diffable: samples as JSONL (one
// d-vector per line), metrics as canonical-key-order JSON with timing in a
// separate file, benchmarks as CSV whose timing columns end in "_ms".

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dikin/polytope.hpp"
#include "dikin/target.hpp"
#include "dikin/walk.hpp"

namespace dikin {

struct RunManifest {
  std::string polytope;             // "hypercube:d,w" | "simplex:d" | "l1:d,r" | "file:path"
  std::string target = "uniform";   // "uniform" | "linear:c1,..." | "quadratic:lam" | "logistic:path"
  std::string profile = "practical";  // "paper" | "practical"
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;   // 0: use the schedule's T
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::string mode = "exact";      // "exact" | "estimated"
  std::string backend = "dense";   // "dense" (exact refactorization) | "woodbury"
  double delta = 0.4;
  double warmness = 1.5;
  // Overrides; 0 means "use the schedule formula".
  double gamma = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  std::uint64_t n_samples = 0;
  std::size_t k_max = 64;
  double eps_lowrank = 1e-3;
  double det_exponent_scale = 1.0;
  std::string out_dir;

  static RunManifest from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ResolvedRun {
  Polytope polytope;
  TargetFunction target;
  WalkConfig config;
};

// Validates the manifest; throws ConfigError naming the offending field.
ResolvedRun resolve(const RunManifest& manifest);

// Executes the chain and writes samples.jsonl, metrics.json and timings.json
// under manifest.out_dir (when set). Returns the metrics JSON.
nlohmann::json cmd_sample(const RunManifest& manifest);

// Statistical validation against analytically known targets. Supported:
// uniform on hypercube (moments; plus 20x20 grid TV when d = 2), uniform on
// the simplex (first moment), linear tilt on a 1-d hypercube (quadrature
// mean). Throws UnsupportedValidation otherwise. Returns the report with
// "pass" set; writes validation.json when out_dir is set.
nlohmann::json cmd_validate(const RunManifest& manifest);

struct EstimatorCheckSpec {
  std::uint64_t seed = 1;
  std::size_t dim = 3;          // d <= 6
  std::uint64_t n_draws = 100000;
  double gamma = 1e-3;
  std::uint64_t x_runs = 200000;  // estimator runs per synthetic delta point
  std::string out_dir;
};

// Reports |mean(Y) - dense Delta| against its standard error, tail
// frequencies against 2 e^{-s/8}, the Proposition-5 quadrature identity, the
// deterministic series truncation error, and |mean(X_raw) - sigmoid(Delta/2)|
// on synthetic draws.
nlohmann::json cmd_estimator_check(const EstimatorCheckSpec& spec);

struct BenchSpec {
  std::vector<std::size_t> dims;  // corpus: m = 4d, nnz(A) = 6d
  std::uint64_t warmup_steps = 30;
  std::uint64_t timed_steps = 120;
  double gamma = 0.25;
  std::uint64_t seed = 1;
  std::string out_csv;
};

// Per-step wall time for {dense, woodbury} x {exact, estimated}; returns the
// table as JSON and writes CSV when out_csv is set. Timing columns end in
// "_ms"; every other column is deterministic.
nlohmann::json cmd_bench(const BenchSpec& spec);
std::string bench_csv(const nlohmann::json& table);

// The sparse benchmark corpus member: 2d box rows plus 2d random two-entry
// rows; m = 4d, nnz(A) = 6d, witness 0.
Polytope bench_polytope(std::size_t d, std::uint64_t seed);

// --- small numeric helpers shared with the test suites ---

// Gauss-Legendre nodes/weights on [-1, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);
// integral of fn over [a, b] with an n-point rule
double integrate(const std::function<double(double)>& fn, double a, double b, int n = 64);
// Mean of theta under exp(-f) restricted to [-w, w] (1-d), by quadrature.
double tilted_interval_mean(const std::function<double(double)>& f, double w);

// TV between the empirical 2-d histogram of samples (first two coordinates)
// and the exact uniform cell masses on [-w, w]^2.
double grid_tv_uniform_hypercube(const std::vector<Vector>& samples, double w, int cells = 20);
// TV between two empirical histograms on [lo, hi]^2 (first two coordinates).
double grid_tv_pairwise(const std::vector<Vector>& a, const std::vector<Vector>& b, double lo,
                        double hi, int cells = 20);

// Worker-pool width: DIKIN_THREADS capped by item count; defaults to 1.
std::size_t worker_pool_width(std::size_t items);

}  // namespace dikin

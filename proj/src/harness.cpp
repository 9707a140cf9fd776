#include "dikin/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace dikin {

namespace {

std::vector<double> parse_number_list(const std::string& s, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

struct PolytopeSpec {
  enum class Kind { Hypercube, Simplex, L1Ball, File } kind;
  std::size_t d = 0;
  double size = 1.0;
  std::string path;
};

PolytopeSpec parse_polytope_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  PolytopeSpec out;
  if (name == "file") {
    if (args.empty()) throw ConfigError("polytope", "file spec needs a path");
    out.kind = PolytopeSpec::Kind::File;
    out.path = args;
    return out;
  }
  const std::vector<double> nums = parse_number_list(args, "polytope");
  if (name == "hypercube") {
    if (nums.size() != 2) throw ConfigError("polytope", "hypercube:d,half_width");
    out.kind = PolytopeSpec::Kind::Hypercube;
    out.d = static_cast<std::size_t>(nums[0]);
    out.size = nums[1];
  } else if (name == "simplex") {
    if (nums.size() != 1) throw ConfigError("polytope", "simplex:d");
    out.kind = PolytopeSpec::Kind::Simplex;
    out.d = static_cast<std::size_t>(nums[0]);
  } else if (name == "l1") {
    if (nums.size() != 2) throw ConfigError("polytope", "l1:d,radius");
    out.kind = PolytopeSpec::Kind::L1Ball;
    out.d = static_cast<std::size_t>(nums[0]);
    out.size = nums[1];
  } else {
    throw ConfigError("polytope", "unknown builder '" + name + "'");
  }
  return out;
}

Polytope build_from_spec(const PolytopeSpec& spec) {
  switch (spec.kind) {
    case PolytopeSpec::Kind::Hypercube:
      return build_hypercube(spec.d, spec.size);
    case PolytopeSpec::Kind::Simplex:
      return build_simplex(spec.d);
    case PolytopeSpec::Kind::L1Ball:
      return build_l1_ball(spec.d, spec.size);
    case PolytopeSpec::Kind::File:
      return load_polytope_file(spec.path);
  }
  throw ConfigError("polytope", "unreachable");
}

TargetFunction parse_target(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "uniform") return TargetFunction::uniform();
  if (name == "linear") return TargetFunction::linear(parse_number_list(args, "target"));
  if (name == "quadratic") {
    const auto nums = parse_number_list(args, "target");
    if (nums.size() != 1) throw ConfigError("target", "quadratic:lambda");
    return TargetFunction::quadratic(nums[0]);
  }
  if (name == "logistic") {
    std::ifstream in(args);
    if (!in) throw ConfigError("target", "cannot open datapoint file: " + args);
    nlohmann::json j;
    in >> j;
    std::vector<Vector> xs;
    for (const auto& row : j) xs.push_back(row.get<Vector>());
    return TargetFunction::logistic(std::move(xs));
  }
  throw ConfigError("target", "unknown target '" + name + "'");
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  out << content;
}

double quantile_of(std::vector<float> v, double q) {
  if (v.empty()) return 0.0;
  const std::size_t idx =
      std::min(v.size() - 1, static_cast<std::size_t>(q * static_cast<double>(v.size())));
  std::nth_element(v.begin(), v.begin() + static_cast<long>(idx), v.end());
  return v[idx];
}

nlohmann::json metrics_json(const RunResult& res, const WalkConfig& cfg) {
  const WalkDiagnostics& d = res.diagnostics;
  nlohmann::json m;
  m["steps"] = d.steps;
  m["accepts"] = d.accepts;
  m["rejects_outside"] = d.rejects_outside;
  m["rejects_mh"] = d.rejects_mh;
  m["acceptance_rate"] = d.acceptance_rate();
  m["out_of_k_rate"] = d.out_of_k_rate();
  m["fr_mean"] = d.fr_count ? d.fr_sum / static_cast<double>(d.fr_count) : 0.0;
  m["fr_p50"] = quantile_of(d.fr_trace, 0.5);
  m["fr_p90"] = quantile_of(d.fr_trace, 0.9);
  m["fr_max"] = d.fr_max;
  m["fr_accept_over_one"] = d.fr_accept_over_one;
  m["refactorizations"] = res.solver.full_refactorizations;
  m["lowrank_updates"] = res.solver.lowrank_updates;
  m["solves"] = res.solver.solves;
  m["final_theta"] = res.final_theta;
  m["config"] = {{"alpha", cfg.params.alpha}, {"eta", cfg.params.eta},     {"gamma", cfg.gamma},
                 {"n_samples", cfg.n_samples}, {"steps", cfg.steps},
                 {"mode", cfg.mode == Mode::Exact ? "exact" : "estimated"},
                 {"backend", cfg.backend == Backend::ExactRefactor ? "dense" : "woodbury"},
                 {"seed", cfg.seed}};
  return m;
}

}  // namespace

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  const auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("polytope", m.polytope);
  get("target", m.target);
  get("profile", m.profile);
  get("seed", m.seed);
  get("steps", m.steps);
  get("burn_in", m.burn_in);
  get("thin", m.thin);
  get("mode", m.mode);
  get("backend", m.backend);
  get("delta", m.delta);
  get("warmness", m.warmness);
  get("gamma", m.gamma);
  get("alpha", m.alpha);
  get("eta", m.eta);
  get("n_samples", m.n_samples);
  get("k_max", m.k_max);
  get("eps_lowrank", m.eps_lowrank);
  get("det_exponent_scale", m.det_exponent_scale);
  get("out", m.out_dir);
  return m;
}

nlohmann::json RunManifest::to_json() const {
  return {{"polytope", polytope},   {"target", target},
          {"profile", profile},     {"seed", seed},
          {"steps", steps},         {"burn_in", burn_in},
          {"thin", thin},           {"mode", mode},
          {"backend", backend},     {"delta", delta},
          {"warmness", warmness},   {"gamma", gamma},
          {"alpha", alpha},         {"eta", eta},
          {"n_samples", n_samples}, {"k_max", k_max},
          {"eps_lowrank", eps_lowrank},
          {"det_exponent_scale", det_exponent_scale},
          {"out", out_dir}};
}

ResolvedRun resolve(const RunManifest& m) {
  if (m.polytope.empty()) throw ConfigError("polytope", "missing");
  Polytope poly = build_from_spec(parse_polytope_spec(m.polytope));
  TargetFunction target = parse_target(m.target);

  ProfileConstants prof;
  if (m.profile == "paper") {
    prof = ProfileConstants::paper();
  } else if (m.profile == "practical") {
    prof = ProfileConstants::practical();
  } else {
    throw ConfigError("profile", "must be 'paper' or 'practical'");
  }
  if (m.gamma < 0.0 || m.gamma >= 1.0) throw ConfigError("gamma", "must lie in [0, 1)");
  WalkConfig cfg = hyperparams(poly.num_constraints(), poly.dim(), poly.radius(), target,
                               m.warmness, m.delta, prof, m.gamma);
  if (m.alpha != 0.0 || m.eta != 0.0) {
    const double alpha = m.alpha != 0.0 ? m.alpha : cfg.params.alpha;
    const double eta = m.eta != 0.0 ? m.eta : cfg.params.eta;
    if (!(alpha > 0.0)) throw ConfigError("alpha", "must be positive");
    if (!(eta > 0.0)) throw ConfigError("eta", "must be positive");
    cfg.params = BarrierParams(alpha, eta);
  }
  if (m.steps != 0) cfg.steps = m.steps;
  if (m.n_samples != 0) cfg.n_samples = m.n_samples;
  if (m.mode == "exact") {
    cfg.mode = Mode::Exact;
  } else if (m.mode == "estimated") {
    cfg.mode = Mode::Estimated;
  } else {
    throw ConfigError("mode", "must be 'exact' or 'estimated'");
  }
  if (m.backend == "dense") {
    cfg.backend = Backend::ExactRefactor;
  } else if (m.backend == "woodbury") {
    cfg.backend = Backend::WoodburyIncremental;
  } else {
    throw ConfigError("backend", "must be 'dense' or 'woodbury'");
  }
  if (m.k_max < 1) throw ConfigError("k_max", "must be >= 1");
  if (!(m.eps_lowrank > 0.0)) throw ConfigError("eps_lowrank", "must be positive");
  cfg.solver.k_max = m.k_max;
  cfg.solver.eps_lowrank = m.eps_lowrank;
  cfg.seed = m.seed;
  cfg.det_exponent_scale = m.det_exponent_scale;
  return {std::move(poly), std::move(target), cfg};
}

nlohmann::json cmd_sample(const RunManifest& m) {
  ResolvedRun run = resolve(m);
  DikinWalk walk(run.polytope, run.target, run.config, run.polytope.interior_witness());
  RunOptions opts;
  opts.steps = run.config.steps;
  opts.burn_in = std::min(m.burn_in, opts.steps);
  opts.thin = std::max<std::uint64_t>(m.thin, 1);
  RunResult res = run_chain(walk, opts);

  nlohmann::json metrics = metrics_json(res, run.config);
  metrics["samples_written"] = res.trace.size();
  if (!m.out_dir.empty()) {
    std::string lines;
    for (const auto& sample : res.trace) {
      lines += nlohmann::json(sample).dump();
      lines += '\n';
    }
    write_file(m.out_dir, "samples.jsonl", lines);
    write_file(m.out_dir, "metrics.json", metrics.dump(2) + "\n");
    nlohmann::json timings = {{"wall_ms_total", res.wall_ms_total},
                              {"step_ms_mean", res.step_ms_mean},
                              {"step_ms_median", res.step_ms_median}};
    write_file(m.out_dir, "timings.json", timings.dump(2) + "\n");
  }
  return metrics;
}

// --- validation ---

namespace {

struct MomentAccumulator {
  std::size_t dim = 0;
  std::uint64_t count = 0;
  Vector sum, sum_sq;
  std::vector<std::uint64_t> grid;
  int cells = 20;
  double half_width = 1.0;
  bool use_grid = false;

  void init(std::size_t d, bool grid_on, double w) {
    dim = d;
    sum.assign(d, 0.0);
    sum_sq.assign(d, 0.0);
    use_grid = grid_on;
    half_width = w;
    if (grid_on) grid.assign(static_cast<std::size_t>(cells) * cells, 0);
  }
  void add(const Vector& theta) {
    ++count;
    for (std::size_t i = 0; i < dim; ++i) {
      sum[i] += theta[i];
      sum_sq[i] += theta[i] * theta[i];
    }
    if (use_grid) {
      const auto cell = [this](double x) {
        const double u = (x + half_width) / (2.0 * half_width);
        return std::min(cells - 1, std::max(0, static_cast<int>(u * cells)));
      };
      ++grid[static_cast<std::size_t>(cell(theta[0])) * cells + cell(theta[1])];
    }
  }
  double grid_tv() const {
    const double uniform = 1.0 / static_cast<double>(cells * cells);
    double tv = 0.0;
    for (const auto c : grid) {
      tv += std::abs(static_cast<double>(c) / static_cast<double>(count) - uniform);
    }
    return 0.5 * tv;
  }
};

void add_check(nlohmann::json& checks, bool& pass, const std::string& name, double value,
               double threshold) {
  const bool ok = std::abs(value) <= threshold;
  checks.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", ok}});
  pass = pass && ok;
}

}  // namespace

nlohmann::json cmd_validate(const RunManifest& m) {
  const PolytopeSpec pspec = parse_polytope_spec(m.polytope);
  if (pspec.kind == PolytopeSpec::Kind::File) {
    throw UnsupportedValidation("validation needs a builder polytope with known moments");
  }
  const auto colon = m.target.find(':');
  const std::string target_name = colon == std::string::npos ? m.target : m.target.substr(0, colon);

  ResolvedRun run = resolve(m);
  const std::size_t d = run.polytope.dim();

  enum class Case { UniformHypercube, UniformSimplex, LinearInterval } kind;
  if (pspec.kind == PolytopeSpec::Kind::Hypercube && target_name == "uniform") {
    kind = Case::UniformHypercube;
  } else if (pspec.kind == PolytopeSpec::Kind::Simplex && target_name == "uniform") {
    kind = Case::UniformSimplex;
  } else if (pspec.kind == PolytopeSpec::Kind::Hypercube && d == 1 && target_name == "linear") {
    kind = Case::LinearInterval;
  } else {
    throw UnsupportedValidation("no analytic moments for polytope '" + m.polytope +
                                "' with target '" + m.target + "'");
  }

  DikinWalk walk(run.polytope, run.target, run.config, run.polytope.interior_witness());
  MomentAccumulator acc;
  acc.init(d, kind == Case::UniformHypercube && d == 2, pspec.size);
  RunOptions opts;
  opts.steps = run.config.steps;
  opts.burn_in = m.burn_in != 0 ? m.burn_in : opts.steps / 10;
  opts.keep_trace = false;
  opts.on_step = [&acc](const DikinWalk& w) { acc.add(w.theta()); };
  RunResult res = run_chain(walk, opts);

  nlohmann::json checks = nlohmann::json::array();
  bool pass = true;
  const double n = static_cast<double>(acc.count);
  if (kind == Case::UniformHypercube) {
    const double w = pspec.size;
    for (std::size_t i = 0; i < d; ++i) {
      add_check(checks, pass, "mean_theta" + std::to_string(i), acc.sum[i] / n, 0.05);
      add_check(checks, pass, "second_moment_err_theta" + std::to_string(i),
                acc.sum_sq[i] / n - w * w / 3.0, 0.05);
    }
    if (d == 2) {
      const double tv = acc.grid_tv();
      const bool ok = tv <= 0.1;
      checks.push_back({{"name", "grid_tv_20x20"}, {"value", tv}, {"threshold", 0.1}, {"pass", ok}});
      pass = pass && ok;
    }
  } else if (kind == Case::UniformSimplex) {
    for (std::size_t i = 0; i < d; ++i) {
      add_check(checks, pass, "mean_err_theta" + std::to_string(i),
                acc.sum[i] / n - 1.0 / static_cast<double>(d + 1), 0.03);
    }
  } else {
    const std::vector<double> coeffs = parse_number_list(m.target.substr(colon + 1), "target");
    const double oracle = tilted_interval_mean(
        [&coeffs](double x) { return coeffs[0] * x; }, pspec.size);
    add_check(checks, pass, "mean_err_vs_quadrature", acc.sum[0] / n - oracle, 0.05);
  }

  nlohmann::json report;
  report["pass"] = pass;
  report["checks"] = checks;
  report["post_burn_samples"] = acc.count;
  report["metrics"] = metrics_json(res, run.config);
  if (!m.out_dir.empty()) write_file(m.out_dir, "validation.json", report.dump(2) + "\n");
  return report;
}

// --- estimator check ---

namespace {

DenseSym signed_gram(const SparseMatrix& m, const Vector& c) {
  DenseSym g(m.cols());
  const auto& off = m.row_offsets();
  const auto& col = m.col_indices();
  const auto& val = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const double w = c[i] * val[k];
      for (std::size_t l = off[i]; l < off[i + 1]; ++l) g.at(col[k], col[l]) += w * val[l];
    }
  }
  return g;
}

double trace_of_solve(const Factorization& f, const DenseSym& b) {
  // tr(G^{-1} B) by solving one column at a time
  const std::size_t n = b.dim;
  double tr = 0.0;
  Vector colv(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) colv[i] = b.at(i, j);
    f.solve_in_place(colv);
    tr += colv[j];
  }
  return tr;
}

}  // namespace

nlohmann::json cmd_estimator_check(const EstimatorCheckSpec& spec) {
  if (spec.dim < 1 || spec.dim > 6) throw ConfigError("dim", "estimator check needs d in [1, 6]");
  const Polytope poly = build_hypercube(spec.dim, 1.0);
  const SparseMatrix aug = poly.augmented();
  const BarrierParams params(0.05, 0.5);

  // Deterministic interior pair with 1/2 <= W <= 2.
  RngStream inst(spec.seed, StreamPurpose::Instance, 0);
  Vector theta(spec.dim), dir(spec.dim);
  for (auto& v : theta) v = (inst.uniform01() - 0.5) * 0.8;
  for (auto& v : dir) v = inst.gaussian();
  const Vector s = poly.slack(theta);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < poly.num_constraints(); ++i) {
    max_rel = std::max(max_rel, std::abs(poly.a().row_dot(i, dir)) / s[i]);
  }
  Vector z = theta;
  for (std::size_t i = 0; i < spec.dim; ++i) z[i] += 0.25 / max_rel * dir[i];

  const BarrierPoint bp_theta = weights_at(poly, params, theta);
  const BarrierPoint bp_z = weights_at(poly, params, z);
  const double delta_exact = factor(gram(aug, bp_z.weights)).log_det() -
                             factor(gram(aug, bp_theta.weights)).log_det();
  double c = frobenius_ratio(bp_theta, bp_z);

  nlohmann::json report;
  bool pass = true;
  report["delta_exact"] = delta_exact;
  report["weight_change_frobenius"] = c;

  // Proposition-5 line integral reproduces the logdet difference.
  {
    const std::size_t md = aug.rows();
    Vector diff(md);
    for (std::size_t i = 0; i < md; ++i) diff[i] = bp_z.weights[i] - bp_theta.weights[i];
    const DenseSym b = signed_gram(aug, diff);
    const double quad = integrate(
        [&](double t) {
          Vector ct(md);
          for (std::size_t i = 0; i < md; ++i) {
            ct[i] = (1.0 - t) * bp_theta.weights[i] + t * bp_z.weights[i];
          }
          return trace_of_solve(factor(gram(aug, DiagWeights(std::move(ct)))), b);
        },
        0.0, 1.0, 64);
    const double err = std::abs(quad - delta_exact);
    report["quadrature_identity_error"] = err;
    pass = pass && err <= 1e-6;
  }

  // Mean of the randomized draws against the dense logdet difference.
  {
    SolverState state(aug, bp_theta.weights, Backend::ExactRefactor);
    DeltaEstimator est(aug, state, bp_theta.weights, bp_z.weights);
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t over[3] = {0, 0, 0};
    const double thresholds[3] = {8.0 * c, 16.0 * c, 24.0 * c};
    for (std::uint64_t i = 0; i < spec.n_draws; ++i) {
      RngStream v(spec.seed, StreamPurpose::EstimatorV, 1, i);
      RngStream t(spec.seed, StreamPurpose::EstimatorT, 1, i);
      const double y = est.sample(v, t).y;
      sum += y;
      sum_sq += y * y;
      const double dev = std::abs(y - delta_exact);
      for (int k = 0; k < 3; ++k) {
        if (dev >= thresholds[k]) ++over[k];
      }
    }
    const double n = static_cast<double>(spec.n_draws);
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0));
    const double se = sd / std::sqrt(n);
    report["y_mean"] = mean;
    report["y_se"] = se;
    report["y_mean_abs_error"] = std::abs(mean - delta_exact);
    pass = pass && std::abs(mean - delta_exact) <= 4.0 * se;

    nlohmann::json tails = nlohmann::json::array();
    const double svals[3] = {8.0, 16.0, 24.0};
    for (int k = 0; k < 3; ++k) {
      const double freq = static_cast<double>(over[k]) / n;
      const double bound = 2.0 * std::exp(-svals[k] / 8.0);
      const double slack = 3.0 * std::sqrt(std::max(freq * (1.0 - freq), 1.0 / n) / n);
      const bool ok = freq <= bound + slack;
      tails.push_back({{"s", svals[k]}, {"freq", freq}, {"bound", bound}, {"pass", ok}});
      pass = pass && ok;
    }
    report["tails"] = tails;
  }

  // Smoothed-factor accuracy on synthetic draws in the slow-change regime.
  {
    const std::size_t n_terms = default_sample_count(spec.gamma);
    const double sigma = 1.0 / (1000.0 * std::log(1.0 / spec.gamma));
    const double deltas[5] = {0.0, 0.3, 1.0, 5.0, 30.0};
    nlohmann::json points = nlohmann::json::array();
    for (int pi = 0; pi < 5; ++pi) {
      const double target = sigmoid(0.5 * deltas[pi]);
      double sum = 0.0, sum_sq = 0.0, sum_clamped = 0.0;
      std::vector<EstimatorSample> samples(n_terms);
      for (std::uint64_t r = 0; r < spec.x_runs; ++r) {
        RngStream g(spec.seed, StreamPurpose::Generic, static_cast<std::uint64_t>(pi), r);
        for (std::size_t j = 0; j < n_terms; ++j) {
          samples[j].y = deltas[pi] + sigma * g.gaussian();
        }
        const SeriesBranch branch = select_branch(samples[0].y, spec.gamma);
        const FactorEstimate fe = estimate_factor(samples, branch, n_terms);
        sum += fe.x_raw;
        sum_sq += fe.x_raw * fe.x_raw;
        sum_clamped += fe.x;
      }
      const double n = static_cast<double>(spec.x_runs);
      const double mean = sum / n;
      const double se = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0) / n);
      const bool ok = std::abs(mean - target) <= spec.gamma + 3.0 * se;
      points.push_back({{"delta", deltas[pi]},
                        {"x_raw_mean", mean},
                        {"x_raw_se", se},
                        {"x_clamped_mean", sum_clamped / n},
                        {"sigmoid_half", target},
                        {"pass", ok}});
      pass = pass && ok;
    }
    report["smoothed_factor"] = points;
  }

  // Deterministic truncation error of both series over their validated ranges.
  {
    const std::size_t n_terms = default_sample_count(spec.gamma);
    double worst_taylor = 0.0, worst_exp = 0.0;
    for (double x = -0.99; x <= 0.99; x += 0.015) {
      const SeriesBranch b{BranchKind::TaylorAtZero, x, spec.gamma};
      worst_taylor =
          std::max(worst_taylor, std::abs(series_value_at(x, b, n_terms) - sigmoid(0.5 * x)));
    }
    const double hi = 2.0 * std::log(1.0 / spec.gamma);
    for (double x = 0.25; x < hi; x += (hi - 0.25) / 200.0) {
      const SeriesBranch b{BranchKind::ExponentialAtInfinity, x, spec.gamma};
      worst_exp =
          std::max(worst_exp, std::abs(series_value_at(x, b, n_terms) - sigmoid(0.5 * x)));
    }
    report["series_truncation_taylor_max_err"] = worst_taylor;
    report["series_truncation_exponential_max_err"] = worst_exp;
    pass = pass && worst_taylor <= spec.gamma && worst_exp <= spec.gamma;
  }

  report["pass"] = pass;
  if (!spec.out_dir.empty()) write_file(spec.out_dir, "estimator_check.json", report.dump(2) + "\n");
  return report;
}

// --- benchmark ---

Polytope bench_polytope(std::size_t d, std::uint64_t seed) {
  std::vector<CooEntry> coo;
  Vector b;
  for (std::size_t i = 0; i < d; ++i) {
    coo.push_back({2 * i, i, 1.0});
    coo.push_back({2 * i + 1, i, -1.0});
    b.push_back(1.0);
    b.push_back(1.0);
  }
  RngStream rng(seed, StreamPurpose::Instance, 0);
  for (std::size_t r = 0; r < 2 * d; ++r) {
    std::size_t c1 = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(d));
    std::size_t c2 = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(d));
    c1 = std::min(c1, d - 1);
    c2 = std::min(c2, d - 1);
    if (c2 == c1) c2 = (c1 + 1) % d;
    const double v1 = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * rng.uniform01());
    const double v2 = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * rng.uniform01());
    coo.push_back({2 * d + r, std::min(c1, c2), c1 < c2 ? v1 : v2});
    coo.push_back({2 * d + r, std::max(c1, c2), c1 < c2 ? v2 : v1});
    b.push_back(1.0);
  }
  return Polytope(SparseMatrix::from_coo(4 * d, d, std::move(coo)), std::move(b),
                  std::sqrt(static_cast<double>(d)), Vector(d, 0.0));
}

nlohmann::json cmd_bench(const BenchSpec& spec) {
  nlohmann::json rows = nlohmann::json::array();
  const TargetFunction target = TargetFunction::uniform();
  for (const std::size_t d : spec.dims) {
    const Polytope poly = bench_polytope(d, spec.seed + d);
    WalkConfig base = hyperparams(poly.num_constraints(), poly.dim(), poly.radius(), target, 1.5,
                                  0.4, ProfileConstants::practical(), spec.gamma);
    for (const Backend backend : {Backend::ExactRefactor, Backend::WoodburyIncremental}) {
      for (const Mode mode : {Mode::Exact, Mode::Estimated}) {
        WalkConfig cfg = base;
        cfg.backend = backend;
        cfg.mode = mode;
        cfg.seed = spec.seed;
        DikinWalk walk(poly, target, cfg, poly.interior_witness());
        for (std::uint64_t i = 0; i < spec.warmup_steps; ++i) walk.step();
        RunOptions opts;
        opts.steps = spec.timed_steps;
        opts.keep_trace = false;
        RunResult res = run_chain(walk, opts);
        rows.push_back(
            {{"d", d},
             {"m", poly.num_constraints()},
             {"nnz", poly.a().nnz()},
             {"backend", backend == Backend::ExactRefactor ? "dense" : "woodbury"},
             {"mode", mode == Mode::Exact ? "exact" : "estimated"},
             {"steps", spec.timed_steps},
             {"accepts", res.diagnostics.accepts},
             {"rejects_outside", res.diagnostics.rejects_outside},
             {"refactorizations", res.solver.full_refactorizations},
             {"lowrank_updates", res.solver.lowrank_updates},
             {"solves", res.solver.solves},
             {"step_ms_mean", res.step_ms_mean},
             {"step_ms_median", res.step_ms_median}});
      }
    }
  }
  nlohmann::json table;
  table["rows"] = rows;
  if (!spec.out_csv.empty()) {
    std::filesystem::path p(spec.out_csv);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << bench_csv(table);
  }
  return table;
}

std::string bench_csv(const nlohmann::json& table) {
  std::string csv =
      "d,m,nnz,backend,mode,steps,accepts,rejects_outside,refactorizations,lowrank_updates,"
      "solves,step_ms_mean,step_ms_median\n";
  char buf[160];
  for (const auto& r : table.at("rows")) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%s,%s,%zu,%zu,%zu,%zu,%zu,%zu,%.6f,%.6f\n",
                  r.at("d").get<std::size_t>(), r.at("m").get<std::size_t>(),
                  r.at("nnz").get<std::size_t>(), r.at("backend").get<std::string>().c_str(),
                  r.at("mode").get<std::string>().c_str(), r.at("steps").get<std::size_t>(),
                  r.at("accepts").get<std::size_t>(), r.at("rejects_outside").get<std::size_t>(),
                  r.at("refactorizations").get<std::size_t>(),
                  r.at("lowrank_updates").get<std::size_t>(), r.at("solves").get<std::size_t>(),
                  r.at("step_ms_mean").get<double>(), r.at("step_ms_median").get<double>());
    csv += buf;
  }
  return csv;
}

// --- numeric helpers ---

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  // Nodes via Newton iteration on P_n, standard three-term recurrence.
  std::vector<std::pair<double, double>> nw(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(3.141592653589793 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    nw[i] = {-x, w};
    nw[n - 1 - i] = {x, w};
  }
  return nw;
}

double integrate(const std::function<double(double)>& fn, double a, double b, int n) {
  static std::vector<std::pair<double, double>> cached64 = gauss_legendre(64);
  const auto& nw = n == 64 ? cached64 : gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (const auto& [x, w] : nw) acc += w * fn(mid + half * x);
  return acc * half;
}

double tilted_interval_mean(const std::function<double(double)>& f, double w) {
  const double z = integrate([&f](double x) { return std::exp(-f(x)); }, -w, w, 64);
  const double num = integrate([&f](double x) { return x * std::exp(-f(x)); }, -w, w, 64);
  return num / z;
}

double grid_tv_uniform_hypercube(const std::vector<Vector>& samples, double w, int cells) {
  std::vector<std::uint64_t> grid(static_cast<std::size_t>(cells) * cells, 0);
  const auto cell = [w, cells](double x) {
    const double u = (x + w) / (2.0 * w);
    return std::min(cells - 1, std::max(0, static_cast<int>(u * cells)));
  };
  for (const auto& s : samples) {
    ++grid[static_cast<std::size_t>(cell(s[0])) * cells + cell(s[1])];
  }
  const double uniform = 1.0 / static_cast<double>(cells * cells);
  double tv = 0.0;
  for (const auto c : grid) {
    tv += std::abs(static_cast<double>(c) / static_cast<double>(samples.size()) - uniform);
  }
  return 0.5 * tv;
}

double grid_tv_pairwise(const std::vector<Vector>& a, const std::vector<Vector>& b, double lo,
                        double hi, int cells) {
  const auto hist = [lo, hi, cells](const std::vector<Vector>& s) {
    std::vector<double> grid(static_cast<std::size_t>(cells) * cells, 0.0);
    const auto cell = [lo, hi, cells](double x) {
      const double u = (x - lo) / (hi - lo);
      return std::min(cells - 1, std::max(0, static_cast<int>(u * cells)));
    };
    for (const auto& v : s) grid[static_cast<std::size_t>(cell(v[0])) * cells + cell(v[1])] += 1.0;
    for (auto& g : grid) g /= static_cast<double>(s.size());
    return grid;
  };
  const auto ha = hist(a);
  const auto hb = hist(b);
  double tv = 0.0;
  for (std::size_t i = 0; i < ha.size(); ++i) tv += std::abs(ha[i] - hb[i]);
  return 0.5 * tv;
}

std::size_t worker_pool_width(std::size_t items) {
  const char* env = std::getenv("DIKIN_THREADS");
  std::size_t width = 1;
  if (env != nullptr) {
    const long v = std::atol(env);
    if (v > 0) width = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(width, items));
}

}  // namespace dikin

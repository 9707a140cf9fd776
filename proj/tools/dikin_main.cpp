#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dikin/harness.hpp"

namespace {

void add_run_flags(CLI::App* cmd, dikin::RunManifest& m) {
  cmd->add_option("--polytope", m.polytope,
                  "hypercube:d,w | simplex:d | l1:d,r | file:path")
      ->required();
  cmd->add_option("--target", m.target, "uniform | linear:c1,... | quadratic:lam | logistic:path");
  cmd->add_option("--profile", m.profile, "paper | practical");
  cmd->add_option("--seed", m.seed, "RNG seed");
  cmd->add_option("--steps", m.steps, "number of Markov chain steps (0: schedule)");
  cmd->add_option("--burn-in", m.burn_in, "steps dropped before collecting");
  cmd->add_option("--thin", m.thin, "keep every thin-th sample");
  cmd->add_option("--mode", m.mode, "exact | estimated");
  cmd->add_option("--backend", m.backend, "dense | woodbury");
  cmd->add_option("--delta", m.delta, "target TV error for the schedule");
  cmd->add_option("--warmness", m.warmness, "warm-start parameter w");
  cmd->add_option("--gamma", m.gamma, "estimator accuracy override (0: formula)");
  cmd->add_option("--alpha", m.alpha, "step size override (0: formula)");
  cmd->add_option("--eta", m.eta, "regularizer override (0: formula)");
  cmd->add_option("--n-samples", m.n_samples, "estimator draws per step (0: formula)");
  cmd->add_option("--k-max", m.k_max, "low-rank correction capacity");
  cmd->add_option("--eps-lowrank", m.eps_lowrank, "relative weight change threshold");
  cmd->add_option("--out", m.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft-threshold Dikin walk sampler"};
  app.require_subcommand(1);

  dikin::RunManifest sample_m, validate_m;
  dikin::EstimatorCheckSpec est_spec;
  dikin::BenchSpec bench_spec;
  std::string bench_dims = "50,100,200,400";

  CLI::App* sample = app.add_subcommand("sample", "run the chain and emit samples + metrics");
  add_run_flags(sample, sample_m);

  CLI::App* validate =
      app.add_subcommand("validate", "run against a target with known moments; exit 1 on failure");
  add_run_flags(validate, validate_m);

  CLI::App* est = app.add_subcommand("estimator-check", "log-determinant estimator diagnostics");
  est->add_option("--seed", est_spec.seed, "RNG seed");
  est->add_option("--dim", est_spec.dim, "instance dimension (<= 6)");
  est->add_option("--draws", est_spec.n_draws, "Y draws for the mean/tail checks");
  est->add_option("--gamma", est_spec.gamma, "series accuracy target");
  est->add_option("--x-runs", est_spec.x_runs, "estimator runs per synthetic delta point");
  est->add_option("--out", est_spec.out_dir, "output directory");

  CLI::App* bench = app.add_subcommand("bench", "per-step cost of backend x mode over a corpus");
  bench->add_option("--dims", bench_dims, "comma-separated dimensions (empty: header-only CSV)");
  bench->add_option("--steps", bench_spec.timed_steps, "timed steps per cell");
  bench->add_option("--warmup", bench_spec.warmup_steps, "warmup steps per cell");
  bench->add_option("--gamma", bench_spec.gamma, "estimator accuracy for the estimated cells");
  bench->add_option("--seed", bench_spec.seed, "RNG seed");
  bench->add_option("--out", bench_spec.out_csv, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) {
      std::cout << dikin::cmd_sample(sample_m).dump(2) << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const auto report = dikin::cmd_validate(validate_m);
      std::cout << report.dump(2) << "\n";
      return report.at("pass").get<bool>() ? 0 : 1;
    }
    if (est->parsed()) {
      const auto report = dikin::cmd_estimator_check(est_spec);
      std::cout << report.dump(2) << "\n";
      return report.at("pass").get<bool>() ? 0 : 1;
    }
    if (bench->parsed()) {
      if (!bench_dims.empty()) {
        std::stringstream ss(bench_dims);
        std::string item;
        while (std::getline(ss, item, ',')) {
          bench_spec.dims.push_back(static_cast<std::size_t>(std::stoul(item)));
        }
      }
      const auto table = dikin::cmd_bench(bench_spec);
      std::cout << dikin::bench_csv(table);
      return 0;
    }
  } catch (const dikin::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

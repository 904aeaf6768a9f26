// fidbench: run simulated Bayesian tomography experiments, replay recorded
// measurements, and evaluate average-fidelity bounds of ensemble files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fidbench/bounds.hpp"
#include "fidbench/config.hpp"
#include "fidbench/error.hpp"
#include "fidbench/experiment.hpp"
#include "fidbench/serialization.hpp"

namespace {

using namespace fidbench;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, shots, particles, dimension, report_every;
  std::optional<std::string> prior, measurement;
  std::optional<double> resample_a, ess_fraction, epsilon;
  std::optional<bool> pure_preserving;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "RNG seed (overrides config and FIDBENCH_SEED)");
  cmd->add_option("--trials,--n-trials", o.trials, "number of trials");
  cmd->add_option("--shots,--n-shots", o.shots, "single-shot measurements per trial");
  cmd->add_option("--particles,--n-particles", o.particles, "SMC particle count");
  cmd->add_option("--prior", o.prior, "haar_pure | hilbert_schmidt | bures | arcsine");
  cmd->add_option("--dimension", o.dimension, "Hilbert-space dimension");
  cmd->add_option("--measurement", o.measurement, "covariant_rank1 | haar_basis");
  cmd->add_option("--report-every", o.report_every, "emit a trace row every N shots");
  cmd->add_option("--resample-a,--a", o.resample_a, "Liu-West shrinkage a");
  cmd->add_option("--ess-fraction", o.ess_fraction, "resample when ESS < fraction * n");
  cmd->add_option("--epsilon", o.epsilon, "weight of the fresh Hilbert-Schmidt draw");
  cmd->add_option("--pure-preserving", o.pure_preserving, "ancestor-copy resampling (true/false)");
}

ExperimentConfig resolve(const std::string& config_path, const Overrides& o) {
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
  if (const char* env = std::getenv("FIDBENCH_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw FormatError(std::string("FIDBENCH_SEED is not a non-negative integer: ") + env);
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.n_trials = *o.trials;
  if (o.shots) cfg.n_shots = *o.shots;
  if (o.particles) cfg.n_particles = *o.particles;
  if (o.dimension) cfg.dimension = *o.dimension;
  if (o.report_every) cfg.report_every = *o.report_every;
  if (o.prior) {
    auto p = parse_prior(*o.prior);
    if (!p) throw FormatError("--prior: unknown prior \"" + *o.prior + "\"");
    cfg.prior = *p;
  }
  if (o.measurement) {
    auto m = parse_measurement(*o.measurement);
    if (!m) throw FormatError("--measurement: unknown measurement \"" + *o.measurement + "\"");
    cfg.measurement = *m;
  }
  if (o.resample_a) cfg.resample.a = *o.resample_a;
  if (o.ess_fraction) cfg.resample.ess_fraction = *o.ess_fraction;
  if (o.epsilon) cfg.resample.epsilon = *o.epsilon;
  if (o.pure_preserving) cfg.resample.pure_preserving = *o.pure_preserving;
  require_valid(cfg, config_path.empty() ? "command line" : config_path + " + command line");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average-fidelity bounds and simulated Bayesian tomography"};
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir = "fidbench_out";
  Overrides run_overrides;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool checkpoint = false;
  CLI::App* run = app.add_subcommand("run", "run a multi-trial experiment");
  run->add_option("config", run_config, "experiment config (TOML)");
  run->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  run->add_option("--jobs", jobs, "worker threads for independent trials");
  run->add_flag("--checkpoint", checkpoint, "write the final posterior of each trial as JSONL");
  add_override_flags(run, run_overrides);

  std::string replay_records;
  std::string replay_config;
  std::string replay_out = "fidbench_replay";
  Overrides replay_overrides;
  CLI::App* rep = app.add_subcommand("replay", "recompute traces from a measurement-record file");
  rep->add_option("records", replay_records, "records.jsonl from a previous run")->required();
  rep->add_option("config", replay_config, "experiment config (TOML)")->required();
  rep->add_option("--out-dir", replay_out, "output directory")->capture_default_str();
  add_override_flags(rep, replay_overrides);

  std::string ensemble_path;
  CLI::App* bounds = app.add_subcommand("bounds", "bound report for an ensemble JSONL file");
  bounds->add_option("ensemble", ensemble_path, "ensemble JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = resolve(run_config, run_overrides);
      auto trials = run_experiment(cfg, out_dir, RunOptions{jobs, checkpoint});
      int failed = 0;
      for (const auto& t : trials) {
        if (t.error) {
          ++failed;
          std::cerr << "trial " << t.trial << ": " << *t.error << "\n";
        }
      }
      std::cerr << "wrote " << trials.size() << " trials to " << out_dir << "\n";
      return failed == 0 ? 0 : 3;
    }
    if (*rep) {
      ExperimentConfig cfg = resolve(replay_config, replay_overrides);
      std::ifstream in(replay_records);
      if (!in) throw FormatError("cannot open record file " + replay_records);
      auto trials = replay(cfg, read_records_jsonl(in));
      write_outputs(cfg, trials, replay_out);
      std::cerr << "replayed " << trials.size() << " trials to " << replay_out << "\n";
      return 0;
    }
    if (*bounds) {
      std::ifstream in(ensemble_path);
      if (!in) throw FormatError("cannot open ensemble file " + ensemble_path);
      BoundReport report = compute_bound_report(read_ensemble_jsonl(in));
      std::cout << bound_report_to_json(report).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "fidbench: " << err.what() << "\n";
    return 2;
  }
  return 0;
}

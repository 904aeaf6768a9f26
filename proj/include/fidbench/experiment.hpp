#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fidbench/config.hpp"
#include "fidbench/ensembles.hpp"
#include "fidbench/measure.hpp"
#include "fidbench/serialization.hpp"

namespace fidbench {

struct TraceRow {
  int trial = 0;
  int shot = 0;
  double mean_fidelity_to_truth = 0.0;
  std::optional<double> pure_optimum_fidelity_to_truth;
  double fvg_bound = 0.0;
  double super_analytic_bound = 0.0;
  double super_exact_bound = 0.0;
  double mean_estimator_value = 0.0;
  bool sigma_sharp_is_state = false;
  double ess = 0.0;

  // Not part of the CSV.
  std::optional<double> pure_optimum;  // ||E[rho]||_inf on pure support
  bool error = false;                  // SMC collapse marker row
};

struct TrialResult {
  int trial = 0;
  DensityMatrix truth = DensityMatrix::maximally_mixed(2);
  std::vector<MeasurementRecord> records;
  std::vector<TraceRow> rows;
  std::optional<WeightedEnsemble> final_posterior;
  std::optional<std::string> error;
};

/// One simulated tomography run; deterministic in (cfg.seed, trial_index).
/// An SMC collapse ends the trace with an error marker row.
TrialResult run_trial(const ExperimentConfig& cfg, int trial_index);

/// Recomputes a trial from a stored true state and measurement sequence.
/// The prior and resampling streams are regenerated from (cfg.seed, trial_index).
TrialResult replay_trial(const ExperimentConfig& cfg, int trial_index, const DensityMatrix& truth,
                         const std::vector<MeasurementRecord>& records);

/// Runs all trials on up to `jobs` threads; results are ordered by trial.
std::vector<TrialResult> run_trials(const ExperimentConfig& cfg, int jobs = 1);

// File formats ------------------------------------------------------------

extern const char* const kTraceCsvHeader;

/// Header plus one line per row; numbers as %.12g, optional cells empty.
void write_trace_csv(std::ostream& os, const std::vector<TrialResult>& trials);
std::string trace_csv(const std::vector<TrialResult>& trials);

/// Per shot: median, q25, q75 (linear interpolation) of each traced quantity
/// across trials, plus sigma_sharp_is_state frequencies and failed trials.
Json summarize(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials);

/// Linear-interpolation quantile (numpy default). `values` must be non-empty.
double quantile(std::vector<double> values, double q);

/// {"kind": "true_state", "trial": t, "re": ..., "im": ...} followed by one
/// {"trial": t, "shot": s, <measurement record fields>} line per shot.
void write_records_jsonl(std::ostream& os, const std::vector<TrialResult>& trials);

struct RecordedTrial {
  int trial = 0;
  DensityMatrix truth = DensityMatrix::maximally_mixed(2);
  std::vector<MeasurementRecord> records;
};

/// Reads a record file. A final line without a trailing newline that fails to
/// parse is treated as truncation; any other malformed line throws FormatError.
std::vector<RecordedTrial> read_records_jsonl(std::istream& is);

std::vector<TrialResult> replay(const ExperimentConfig& cfg,
                                const std::vector<RecordedTrial>& recorded);

struct RunOptions {
  int jobs = 1;
  bool checkpoint = false;  // write posterior_<trial>.jsonl
};

/// Writes trace.csv, summary.json, records.jsonl and config.toml to out_dir.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        const RunOptions& options = {});

/// Writes trace.csv and summary.json for a replayed trace.
void write_outputs(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials,
                   const std::filesystem::path& out_dir);

}  // namespace fidbench

#include "fidbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "fidbench/bounds.hpp"
#include "fidbench/error.hpp"
#include "fidbench/smc.hpp"

namespace fidbench {

namespace {

enum StreamRole : std::uint64_t { kTruthStream = 0, kPriorStream = 1, kShotStream = 2, kResampleStream = 3 };

RngStream trial_stream(const ExperimentConfig& cfg, int trial, StreamRole role) {
  return RngStream(cfg.seed, static_cast<std::uint64_t>(trial)).substream(role);
}

using RecordSource = std::function<std::optional<MeasurementRecord>(int shot)>;

TraceRow make_row(int trial, int shot, const SmcState& state, const DensityMatrix& truth) {
  BoundReport report = compute_bound_report(state.ensemble);
  TraceRow row;
  row.trial = trial;
  row.shot = shot;
  row.mean_fidelity_to_truth = fidelity(posterior_mean(state), truth);
  if (report.pure_optimum) {
    row.pure_optimum = report.pure_optimum;
    row.pure_optimum_fidelity_to_truth = fidelity(*report.pure_estimator, truth);
  }
  row.fvg_bound = report.fvg_bound;
  row.super_analytic_bound = report.super_analytic_bound;
  row.super_exact_bound = report.super_exact_bound;
  row.mean_estimator_value = report.mean_estimator_posterior_value;
  row.sigma_sharp_is_state = report.sigma_sharp_is_state;
  row.ess = state.ess_history.empty() ? static_cast<double>(state.ensemble.size())
                                      : state.ess_history.back();
  return row;
}

TrialResult execute_trial(const ExperimentConfig& cfg, int trial, const DensityMatrix& truth,
                          const RecordSource& next_record) {
  require_valid(cfg, "config");
  if (truth.dim() != cfg.dimension) {
    throw InvalidArgument("true state dimension " + std::to_string(truth.dim()) +
                          " does not match config dimension " + std::to_string(cfg.dimension));
  }
  RngStream prior_rng = trial_stream(cfg, trial, kPriorStream);
  RngStream resample_rng = trial_stream(cfg, trial, kResampleStream);

  std::vector<DensityMatrix> particles;
  particles.reserve(cfg.n_particles);
  for (int j = 0; j < cfg.n_particles; ++j) {
    particles.push_back(sample_prior(cfg.prior, cfg.dimension, prior_rng));
  }
  SmcState state(WeightedEnsemble::uniform(std::move(particles)));

  TrialResult result;
  result.trial = trial;
  result.truth = truth;
  result.rows.push_back(make_row(trial, 0, state, truth));

  const int every = cfg.effective_report_every();
  for (int shot = 1; shot <= cfg.n_shots; ++shot) {
    std::optional<MeasurementRecord> record = next_record(shot);
    if (!record) break;
    if (record->dim() != cfg.dimension) {
      throw InvalidArgument("measurement record dimension does not match config");
    }
    result.records.push_back(*record);
    try {
      state = bayes_update(state, *record, cfg.resample, resample_rng);
    } catch (const SmcCollapse& collapse) {
      TraceRow marker;
      marker.trial = trial;
      marker.shot = shot;
      marker.error = true;
      result.rows.push_back(marker);
      result.error = collapse.what();
      return result;
    }
    bool last = shot == cfg.n_shots;
    if (shot % every == 0 || last) result.rows.push_back(make_row(trial, shot, state, truth));
  }
  result.final_posterior = state.ensemble;
  return result;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, int trial_index) {
  require_valid(cfg, "config");
  RngStream truth_rng = trial_stream(cfg, trial_index, kTruthStream);
  DensityMatrix truth = sample_prior(cfg.prior, cfg.dimension, truth_rng);
  RngStream shot_rng = trial_stream(cfg, trial_index, kShotStream);
  return execute_trial(cfg, trial_index, truth, [&](int) -> std::optional<MeasurementRecord> {
    return simulate_shot(cfg.measurement, truth, shot_rng);
  });
}

TrialResult replay_trial(const ExperimentConfig& cfg, int trial_index, const DensityMatrix& truth,
                         const std::vector<MeasurementRecord>& records) {
  return execute_trial(cfg, trial_index, truth, [&](int shot) -> std::optional<MeasurementRecord> {
    if (shot > static_cast<int>(records.size())) return std::nullopt;
    return records[shot - 1];
  });
}

std::vector<TrialResult> run_trials(const ExperimentConfig& cfg, int jobs) {
  require_valid(cfg, "config");
  std::vector<std::optional<TrialResult>> slots(cfg.n_trials);
  std::vector<std::exception_ptr> failures(cfg.n_trials);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < cfg.n_trials; t = next++) {
      try {
        slots[t] = run_trial(cfg, t);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  };
  int threads = std::clamp(jobs, 1, cfg.n_trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<TrialResult> out;
  out.reserve(cfg.n_trials);
  for (int t = 0; t < cfg.n_trials; ++t) {
    if (failures[t]) std::rethrow_exception(failures[t]);
    out.push_back(std::move(*slots[t]));
  }
  return out;
}

const char* const kTraceCsvHeader =
    "trial,shot,mean_fidelity_to_truth,pure_optimum_fidelity_to_truth,fvg_bound,"
    "super_analytic_bound,super_exact_bound,mean_estimator_value,sigma_sharp_is_state,ess";

void write_trace_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
  os << kTraceCsvHeader << '\n';
  for (const auto& t : trials) {
    for (const auto& r : t.rows) {
      os << r.trial << ',' << r.shot << ',';
      if (r.error) {
        os << ",,,,,,,\n";
        continue;
      }
      os << format_real(r.mean_fidelity_to_truth) << ','
         << (r.pure_optimum_fidelity_to_truth ? format_real(*r.pure_optimum_fidelity_to_truth) : "")
         << ',' << format_real(r.fvg_bound) << ',' << format_real(r.super_analytic_bound) << ','
         << format_real(r.super_exact_bound) << ',' << format_real(r.mean_estimator_value) << ','
         << (r.sigma_sharp_is_state ? "true" : "false") << ',' << format_real(r.ess) << '\n';
    }
  }
}

std::string trace_csv(const std::vector<TrialResult>& trials) {
  std::ostringstream os;
  write_trace_csv(os, trials);
  return os.str();
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Json summarize(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials) {
  using Extractor = std::function<std::optional<double>(const TraceRow&)>;
  const std::vector<std::pair<const char*, Extractor>> series = {
      {"mean_fidelity_to_truth", [](const TraceRow& r) { return std::optional(r.mean_fidelity_to_truth); }},
      {"pure_optimum_fidelity_to_truth", [](const TraceRow& r) { return r.pure_optimum_fidelity_to_truth; }},
      {"fvg_bound", [](const TraceRow& r) { return std::optional(r.fvg_bound); }},
      {"super_analytic_bound", [](const TraceRow& r) { return std::optional(r.super_analytic_bound); }},
      {"super_exact_bound", [](const TraceRow& r) { return std::optional(r.super_exact_bound); }},
      {"mean_estimator_value", [](const TraceRow& r) { return std::optional(r.mean_estimator_value); }},
  };

  std::map<int, std::vector<const TraceRow*>> by_shot;
  std::size_t state_rows = 0;
  std::size_t total_rows = 0;
  for (const auto& t : trials) {
    for (const auto& r : t.rows) {
      if (r.error) continue;
      by_shot[r.shot].push_back(&r);
      ++total_rows;
      if (r.sigma_sharp_is_state) ++state_rows;
    }
  }

  Json shots = Json::array();
  for (const auto& [shot, rows] : by_shot) {
    Json entry;
    entry["shot"] = shot;
    entry["n"] = rows.size();
    for (const auto& [name, extract] : series) {
      std::vector<double> values;
      for (const TraceRow* r : rows) {
        if (auto v = extract(*r)) values.push_back(*v);
      }
      if (values.empty()) continue;
      entry[name] = {{"median", quantile(values, 0.5)},
                     {"q25", quantile(values, 0.25)},
                     {"q75", quantile(values, 0.75)}};
    }
    std::size_t is_state = 0;
    for (const TraceRow* r : rows) is_state += r->sigma_sharp_is_state ? 1 : 0;
    entry["sigma_sharp_is_state_frequency"] = static_cast<double>(is_state) / rows.size();
    shots.push_back(std::move(entry));
  }

  Json failed = Json::array();
  for (const auto& t : trials) {
    if (t.error) failed.push_back({{"trial", t.trial}, {"message", *t.error}});
  }

  Json out;
  out["dimension"] = cfg.dimension;
  out["prior"] = std::string(to_string(cfg.prior));
  out["measurement"] = std::string(to_string(cfg.measurement));
  out["n_particles"] = cfg.n_particles;
  out["n_shots"] = cfg.n_shots;
  out["n_trials"] = cfg.n_trials;
  out["seed"] = cfg.seed;
  out["sigma_sharp_is_state_frequency"] =
      total_rows == 0 ? 0.0 : static_cast<double>(state_rows) / total_rows;
  out["failed_trials"] = std::move(failed);
  out["shots"] = std::move(shots);
  return out;
}

void write_records_jsonl(std::ostream& os, const std::vector<TrialResult>& trials) {
  for (const auto& t : trials) {
    Json head;
    head["kind"] = "true_state";
    head["trial"] = t.trial;
    head["re"] = real_part_json(t.truth.matrix());
    head["im"] = imag_part_json(t.truth.matrix());
    os << head.dump() << '\n';
    for (std::size_t s = 0; s < t.records.size(); ++s) {
      Json line;
      line["trial"] = t.trial;
      line["shot"] = s + 1;
      Json record = record_to_json(t.records[s]);
      for (auto& [key, value] : record.items()) line[key] = value;
      os << line.dump() << '\n';
    }
  }
}

std::vector<RecordedTrial> read_records_jsonl(std::istream& is) {
  std::vector<RecordedTrial> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    bool complete = !is.eof();  // getline hit a newline
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      if (!complete) break;  // truncated final line
      throw FormatError("record line " + std::to_string(line_no) + ": malformed JSON");
    }
    auto where = [&](const std::string& msg) {
      return FormatError("record line " + std::to_string(line_no) + ": " + msg);
    };
    try {
      if (!j.is_object() || !j.contains("trial") || !j["trial"].is_number_integer()) {
        throw where("missing integer \"trial\"");
      }
      int trial = j["trial"].get<int>();
      if (j.value("kind", std::string()) == "true_state") {
        if (!j.contains("re") || !j.contains("im")) throw where("true_state needs re and im");
        out.push_back({trial, DensityMatrix(matrix_from_json(j["re"], j["im"])), {}});
        continue;
      }
      if (out.empty() || out.back().trial != trial) {
        throw where("record for trial " + std::to_string(trial) + " precedes its true_state line");
      }
      out.back().records.push_back(record_from_json(j));
    } catch (const FormatError& err) {
      std::string msg = err.what();
      if (msg.rfind("record line", 0) == 0) throw;
      throw where(msg);
    } catch (const InvalidArgument& err) {
      throw where(err.what());
    }
  }
  return out;
}

std::vector<TrialResult> replay(const ExperimentConfig& cfg,
                                const std::vector<RecordedTrial>& recorded) {
  std::vector<TrialResult> out;
  out.reserve(recorded.size());
  for (const auto& r : recorded) {
    if (r.truth.dim() != cfg.dimension) {
      throw FormatError("record file has dimension " + std::to_string(r.truth.dim()) +
                        " but config has " + std::to_string(cfg.dimension));
    }
    out.push_back(replay_trial(cfg, r.trial, r.truth, r.records));
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  body(os);
  if (!os) throw FormatError("write failed for " + path.string());
}

}  // namespace

void write_outputs(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, trials); });
  write_file(out_dir / "summary.json",
             [&](std::ostream& os) { os << summarize(cfg, trials).dump(2) << '\n'; });
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        const RunOptions& options) {
  std::vector<TrialResult> trials = run_trials(cfg, options.jobs);
  write_outputs(cfg, trials, out_dir);
  write_file(out_dir / "records.jsonl", [&](std::ostream& os) { write_records_jsonl(os, trials); });
  write_file(out_dir / "config.toml", [&](std::ostream& os) { os << config_to_toml(cfg); });
  if (options.checkpoint) {
    for (const auto& t : trials) {
      if (!t.final_posterior) continue;
      write_file(out_dir / ("posterior_" + std::to_string(t.trial) + ".jsonl"),
                 [&](std::ostream& os) { write_ensemble_jsonl(os, *t.final_posterior); });
    }
  }
  return trials;
}

}  // namespace fidbench

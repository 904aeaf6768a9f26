#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fidbench/ensembles.hpp"
#include "fidbench/measure.hpp"
#include "fidbench/smc.hpp"

namespace fidbench {

struct ExperimentConfig {
  int dimension = 2;
  Prior prior = Prior::haar_pure;
  int n_particles = 1000;
  int n_shots = 100;
  int n_trials = 1;
  MeasurementKind measurement = MeasurementKind::covariant_rank1;
  std::uint64_t seed = 0;
  ResampleConfig resample;
  int report_every = 0;  // 0 selects the default: 5 for d >= 8, else 1

  int effective_report_every() const {
    if (report_every > 0) return report_every;
    return dimension >= 8 ? 5 : 1;
  }
};

struct ConfigIssue {
  std::string field;  // e.g. "n_particles" or "resample.a"
  std::string message;
};

/// Range checks on every field; empty when the config is valid.
std::vector<ConfigIssue> check_config(const ExperimentConfig& cfg);

/// Parses the TOML config format: top-level ExperimentConfig fields plus a
/// [resample] table with a, ess_fraction, epsilon, pure_preserving. Unknown
/// keys, type mismatches and range violations throw FormatError with
/// "<source>:<line>: ..." messages.
ExperimentConfig parse_config_toml(std::string_view text, const std::string& source = "config");
ExperimentConfig load_config_file(const std::string& path);

/// Throws FormatError listing every issue, each prefixed by `origin`.
void require_valid(const ExperimentConfig& cfg, const std::string& origin);

/// Round-trippable TOML rendering of the config.
std::string config_to_toml(const ExperimentConfig& cfg);

}  // namespace fidbench

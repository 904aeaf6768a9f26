#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fidbench/ensembles.hpp"
#include "fidbench/measure.hpp"
#include "fidbench/rng.hpp"

namespace fidbench {

/// Liu-West style rejuvenation. Particles are shrunk toward the mean by `a`
/// and mixed with a fresh Hilbert-Schmidt draw with weight `epsilon`; both are
/// convex operations so outputs stay valid states.
struct ResampleConfig {
  double a = 0.98;
  double ess_fraction = 0.5;  // resample when ESS < ess_fraction * n
  double epsilon = 0.01;
  bool pure_preserving = false;  // forces a = 1, epsilon = 0 (ancestor copies only)
  bool enabled = true;

  double effective_a() const { return pure_preserving ? 1.0 : a; }
  double effective_epsilon() const { return pure_preserving ? 0.0 : epsilon; }
};

struct SmcState {
  WeightedEnsemble ensemble;
  int steps = 0;
  int resample_count = 0;
  std::vector<double> ess_history;

  explicit SmcState(WeightedEnsemble e) : ensemble(std::move(e)) {}
};

/// Every particle assigned zero likelihood to an observation.
class SmcCollapse : public std::runtime_error {
 public:
  SmcCollapse(int step, std::size_t n_particles, double max_likelihood);

  int step() const { return step_; }
  std::size_t n_particles() const { return n_particles_; }

 private:
  int step_;
  std::size_t n_particles_;
};

double effective_sample_size(const WeightedEnsemble& e);

/// w_j <- w_j Pr(record | rho_j) / Z, then resamples when ESS drops below
/// ess_fraction * n (if enabled). The pre-resampling ESS is appended to the
/// history. Throws SmcCollapse when Z == 0.
SmcState bayes_update(const SmcState& state, const MeasurementRecord& record,
                      const ResampleConfig& config, RngStream& rng);

/// n equal-weight particles drawn from the current posterior (see ResampleConfig).
SmcState resample(const SmcState& state, const ResampleConfig& config, RngStream& rng);

DensityMatrix posterior_mean(const SmcState& state);

}  // namespace fidbench

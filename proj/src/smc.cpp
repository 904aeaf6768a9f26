#include "fidbench/smc.hpp"

#include <algorithm>
#include <sstream>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

std::string collapse_message(int step, std::size_t n, double max_likelihood) {
  std::ostringstream os;
  os << "SMC collapse at update " << step << ": all " << n
     << " particles assign zero likelihood (max likelihood " << max_likelihood << ")";
  return os.str();
}

}  // namespace

SmcCollapse::SmcCollapse(int step, std::size_t n_particles, double max_likelihood)
    : std::runtime_error(collapse_message(step, n_particles, max_likelihood)),
      step_(step),
      n_particles_(n_particles) {}

double effective_sample_size(const WeightedEnsemble& e) {
  double sum_sq = 0.0;
  for (double w : e.weights()) sum_sq += w * w;
  return 1.0 / sum_sq;
}

SmcState bayes_update(const SmcState& state, const MeasurementRecord& record,
                      const ResampleConfig& config, RngStream& rng) {
  const WeightedEnsemble& e = state.ensemble;
  const std::size_t n = e.size();
  std::vector<double> posterior(n);
  double z = 0.0;
  double max_like = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double like = e.weights()[j] == 0.0 ? 0.0 : likelihood(record, e.particle(j));
    max_like = std::max(max_like, like);
    posterior[j] = e.weights()[j] * like;
    z += posterior[j];
  }
  if (!(z > 0.0)) throw SmcCollapse(state.steps + 1, n, max_like);
  for (double& w : posterior) w /= z;

  SmcState next = state;
  next.ensemble = e.with_weights(std::move(posterior));
  next.steps = state.steps + 1;
  double ess = effective_sample_size(next.ensemble);
  next.ess_history.push_back(ess);
  if (config.enabled && ess < config.ess_fraction * static_cast<double>(n)) {
    next = resample(next, config, rng);
  }
  return next;
}

SmcState resample(const SmcState& state, const ResampleConfig& config, RngStream& rng) {
  const WeightedEnsemble& e = state.ensemble;
  const std::size_t n = e.size();
  const int d = e.dim();
  const double a = config.effective_a();
  const double eps = config.effective_epsilon();

  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += e.weights()[j];
    cumulative[j] = acc;
  }
  CMatrix mean = e.weighted_mean();

  std::vector<DensityMatrix> particles;
  particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t j = std::min<std::size_t>(it - cumulative.begin(), n - 1);

    if (a == 1.0 && eps == 0.0) {
      particles.push_back(e.particle(j));
      continue;
    }
    CMatrix shrunk = a * e.particle(j).matrix() + (1.0 - a) * mean;
    if (eps > 0.0) {
      DensityMatrix fresh = sample_hilbert_schmidt(d, rng);
      shrunk = (1.0 - eps) * shrunk + eps * fresh.matrix();
    }
    particles.emplace_back(shrunk);
  }

  SmcState next = state;
  next.ensemble = WeightedEnsemble::uniform(std::move(particles));
  next.resample_count = state.resample_count + 1;
  return next;
}

DensityMatrix posterior_mean(const SmcState& state) {
  return DensityMatrix(state.ensemble.weighted_mean());
}

}  // namespace fidbench

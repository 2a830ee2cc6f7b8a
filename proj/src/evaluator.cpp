#include "fpomdp/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpomdp/divergence.hpp"
#include "fpomdp/episode.hpp"
#include "fpomdp/parallel.hpp"

namespace fpomdp {

double rollout_return(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                      std::size_t t_sim, std::uint64_t seed) {
  if (t_sim < 1) throw std::invalid_argument("rollout_return: T_sim must be >= 1");
  const double gamma = model.discount();
  double total = 0.0;
  double weight = 1.0;
  run_episode(model, partition, policy, t_sim, seed, [&](const EpisodeStep& step) {
    total += weight * step.reward;
    weight *= gamma;
  });
  return total;
}

SampleStats summarize(const std::vector<double>& values) {
  SampleStats stats;
  if (values.empty()) return stats;
  double sum = 0.0;
  stats.max = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    sum += v;
    stats.max = std::max(stats.max, v);
  }
  const double n = static_cast<double>(values.size());
  stats.mean = sum / n;
  if (std::isinf(stats.mean)) {
    stats.std_error = std::numeric_limits<double>::infinity();
    return stats;
  }
  if (values.size() < 2) return stats;
  // Shifted by the first sample, so identical samples give exactly zero.
  const double shift = values.front();
  double offset = 0.0;
  double squares = 0.0;
  for (double v : values) {
    offset += v - shift;
    squares += (v - shift) * (v - shift);
  }
  const double centered = std::max(0.0, squares - offset * offset / n);
  stats.std_error = std::sqrt(centered / (n - 1.0)) / std::sqrt(n);
  return stats;
}

ValueEstimate estimate_value(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                             std::size_t episodes, std::size_t t_sim, std::uint64_t seed, unsigned workers) {
  if (episodes < 2) throw std::invalid_argument("estimate_value: at least two episodes are required");
  std::vector<double> returns(episodes);
  parallel_for(episodes, workers, [&](std::size_t e) {
    returns[e] = rollout_return(model, partition, policy, t_sim, episode_seed(seed, e));
  });
  const SampleStats stats = summarize(returns);
  ValueEstimate estimate;
  estimate.mean = stats.mean;
  estimate.stddev = stats.std_error * std::sqrt(static_cast<double>(episodes));
  estimate.half_width = 1.96 * stats.std_error;
  estimate.episodes = episodes;
  return estimate;
}

DriftTrace drift_trace(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                       std::size_t episodes, std::size_t horizon, std::uint64_t seed, unsigned workers) {
  // l1[e][t], kl[e][t]
  std::vector<std::vector<double>> l1(episodes, std::vector<double>(horizon + 1));
  std::vector<std::vector<double>> kl(episodes, std::vector<double>(horizon + 1));

  parallel_for(episodes, workers, [&](std::size_t e) {
    if (horizon == 0) {
      const BeliefState belief = dirac_belief(model);
      const BeliefState simplified = simplify(belief, partition);
      l1[e][0] = l1_distance(belief.probs(), simplified.probs());
      kl[e][0] = kl_divergence(belief.probs(), simplified.probs());
      return;
    }
    run_episode(model, partition, policy, horizon, episode_seed(seed, e), [&](const EpisodeStep& step) {
      l1[e][step.t] = l1_distance(step.belief.probs(), step.simplified_joint.probs());
      kl[e][step.t] = kl_divergence(step.belief.probs(), step.simplified_joint.probs());
      if (step.t + 1 == horizon) {
        l1[e][horizon] = l1_distance(step.next_belief.probs(), step.next_simplified_joint.probs());
        kl[e][horizon] = kl_divergence(step.next_belief.probs(), step.next_simplified_joint.probs());
      }
    });
  });

  DriftTrace trace;
  trace.episodes = episodes;
  trace.policy = policy.name();
  trace.seed = seed;
  std::vector<double> column(episodes);
  for (std::size_t t = 0; t <= horizon; ++t) {
    DriftTrace::Row row;
    row.t = t;
    for (std::size_t e = 0; e < episodes; ++e) column[e] = l1[e][t];
    row.l1 = summarize(column);
    for (std::size_t e = 0; e < episodes; ++e) column[e] = kl[e][t];
    row.kl = summarize(column);
    trace.rows.push_back(row);
  }
  return trace;
}

}  // namespace fpomdp

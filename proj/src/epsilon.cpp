#include "fpomdp/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fpomdp/divergence.hpp"
#include "fpomdp/episode.hpp"
#include "fpomdp/parallel.hpp"

namespace fpomdp {

std::string to_string(DivergenceKind kind) { return kind == DivergenceKind::kl ? "KL" : "L1"; }

namespace {

struct Accumulator {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;

  void add(double value) {
    max = std::max(max, value);
    sum += value;
    ++count;
  }
  void merge(const Accumulator& other) {
    max = std::max(max, other.max);
    sum += other.sum;
    count += other.count;
  }
};

double simplification_gap(const BeliefState& phi, const ClassPartition& partition) {
  return l1_distance(phi.probs(), simplify(phi, partition).probs());
}

// Upper bound on the number of pre-simplified beliefs in the full history tree.
std::size_t history_tree_size(std::size_t branching, std::size_t depth, std::size_t cap) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (std::size_t d = 1; d <= depth; ++d) {
    if (level > cap / std::max<std::size_t>(branching, 1)) return cap + 1;
    level *= branching;
    total += level;
    if (total > cap) return cap + 1;
  }
  return total;
}

void enumerate_l1(const FactoredPomdp& model, const ClassPartition& partition, const BeliefState& simplified,
                  std::size_t remaining, Accumulator& acc) {
  if (remaining == 0) return;
  for (ActionIndex a = 0; a < model.num_actions(); ++a) {
    const auto predicted = predict(model, simplified, a);
    const auto obs = observation_distribution_from_prediction(model, predicted);
    for (ObservationIndex o = 0; o < obs.size(); ++o) {
      if (obs[o] <= kZeroProbability) continue;
      const BeliefState pre = posterior_from_prediction(model, predicted, o);
      const BeliefState next = simplify(pre, partition);
      acc.add(l1_distance(pre.probs(), next.probs()));
      enumerate_l1(model, partition, next, remaining - 1, acc);
    }
  }
}

}  // namespace

EpsilonEstimate measure_l1_eps(const FactoredPomdp& model, const ClassPartition& partition,
                               const L1SamplerConfig& config) {
  EpsilonEstimate estimate;
  estimate.kind = DivergenceKind::l1;
  estimate.depth = config.depth;
  estimate.seed = config.seed;

  const BeliefState initial = dirac_belief(model);
  Accumulator acc;
  acc.add(simplification_gap(initial, partition));

  const std::size_t branching = model.num_actions() * model.num_observations();
  if (history_tree_size(branching, config.depth, config.node_cap) <= config.node_cap) {
    estimate.exhaustive = true;
    enumerate_l1(model, partition, simplify(initial, partition), config.depth, acc);
  } else {
    const UniformRandomPolicy fallback(model.num_actions());
    const Policy& policy = config.policy ? *config.policy : fallback;
    std::vector<Accumulator> per_episode(config.episodes);
    parallel_for(config.episodes, config.workers, [&](std::size_t e) {
      run_episode(model, partition, policy, config.depth, episode_seed(config.seed, e),
                  [&](const EpisodeStep& step) {
                    per_episode[e].add(l1_distance(step.pre_simplified.probs(), step.next_simplified_joint.probs()));
                  });
    });
    for (const auto& episode : per_episode) acc.merge(episode);
  }
  estimate.max = acc.max;
  estimate.mean = acc.sum / static_cast<double>(acc.count);
  estimate.samples = acc.count;
  return estimate;
}

double kl_gap(const BeliefState& psi, const BeliefState& pre_simplified, const BeliefState& simplified) {
  const double to_simplified = kl_divergence(psi.probs(), simplified.probs());
  const double to_pre = kl_divergence(psi.probs(), pre_simplified.probs());
  if (std::isinf(to_simplified) && std::isinf(to_pre)) return std::numeric_limits<double>::infinity();
  return to_simplified - to_pre;
}

EpsilonEstimate measure_kl_eps(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                               std::size_t horizon, std::size_t episodes, std::uint64_t seed, unsigned workers) {
  EpsilonEstimate estimate;
  estimate.kind = DivergenceKind::kl;
  estimate.depth = horizon;
  estimate.seed = seed;

  std::vector<Accumulator> per_episode(episodes);
  parallel_for(episodes, workers, [&](std::size_t e) {
    run_episode(model, partition, policy, horizon, episode_seed(seed, e), [&](const EpisodeStep& step) {
      per_episode[e].add(kl_gap(step.next_belief, step.pre_simplified, step.next_simplified_joint));
    });
  });
  Accumulator acc;
  for (const auto& episode : per_episode) acc.merge(episode);
  if (acc.count == 0) {
    estimate.max = 0.0;
    estimate.mean = 0.0;
  } else {
    estimate.max = acc.max;
    estimate.mean = acc.sum / static_cast<double>(acc.count);
  }
  estimate.samples = acc.count;
  return estimate;
}

}  // namespace fpomdp

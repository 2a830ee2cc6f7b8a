#pragma once

#include <cstdint>
#include <functional>

#include "fpomdp/belief.hpp"
#include "fpomdp/partition.hpp"
#include "fpomdp/policy.hpp"

namespace fpomdp {

/// One transition of an episode in the true POMDP, with both the exact
/// belief and the simplified belief tracked along the emitted history.
struct EpisodeStep {
  std::size_t t = 0;
  const History& history;                   // rho, |rho| = t
  const BeliefState& belief;                // beta(rho)
  const SimplifiedBelief& simplified;       // beta_hat(rho)
  const BeliefState& simplified_joint;      // beta_hat(rho) expanded
  ActionIndex action = 0;
  ObservationIndex observation = 0;
  double reward = 0.0;                      // R of the hidden state at time t
  const BeliefState& next_belief;           // beta(rho; <a,o>)
  const BeliefState& pre_simplified;        // U(beta_hat(rho), <a,o>)
  const SimplifiedBelief& next_simplified;  // beta_hat(rho; <a,o>)
  const BeliefState& next_simplified_joint;
};

/// Seed of episode `index` under a master seed. Every module that samples
/// trajectories uses this, so equal seeds replay identical trajectories.
std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t index);

/// Simulates `steps` transitions under `policy` and calls `visit` once per
/// transition. The hidden state is sampled from the model; observations are
/// therefore always possible under the exact belief.
void run_episode(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                 std::size_t steps, std::uint64_t seed, const std::function<void(const EpisodeStep&)>& visit);

}  // namespace fpomdp

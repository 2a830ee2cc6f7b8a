#include "fpomdp/episode.hpp"

#include "fpomdp/rng.hpp"
#include "fpomdp/simulator.hpp"

namespace fpomdp {

std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, {stream_label::kEpisode, index});
}

void run_episode(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                 std::size_t steps, std::uint64_t seed, const std::function<void(const EpisodeStep&)>& visit) {
  SimState sim = SimState::start(model, derive_seed(seed, {0}));
  History history;
  BeliefState belief = dirac_belief(model);
  SimplifiedBelief simplified = project(belief, partition);
  BeliefState simplified_joint = simplified.expand();

  for (std::size_t t = 0; t < steps; ++t) {
    const ActionIndex a = policy.act(simplified, history, derive_seed(seed, {stream_label::kDecision, t}));
    const StepOutcome outcome = sim_step(model, sim, a);
    BeliefState next_belief = belief_update(model, belief, a, outcome.observation);
    BeliefState pre_simplified = belief_update(model, simplified_joint, a, outcome.observation);
    SimplifiedBelief next_simplified = project(pre_simplified, partition);
    BeliefState next_simplified_joint = next_simplified.expand();

    visit(EpisodeStep{t, history, belief, simplified, simplified_joint, a, outcome.observation, outcome.reward,
                      next_belief, pre_simplified, next_simplified, next_simplified_joint});

    history.steps.emplace_back(a, outcome.observation);
    belief = std::move(next_belief);
    simplified = std::move(next_simplified);
    simplified_joint = std::move(next_simplified_joint);
  }
}

}  // namespace fpomdp

#pragma once

#include <cstdint>

#include "fpomdp/model.hpp"
#include "fpomdp/rng.hpp"

namespace fpomdp {

/// Hidden state of the underlying MDP together with its own random stream.
/// Owned by exactly one worker at a time.
struct SimState {
  StateIndex state = 0;
  std::size_t step = 0;
  Rng rng;

  SimState(StateIndex initial, std::uint64_t seed) : state(initial), rng(seed) {}
  static SimState start(const FactoredPomdp& model, std::uint64_t seed) {
    return SimState(model.initial_state(), seed);
  }
};

struct StepOutcome {
  ObservationIndex observation = 0;
  /// Reward of the state that was occupied when the action was taken.
  double reward = 0.0;
};

/// Samples s' ~ T_a[s], then o ~ P(. | s'), and advances `sim` in place.
StepOutcome sim_step(const FactoredPomdp& model, SimState& sim, ActionIndex a);

}  // namespace fpomdp

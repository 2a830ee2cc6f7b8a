#include "fpomdp/simulator.hpp"

#include <stdexcept>
#include <vector>

namespace fpomdp {

StepOutcome sim_step(const FactoredPomdp& model, SimState& sim, ActionIndex a) {
  if (a >= model.num_actions()) throw std::out_of_range("sim_step: action out of range");
  StepOutcome outcome;
  outcome.reward = model.reward(sim.state);

  std::vector<double> row(model.num_states());
  model.transition_row(a, sim.state, row);
  sim.state = sim.rng.categorical(row);
  outcome.observation = sim.rng.categorical(model.observation_row(sim.state));
  ++sim.step;
  return outcome;
}

}  // namespace fpomdp

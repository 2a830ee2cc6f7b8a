#include "fpomdp/policy.hpp"

#include <stdexcept>

#include "fpomdp/rng.hpp"

namespace fpomdp {

UniformRandomPolicy::UniformRandomPolicy(std::size_t num_actions) : num_actions_(num_actions) {
  if (num_actions_ == 0) throw std::invalid_argument("UniformRandomPolicy: no actions");
}

ActionIndex UniformRandomPolicy::act(const SimplifiedBelief&, const History&, std::uint64_t decision_seed) const {
  Rng rng(decision_seed);
  return rng.index(num_actions_);
}

}  // namespace fpomdp

#pragma once

#include <cstdint>
#include <string>

#include "fpomdp/belief.hpp"
#include "fpomdp/partition.hpp"

namespace fpomdp {

/// A policy maps the current game position to an action. It sees the
/// simplified belief and the history; `decision_seed` is the randomness the
/// runner hands it for this decision. Implementations are immutable and may
/// be shared across workers.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual ActionIndex act(const SimplifiedBelief& belief, const History& history,
                          std::uint64_t decision_seed) const = 0;
  /// True when act() ignores `decision_seed`, i.e. the policy is a fixed
  /// function of the history. Exact policy evaluation requires this.
  virtual bool history_deterministic() const { return false; }
};

class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(std::size_t num_actions);
  std::string name() const override { return "uniform_random"; }
  ActionIndex act(const SimplifiedBelief&, const History&, std::uint64_t decision_seed) const override;

 private:
  std::size_t num_actions_;
};

class FixedActionPolicy final : public Policy {
 public:
  explicit FixedActionPolicy(ActionIndex action) : action_(action) {}
  std::string name() const override { return "fixed_" + std::to_string(action_); }
  ActionIndex act(const SimplifiedBelief&, const History&, std::uint64_t) const override { return action_; }
  bool history_deterministic() const override { return true; }

 private:
  ActionIndex action_;
};

}  // namespace fpomdp

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpomdp/belief.hpp"
#include "fpomdp/partition.hpp"
#include "fpomdp/policy.hpp"

namespace fpomdp {

/// Parameters of the sparse-sampling planner.
struct PlannerConfig {
  double delta = 1.0;  // target suboptimality
  double gamma = 0.9;
  double r_max = 1.0;
  std::optional<std::size_t> horizon_override;
  std::optional<std::size_t> samples_override;
  std::uint64_t seed = 0;
  ClassPartition partition;

  /// lambda = R_max / delta.
  double lambda() const { return r_max / delta; }
  /// Throws std::invalid_argument when delta <= 0, gamma outside [0, 1) or an override is 0.
  void validate() const;
};

/// H = ceil( 1/(1-gamma) * ln(4 lambda / (1-gamma)^3) ), at least 1.
/// Returns the override verbatim when one is set.
std::size_t horizon_H(const PlannerConfig& config);

/// C = ceil( 4 lambda^2/(1-gamma)^6 * (2H ln(4|A| H lambda^2/(1-gamma)^4) + ln(4 lambda/(1-gamma))) ),
/// at least 1, using H = horizon_H(config). Throws std::overflow_error when C
/// does not fit in 64 bits. Returns the override verbatim when one is set.
std::uint64_t sample_count_C(const PlannerConfig& config, std::size_t num_actions);

/// A game position in the sampled tree: the simplified belief (expanded to
/// the joint) and the random stream that drives sampling below it.
struct SearchNode {
  BeliefState belief;
  std::uint64_t seed = 0;
};

/// Stream used to draw the observation multiset O(rho, a) at a node.
std::uint64_t observation_stream(std::uint64_t node_seed, ActionIndex a);
/// Stream of the child reached by <a, o>. Identical observations lead to the
/// same game position, so the child depends on (a, o) and not on which
/// sample produced it.
std::uint64_t child_stream(std::uint64_t node_seed, ActionIndex a, ObservationIndex o);

/// Sparse-sampling lookahead over the simplified belief MDP.
///
/// Q(rho, a, 0) = R_hat(rho); for d > 0,
/// Q(rho, a, d) = R_hat(rho) + gamma/C * sum_{o in O(rho,a)} max_b Q(rho;<a,o>, b, d-1)
/// where O(rho, a) holds C i.i.d. draws from P_hat(. | a, rho) with
/// multiplicity, and the child belief is S(U(beta_hat, <a, o>)).
class SparseSampler {
 public:
  SparseSampler(const FactoredPomdp& model, ClassPartition partition, double gamma, std::uint64_t samples);

  double q_value(const SearchNode& node, ActionIndex a, std::size_t depth);
  double value(const SearchNode& node, std::size_t depth);
  std::vector<double> root_q(const SearchNode& node, std::size_t depth);

  /// Game positions created so far, the root included once per root_q call.
  std::size_t nodes_expanded() const noexcept { return nodes_expanded_; }

 private:
  const FactoredPomdp& model_;
  ClassPartition partition_;
  double gamma_;
  std::uint64_t samples_;
  std::size_t nodes_expanded_ = 0;
};

struct Decision {
  ActionIndex action = 0;
  std::vector<double> q;
  std::size_t nodes_expanded = 0;
  std::size_t horizon = 0;
  std::uint64_t samples = 0;
};

/// argmax_b Q(rho, b, H) with ties broken toward the lowest index. The
/// belief's partition must match the config's.
Decision choose_action(const FactoredPomdp& model, const SimplifiedBelief& belief, const PlannerConfig& config,
                       std::uint64_t root_seed);

/// The sparse-sampling planner as a policy. In history-seeded mode the root
/// stream is derived from (config.seed, history), making the policy a fixed
/// function of the history; otherwise the runner's decision seed is used.
class PlannerPolicy final : public Policy {
 public:
  PlannerPolicy(const FactoredPomdp& model, PlannerConfig config, bool history_seeded = true);

  std::string name() const override { return "sparse_sampling"; }
  ActionIndex act(const SimplifiedBelief& belief, const History& history, std::uint64_t decision_seed) const override;
  bool history_deterministic() const override { return history_seeded_; }

  Decision decide(const SimplifiedBelief& belief, const History& history, std::uint64_t decision_seed) const;
  const PlannerConfig& config() const noexcept { return config_; }

 private:
  const FactoredPomdp& model_;
  PlannerConfig config_;
  bool history_seeded_;
};

enum class LookaheadMode { true_beliefs, simplified };

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double estimate, double budget);
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

inline constexpr double kDefaultNodeBudget = 1e7;

struct LookaheadResult {
  double value = 0.0;
  ActionIndex action = 0;
  std::vector<double> q;  // root Q per action (all equal to R at depth 0)
  std::size_t nodes = 0;
};

/// Exhaustive expectimax truncated at `depth`, weighting every observation by
/// its exact probability. In simplified mode the root is S(belief) and every
/// child is S(U(.)); zero-probability observations are pruned.
/// Throws BudgetExceeded when (|A||O|)^depth exceeds `node_budget`.
LookaheadResult exact_lookahead(const FactoredPomdp& model, const BeliefState& belief, std::size_t depth,
                                LookaheadMode mode, const ClassPartition& partition, double gamma,
                                double node_budget = kDefaultNodeBudget);

/// Same with the model's discount.
LookaheadResult exact_lookahead(const FactoredPomdp& model, const BeliefState& belief, std::size_t depth,
                                LookaheadMode mode, const ClassPartition& partition);

}  // namespace fpomdp

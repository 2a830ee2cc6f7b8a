#include "fpomdp/planner.hpp"

#include <cmath>
#include <limits>

#include "fpomdp/csv.hpp"
#include "fpomdp/rng.hpp"

namespace fpomdp {

void PlannerConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("planner: delta must be > 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("planner: gamma must lie in [0, 1)");
  if (!(r_max >= 0.0) || !std::isfinite(r_max)) throw std::invalid_argument("planner: r_max must be >= 0");
  if (horizon_override && *horizon_override < 1) throw std::invalid_argument("planner: horizon override must be >= 1");
  if (samples_override && *samples_override < 1) throw std::invalid_argument("planner: samples override must be >= 1");
}

std::size_t horizon_H(const PlannerConfig& config) {
  config.validate();
  if (config.horizon_override) return *config.horizon_override;
  const double slack = 1.0 - config.gamma;
  const double h = std::ceil(std::log(4.0 * config.lambda() / (slack * slack * slack)) / slack);
  if (!(h >= 1.0)) return 1;
  return static_cast<std::size_t>(h);
}

std::uint64_t sample_count_C(const PlannerConfig& config, std::size_t num_actions) {
  config.validate();
  if (config.samples_override) return *config.samples_override;
  if (num_actions == 0) throw std::invalid_argument("sample_count_C: no actions");
  const double slack = 1.0 - config.gamma;
  const double lambda = config.lambda();
  const double horizon = static_cast<double>(horizon_H(config));
  const double scale = 4.0 * lambda * lambda / std::pow(slack, 6);
  const double inner = 2.0 * horizon *
                           std::log(4.0 * static_cast<double>(num_actions) * horizon * lambda * lambda /
                                    std::pow(slack, 4)) +
                       std::log(4.0 * lambda / slack);
  const double c = std::ceil(scale * inner);
  if (!std::isfinite(c) || c >= 0x1.0p63) throw std::overflow_error("sample_count_C: C does not fit in 64 bits");
  if (!(c >= 1.0)) return 1;
  return static_cast<std::uint64_t>(c);
}

std::uint64_t observation_stream(std::uint64_t node_seed, ActionIndex a) {
  return derive_seed(node_seed, {stream_label::kObservations, a});
}

std::uint64_t child_stream(std::uint64_t node_seed, ActionIndex a, ObservationIndex o) {
  return derive_seed(node_seed, {stream_label::kChild, a, o});
}

SparseSampler::SparseSampler(const FactoredPomdp& model, ClassPartition partition, double gamma,
                             std::uint64_t samples)
    : model_(model), partition_(std::move(partition)), gamma_(gamma), samples_(samples) {
  if (samples_ == 0) throw std::invalid_argument("SparseSampler: sample count must be >= 1");
  if (partition_.num_vars() != model_.num_vars()) {
    throw std::invalid_argument("SparseSampler: partition does not match the model");
  }
}

double SparseSampler::q_value(const SearchNode& node, ActionIndex a, std::size_t depth) {
  if (a >= model_.num_actions()) throw std::out_of_range("q_value: action out of range");
  const double reward = expected_reward(model_, node.belief);
  if (depth == 0) return reward;

  const auto predicted = predict(model_, node.belief, a);
  const auto obs = observation_distribution_from_prediction(model_, predicted);
  std::vector<std::uint64_t> counts(obs.size(), 0);
  Rng rng(observation_stream(node.seed, a));
  for (std::uint64_t i = 0; i < samples_; ++i) ++counts[rng.categorical(obs)];

  double total = 0.0;
  for (ObservationIndex o = 0; o < counts.size(); ++o) {
    if (counts[o] == 0) continue;
    SearchNode child{simplify(posterior_from_prediction(model_, predicted, o), partition_),
                     child_stream(node.seed, a, o)};
    ++nodes_expanded_;
    total += static_cast<double>(counts[o]) * value(child, depth - 1);
  }
  return reward + gamma_ * total / static_cast<double>(samples_);
}

double SparseSampler::value(const SearchNode& node, std::size_t depth) {
  if (depth == 0) return expected_reward(model_, node.belief);
  double best = -std::numeric_limits<double>::infinity();
  for (ActionIndex b = 0; b < model_.num_actions(); ++b) best = std::max(best, q_value(node, b, depth));
  return best;
}

std::vector<double> SparseSampler::root_q(const SearchNode& node, std::size_t depth) {
  ++nodes_expanded_;
  std::vector<double> q(model_.num_actions());
  for (ActionIndex a = 0; a < q.size(); ++a) q[a] = q_value(node, a, depth);
  return q;
}

namespace {

ActionIndex argmax_lowest(const std::vector<double>& values) {
  ActionIndex best = 0;
  for (ActionIndex a = 1; a < values.size(); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

}  // namespace

Decision choose_action(const FactoredPomdp& model, const SimplifiedBelief& belief, const PlannerConfig& config,
                       std::uint64_t root_seed) {
  if (!(belief.partition() == config.partition)) {
    throw std::invalid_argument("choose_action: belief partition differs from the planner partition");
  }
  Decision decision;
  decision.horizon = horizon_H(config);
  decision.samples = sample_count_C(config, model.num_actions());
  SparseSampler sampler(model, config.partition, config.gamma, decision.samples);
  decision.q = sampler.root_q(SearchNode{belief.expand(), root_seed}, decision.horizon);
  decision.action = argmax_lowest(decision.q);
  decision.nodes_expanded = sampler.nodes_expanded();
  return decision;
}

PlannerPolicy::PlannerPolicy(const FactoredPomdp& model, PlannerConfig config, bool history_seeded)
    : model_(model), config_(std::move(config)), history_seeded_(history_seeded) {
  config_.validate();
}

Decision PlannerPolicy::decide(const SimplifiedBelief& belief, const History& history,
                               std::uint64_t decision_seed) const {
  const std::uint64_t root =
      history_seeded_ ? derive_seed(config_.seed, {stream_label::kPlanner, hash_history(history)}) : decision_seed;
  return choose_action(model_, belief, config_, root);
}

ActionIndex PlannerPolicy::act(const SimplifiedBelief& belief, const History& history,
                               std::uint64_t decision_seed) const {
  return decide(belief, history, decision_seed).action;
}

BudgetExceeded::BudgetExceeded(double estimate, double budget)
    : std::runtime_error("lookahead needs about " + format_double(estimate) + " nodes, budget is " +
                         format_double(budget)),
      estimate_(estimate) {}

namespace {

class Expectimax {
 public:
  Expectimax(const FactoredPomdp& model, LookaheadMode mode, const ClassPartition& partition, double gamma)
      : model_(model), mode_(mode), partition_(partition), gamma_(gamma) {}

  std::vector<double> q_values(const BeliefState& belief, std::size_t depth) {
    ++nodes_;
    const double reward = expected_reward(model_, belief);
    std::vector<double> q(model_.num_actions(), reward);
    if (depth == 0) return q;
    for (ActionIndex a = 0; a < q.size(); ++a) {
      const auto predicted = predict(model_, belief, a);
      const auto obs = observation_distribution_from_prediction(model_, predicted);
      double future = 0.0;
      for (ObservationIndex o = 0; o < obs.size(); ++o) {
        if (obs[o] <= kZeroProbability) continue;
        BeliefState child = posterior_from_prediction(model_, predicted, o);
        if (mode_ == LookaheadMode::simplified) child = simplify(child, partition_);
        future += obs[o] * value(child, depth - 1);
      }
      q[a] = reward + gamma_ * future;
    }
    return q;
  }

  double value(const BeliefState& belief, std::size_t depth) {
    const auto q = q_values(belief, depth);
    return q[argmax_lowest(q)];
  }

  std::size_t nodes() const noexcept { return nodes_; }

 private:
  const FactoredPomdp& model_;
  LookaheadMode mode_;
  const ClassPartition& partition_;
  double gamma_;
  std::size_t nodes_ = 0;
};

}  // namespace

LookaheadResult exact_lookahead(const FactoredPomdp& model, const BeliefState& belief, std::size_t depth,
                                LookaheadMode mode, const ClassPartition& partition, double gamma,
                                double node_budget) {
  const double branching = static_cast<double>(model.num_actions() * model.num_observations());
  const double estimate = std::pow(branching, static_cast<double>(depth));
  if (estimate > node_budget) throw BudgetExceeded(estimate, node_budget);
  if (partition.num_vars() != model.num_vars()) {
    throw std::invalid_argument("exact_lookahead: partition does not match the model");
  }

  Expectimax search(model, mode, partition, gamma);
  const BeliefState root = mode == LookaheadMode::simplified ? simplify(belief, partition) : belief;
  LookaheadResult result;
  result.q = search.q_values(root, depth);
  result.action = argmax_lowest(result.q);
  result.value = result.q[result.action];
  result.nodes = search.nodes();
  return result;
}

LookaheadResult exact_lookahead(const FactoredPomdp& model, const BeliefState& belief, std::size_t depth,
                                LookaheadMode mode, const ClassPartition& partition) {
  return exact_lookahead(model, belief, depth, mode, partition, model.discount());
}

}  // namespace fpomdp

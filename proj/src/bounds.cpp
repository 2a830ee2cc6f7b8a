#include "fpomdp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "fpomdp/divergence.hpp"
#include "fpomdp/episode.hpp"
#include "fpomdp/parallel.hpp"
#include "fpomdp/planner.hpp"

namespace fpomdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_eps(double eps) { return eps > 0.0 ? eps : 0.0; }

double sqrt_ratio(const BoundInputs& in) {
  if (!(in.eta > 0.0) || std::isinf(in.epsilon)) return kInf;
  return std::sqrt(2.0 * clamp_eps(in.epsilon) / in.eta);
}

// Memoizes a history-deterministic policy so that the sampled episodes and the
// evaluation trees below them share decisions.
class CachedPolicy final : public Policy {
 public:
  explicit CachedPolicy(const Policy& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  bool history_deterministic() const override { return true; }
  ActionIndex act(const SimplifiedBelief& belief, const History& history, std::uint64_t) const override {
    {
      std::lock_guard lock(mutex_);
      if (const auto it = cache_.find(history); it != cache_.end()) return it->second;
    }
    const ActionIndex a = inner_.act(belief, history, 0);
    std::lock_guard lock(mutex_);
    cache_.emplace(history, a);
    return a;
  }

 private:
  const Policy& inner_;
  mutable std::mutex mutex_;
  mutable std::map<History, ActionIndex> cache_;
};

struct GapMaxima {
  double kl = -kInf;
  double l1 = 0.0;
  void merge(const GapMaxima& other) {
    kl = std::max(kl, other.kl);
    l1 = std::max(l1, other.l1);
  }
};

struct HistoryValues {
  double v_true_opt = 0.0;   // V*
  double v_simpl_opt = 0.0;  // V_hat*
  double v_policy = 0.0;     // V^A
  double v_simpl_policy = 0.0;  // V_hat^A
  double reward_gap = 0.0;
  double obs_gap = 0.0;
  double l1 = 0.0;
  double kl = 0.0;
  GapMaxima tree_gaps;
};

class PolicyEvaluator {
 public:
  PolicyEvaluator(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy)
      : model_(model), partition_(partition), policy_(policy) {}

  // V^A truncated at `depth`, following the true observation probabilities.
  double true_value(const History& history, const BeliefState& belief, const SimplifiedBelief& simplified,
                    const BeliefState& simplified_joint, std::size_t depth, GapMaxima& gaps) const {
    const double reward = expected_reward(model_, belief);
    if (depth == 0) return reward;
    const ActionIndex a = policy_.act(simplified, history, 0);
    const auto predicted = predict(model_, belief, a);
    const auto predicted_simplified = predict(model_, simplified_joint, a);
    const auto obs = observation_distribution_from_prediction(model_, predicted);
    double future = 0.0;
    for (ObservationIndex o = 0; o < obs.size(); ++o) {
      if (obs[o] <= kZeroProbability) continue;
      const BeliefState next = posterior_from_prediction(model_, predicted, o);
      const BeliefState pre = posterior_from_prediction(model_, predicted_simplified, o);
      const SimplifiedBelief next_simplified = project(pre, partition_);
      const BeliefState next_joint = next_simplified.expand();
      gaps.kl = std::max(gaps.kl, kl_gap(next, pre, next_joint));
      gaps.l1 = std::max(gaps.l1, l1_distance(pre.probs(), next_joint.probs()));
      future += obs[o] * true_value(history.extended(a, o), next, next_simplified, next_joint, depth - 1, gaps);
    }
    return reward + model_.discount() * future;
  }

  // V_hat^A truncated at `depth`, inside the simplified belief MDP.
  double simplified_value(const History& history, const SimplifiedBelief& simplified,
                          const BeliefState& simplified_joint, std::size_t depth) const {
    const double reward = expected_reward(model_, simplified_joint);
    if (depth == 0) return reward;
    const ActionIndex a = policy_.act(simplified, history, 0);
    const auto predicted = predict(model_, simplified_joint, a);
    const auto obs = observation_distribution_from_prediction(model_, predicted);
    double future = 0.0;
    for (ObservationIndex o = 0; o < obs.size(); ++o) {
      if (obs[o] <= kZeroProbability) continue;
      const SimplifiedBelief next = project(posterior_from_prediction(model_, predicted, o), partition_);
      future += obs[o] * simplified_value(history.extended(a, o), next, next.expand(), depth - 1);
    }
    return reward + model_.discount() * future;
  }

 private:
  const FactoredPomdp& model_;
  const ClassPartition& partition_;
  const Policy& policy_;
};

struct EpisodeRecord {
  History history;              // length = horizon
  std::vector<double> kl_gaps;  // per step
  std::vector<double> l1_gaps;
};

}  // namespace

std::string to_string(BoundTag tag) {
  switch (tag) {
    case BoundTag::tracking: return "tracking";
    case BoundTag::drifting: return "drifting";
    case BoundTag::drift_l1: return "drift_L1";
    case BoundTag::drift_kl: return "drift_KL";
    case BoundTag::pinsker: return "pinsker";
    case BoundTag::reward_gap: return "reward_gap";
    case BoundTag::obsdist_gap: return "obsdist_gap";
  }
  return "unknown";
}

bool BoundReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const BoundRow& row) { return row.pass; });
}

bool BoundCheck::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.pass(); });
}

double tracking_value_bound(const BoundInputs& in) {
  const double slack = 1.0 - in.gamma;
  return in.delta + 3.0 * in.r_max / (slack * slack) * sqrt_ratio(in);
}

double drifting_value_bound(const BoundInputs& in, std::size_t t) {
  if (std::isinf(in.epsilon)) return kInf;
  const double eps = clamp_eps(in.epsilon);
  const double slack = 1.0 - in.gamma;
  return in.delta + 12.0 * eps * in.r_max / (slack * slack * slack) +
         12.0 * eps * in.r_max * static_cast<double>(t) / (slack * slack);
}

double kl_drift_bound(const BoundInputs& in) {
  if (!(in.eta > 0.0) || std::isinf(in.epsilon)) return kInf;
  return clamp_eps(in.epsilon) / in.eta;
}

double l1_from_kl_bound(const BoundInputs& in) { return sqrt_ratio(in); }

double l1_drift_bound(const BoundInputs& in, std::size_t t) {
  if (std::isinf(in.epsilon)) return kInf;
  return 4.0 * clamp_eps(in.epsilon) * static_cast<double>(t + 1);
}

BoundReport make_report(BoundTag tag, std::string suite, std::string formula, const BoundInputs& inputs,
                        const std::vector<SampleStats>& measured, const std::function<double(std::size_t)>& bound,
                        double sigmas, double truncation_slack) {
  BoundReport report;
  report.tag = tag;
  report.suite = std::move(suite);
  report.formula = std::move(formula);
  report.inputs = inputs;
  report.sigmas = sigmas;
  report.truncation_slack = truncation_slack;
  for (std::size_t t = 0; t < measured.size(); ++t) {
    BoundRow row;
    row.t = t;
    row.measured = measured[t].mean;
    row.std_error = measured[t].std_error;
    row.bound = bound(t);
    row.tolerance = sigmas * row.std_error + truncation_slack;
    if (std::isinf(row.bound)) {
      report.vacuous = true;
      row.pass = true;
    } else {
      row.pass = row.measured <= row.bound + row.tolerance;
    }
    report.rows.push_back(row);
  }
  if (report.vacuous) {
    report.warning = !(inputs.eta > 0.0) && inputs.epsilon_kind == DivergenceKind::kl
                         ? "bound is vacuous: the model is not mixing (eta = 0)"
                         : "bound is vacuous: epsilon is infinite";
  }
  return report;
}

std::vector<BoundReport> check_drift_bounds(const DriftTrace& trace, double eps_kl, double eps_l1, double eta,
                                            double sigmas) {
  std::vector<SampleStats> kl;
  std::vector<SampleStats> l1;
  for (const auto& row : trace.rows) {
    kl.push_back(row.kl);
    l1.push_back(row.l1);
  }
  BoundInputs kl_inputs{eps_kl, DivergenceKind::kl, eta, 0.0, 0.0, 0.0};
  BoundInputs l1_inputs{eps_l1, DivergenceKind::l1, eta, 0.0, 0.0, 0.0};
  std::vector<BoundReport> reports;
  reports.push_back(make_report(BoundTag::drift_kl, "belief", "E D(beta||beta_hat) <= eps_KL/eta", kl_inputs, kl,
                                [&](std::size_t) { return kl_drift_bound(kl_inputs); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::pinsker, "belief", "E ||beta-beta_hat||_1 <= sqrt(2 eps_KL/eta)", kl_inputs,
                                l1, [&](std::size_t) { return l1_from_kl_bound(kl_inputs); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::drift_l1, "belief", "E ||beta-beta_hat||_1 <= 4 eps_L1 (t+1)", l1_inputs,
                                l1, [&](std::size_t t) { return l1_drift_bound(l1_inputs, t); }, sigmas, 0.0));
  return reports;
}

double truncation_slack(const FactoredPomdp& model, std::size_t eval_depth) {
  const double gamma = model.discount();
  const auto rewards = model.rewards();
  const bool nonneg = std::all_of(rewards.begin(), rewards.end(), [](double r) { return r >= 0.0; });
  const bool nonpos = std::all_of(rewards.begin(), rewards.end(), [](double r) { return r <= 0.0; });
  const double single = std::pow(gamma, static_cast<double>(eval_depth + 1)) * v_max(model.r_max(), gamma);
  return (nonneg || nonpos) ? single : 2.0 * single;
}

ValueGapTrace measure_value_gaps(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                                 const ValueGapConfig& config) {
  if (!policy.history_deterministic()) {
    throw std::invalid_argument("measure_value_gaps: the policy must be a fixed function of the history");
  }
  if (config.episodes < 2) throw std::invalid_argument("measure_value_gaps: at least two episodes are required");
  const CachedPolicy cached(policy);
  const std::size_t horizon = config.horizon;

  // Sample histories with the policy in the true POMDP.
  std::vector<EpisodeRecord> episodes(config.episodes);
  parallel_for(config.episodes, config.workers, [&](std::size_t e) {
    EpisodeRecord& record = episodes[e];
    run_episode(model, partition, cached, horizon, episode_seed(config.seed, e), [&](const EpisodeStep& step) {
      record.history.steps.emplace_back(step.action, step.observation);
      record.kl_gaps.push_back(kl_gap(step.next_belief, step.pre_simplified, step.next_simplified_joint));
      record.l1_gaps.push_back(l1_distance(step.pre_simplified.probs(), step.next_simplified_joint.probs()));
    });
  });

  std::set<History> distinct;
  for (const auto& record : episodes) {
    History prefix;
    distinct.insert(prefix);
    for (const auto& step : record.history.steps) {
      prefix.steps.push_back(step);
      distinct.insert(prefix);
    }
  }
  const std::vector<History> histories(distinct.begin(), distinct.end());
  std::vector<HistoryValues> values(histories.size());

  const PolicyEvaluator evaluator(model, partition, cached);
  parallel_for(histories.size(), config.workers, [&](std::size_t i) {
    const History& history = histories[i];
    HistoryValues& v = values[i];
    BeliefState belief = dirac_belief(model);
    SimplifiedBelief simplified = project(belief, partition);
    BeliefState simplified_joint = simplified.expand();
    for (const auto& [a, o] : history.steps) {
      belief = belief_update(model, belief, a, o);
      simplified = project(belief_update(model, simplified_joint, a, o), partition);
      simplified_joint = simplified.expand();
    }
    v.v_true_opt = exact_lookahead(model, belief, config.eval_depth, LookaheadMode::true_beliefs, partition).value;
    v.v_simpl_opt =
        exact_lookahead(model, simplified_joint, config.eval_depth, LookaheadMode::simplified, partition).value;
    v.v_policy = evaluator.true_value(history, belief, simplified, simplified_joint, config.eval_depth, v.tree_gaps);
    v.v_simpl_policy = evaluator.simplified_value(history, simplified, simplified_joint, config.eval_depth);

    v.reward_gap = std::abs(expected_reward(model, belief) - expected_reward(model, simplified_joint));
    const ActionIndex a = cached.act(simplified, history, 0);
    v.obs_gap = l1_distance(observation_distribution(model, belief, a),
                            observation_distribution(model, simplified_joint, a));
    v.l1 = l1_distance(belief.probs(), simplified_joint.probs());
    v.kl = kl_divergence(belief.probs(), simplified_joint.probs());
  });
  auto lookup = [&](const History& h) -> const HistoryValues& {
    const auto it = std::lower_bound(histories.begin(), histories.end(), h);
    return values[static_cast<std::size_t>(it - histories.begin())];
  };

  ValueGapTrace trace;
  trace.episodes = config.episodes;
  trace.eval_depth = config.eval_depth;
  trace.distinct_histories = histories.size();
  trace.seed = config.seed;
  trace.eta = mixing_coefficient(model);
  trace.truncation_slack = truncation_slack(model, config.eval_depth);

  // Epsilons: means over sampled steps, maxima also over the evaluation trees.
  GapMaxima maxima;
  const BeliefState initial = dirac_belief(model);
  const double initial_l1 = l1_distance(initial.probs(), simplify(initial, partition).probs());
  maxima.l1 = initial_l1;
  double kl_sum = 0.0;
  double l1_sum = initial_l1;
  std::size_t steps = 0;
  for (const auto& record : episodes) {
    for (std::size_t t = 0; t < record.kl_gaps.size(); ++t) {
      maxima.kl = std::max(maxima.kl, record.kl_gaps[t]);
      maxima.l1 = std::max(maxima.l1, record.l1_gaps[t]);
      kl_sum += record.kl_gaps[t];
      l1_sum += record.l1_gaps[t];
      ++steps;
    }
  }
  for (const auto& v : values) maxima.merge(v.tree_gaps);
  trace.eps_kl = EpsilonEstimate{DivergenceKind::kl, std::isinf(maxima.kl) && maxima.kl < 0 ? 0.0 : maxima.kl,
                                 steps ? kl_sum / static_cast<double>(steps) : 0.0, steps, horizon, config.seed, false};
  trace.eps_l1 = EpsilonEstimate{DivergenceKind::l1, maxima.l1, l1_sum / static_cast<double>(steps + 1), steps + 1,
                                 horizon, config.seed, false};

  for (std::size_t t = 0; t <= horizon; ++t) {
    std::vector<double> gap, gap_simpl, transfer, planner, optimal, reward, obs, l1, kl;
    History prefix;
    bool consistent = true;
    for (const auto& record : episodes) {
      prefix.steps.assign(record.history.steps.begin(), record.history.steps.begin() + static_cast<long>(t));
      const HistoryValues& v = lookup(prefix);
      gap.push_back(std::abs(v.v_policy - v.v_true_opt));
      gap_simpl.push_back(std::abs(v.v_policy - v.v_simpl_opt));
      transfer.push_back(std::abs(v.v_policy - v.v_simpl_policy));
      planner.push_back(std::abs(v.v_simpl_policy - v.v_simpl_opt));
      optimal.push_back(std::abs(v.v_simpl_opt - v.v_true_opt));
      reward.push_back(v.reward_gap);
      obs.push_back(v.obs_gap);
      l1.push_back(v.l1);
      kl.push_back(v.kl);
    }
    ValueGapTrace::Row row;
    row.t = t;
    row.gap = summarize(gap);
    row.gap_to_simplified = summarize(gap_simpl);
    row.transfer = summarize(transfer);
    row.planner = summarize(planner);
    row.optimal = summarize(optimal);
    row.reward_gap = summarize(reward);
    row.obs_gap = summarize(obs);
    row.l1_drift = summarize(l1);
    row.kl_drift = summarize(kl);
    constexpr double kRoundOff = 1e-12;
    consistent = row.gap.mean <= row.gap_to_simplified.mean + row.optimal.mean + kRoundOff &&
                 row.gap.mean <= row.transfer.mean + row.planner.mean + row.optimal.mean + kRoundOff;
    row.consistent = consistent;
    trace.rows.push_back(row);
  }
  return trace;
}

namespace {

template <typename Field>
std::vector<SampleStats> pick(const ValueGapTrace& trace, Field field) {
  std::vector<SampleStats> out;
  for (const auto& row : trace.rows) out.push_back(row.*field);
  return out;
}

}  // namespace

std::vector<BoundReport> tracking_reports(const ValueGapTrace& trace, const FactoredPomdp& model, double delta,
                                          double sigmas) {
  const BoundInputs in{trace.eps_kl.max, DivergenceKind::kl, trace.eta, model.discount(), model.r_max(), delta};
  std::vector<BoundReport> reports;
  reports.push_back(make_report(BoundTag::tracking, "tracking",
                                "E|V^A - V*| <= delta + 3 R_max/(1-gamma)^2 sqrt(2 eps_KL/eta)", in,
                                pick(trace, &ValueGapTrace::Row::gap),
                                [&](std::size_t) { return tracking_value_bound(in); }, sigmas, trace.truncation_slack));
  reports.push_back(make_report(BoundTag::obsdist_gap, "tracking", "E||P(o|a,rho) - P_hat(o|a,rho)||_1 <= sqrt(2 eps_KL/eta)",
                                in, pick(trace, &ValueGapTrace::Row::obs_gap),
                                [&](std::size_t) { return l1_from_kl_bound(in); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::reward_gap, "tracking", "E|R_rho - R_hat_rho| <= R_max sqrt(2 eps_KL/eta)", in,
                                pick(trace, &ValueGapTrace::Row::reward_gap),
                                [&](std::size_t) { return in.r_max * l1_from_kl_bound(in); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::drift_kl, "tracking", "E D(beta||beta_hat) <= eps_KL/eta", in,
                                pick(trace, &ValueGapTrace::Row::kl_drift),
                                [&](std::size_t) { return kl_drift_bound(in); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::pinsker, "tracking", "E ||beta-beta_hat||_1 <= sqrt(2 eps_KL/eta)", in,
                                pick(trace, &ValueGapTrace::Row::l1_drift),
                                [&](std::size_t) { return l1_from_kl_bound(in); }, sigmas, 0.0));
  return reports;
}

std::vector<BoundReport> drifting_reports(const ValueGapTrace& trace, const FactoredPomdp& model, double delta,
                                          double sigmas) {
  const BoundInputs in{trace.eps_l1.max, DivergenceKind::l1, trace.eta, model.discount(), model.r_max(), delta};
  std::vector<BoundReport> reports;
  reports.push_back(make_report(
      BoundTag::drifting, "drifting",
      "E|V^A - V*| <= delta + 12 eps_L1 R_max/(1-gamma)^3 + 12 eps_L1 R_max t/(1-gamma)^2", in,
      pick(trace, &ValueGapTrace::Row::gap), [&](std::size_t t) { return drifting_value_bound(in, t); }, sigmas,
      trace.truncation_slack));
  reports.push_back(make_report(BoundTag::drift_l1, "drifting", "E ||beta-beta_hat||_1 <= 4 eps_L1 (t+1)", in,
                                pick(trace, &ValueGapTrace::Row::l1_drift),
                                [&](std::size_t t) { return l1_drift_bound(in, t); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::reward_gap, "drifting", "E|R_rho - R_hat_rho| <= 4 eps_L1 (t+1) R_max", in,
                                pick(trace, &ValueGapTrace::Row::reward_gap),
                                [&](std::size_t t) { return in.r_max * l1_drift_bound(in, t); }, sigmas, 0.0));
  reports.push_back(make_report(BoundTag::obsdist_gap, "drifting", "E||P(o|a,rho) - P_hat(o|a,rho)||_1 <= 4 eps_L1 (t+1)",
                                in, pick(trace, &ValueGapTrace::Row::obs_gap),
                                [&](std::size_t t) { return l1_drift_bound(in, t); }, sigmas, 0.0));
  return reports;
}

BoundCheck check_tracking_bound(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                                const BoundCheckConfig& config) {
  BoundCheck check;
  check.trace = measure_value_gaps(model, partition, policy, config.gaps);
  check.reports = tracking_reports(check.trace, model, config.delta, config.gaps.sigmas);
  return check;
}

BoundCheck check_drifting_bound(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                                const BoundCheckConfig& config) {
  BoundCheck check;
  check.trace = measure_value_gaps(model, partition, policy, config.gaps);
  check.reports = drifting_reports(check.trace, model, config.delta, config.gaps.sigmas);
  return check;
}

}  // namespace fpomdp

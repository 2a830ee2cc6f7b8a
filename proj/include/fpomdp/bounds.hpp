#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fpomdp/epsilon.hpp"
#include "fpomdp/evaluator.hpp"
#include "fpomdp/partition.hpp"
#include "fpomdp/policy.hpp"

namespace fpomdp {

enum class BoundTag { tracking, drifting, drift_l1, drift_kl, pinsker, reward_gap, obsdist_gap };

std::string to_string(BoundTag tag);

struct BoundInputs {
  double epsilon = 0.0;
  DivergenceKind epsilon_kind = DivergenceKind::kl;
  double eta = 0.0;
  double gamma = 0.0;
  double r_max = 0.0;
  double delta = 0.0;
};

struct BoundRow {
  std::size_t t = 0;
  double measured = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;  // sigmas * std_error + truncation slack
  bool pass = false;
};

/// One inequality checked at every recorded t. A row passes when
/// measured <= bound + tolerance. An infinite bound (eta = 0, or an infinite
/// KL epsilon) marks the report vacuous; its rows pass.
struct BoundReport {
  BoundTag tag = BoundTag::tracking;
  std::string suite;
  std::string formula;
  BoundInputs inputs;
  double sigmas = 3.0;
  double truncation_slack = 0.0;
  bool vacuous = false;
  std::string warning;
  std::vector<BoundRow> rows;

  bool pass() const;
  /// `suite_tag`, used for file names.
  std::string id() const { return suite + "_" + to_string(tag); }
};

/// Builds a report from per-t measurements and a bound function of t.
BoundReport make_report(BoundTag tag, std::string suite, std::string formula, const BoundInputs& inputs,
                        const std::vector<SampleStats>& measured, const std::function<double(std::size_t)>& bound,
                        double sigmas, double truncation_slack);

// Bound formulas. Negative epsilons are clamped to 0 (the defining
// inequality then holds with epsilon = 0).
double tracking_value_bound(const BoundInputs& in);
double drifting_value_bound(const BoundInputs& in, std::size_t t);
double kl_drift_bound(const BoundInputs& in);        // eps / eta
double l1_from_kl_bound(const BoundInputs& in);      // sqrt(2 eps / eta)
double l1_drift_bound(const BoundInputs& in, std::size_t t);  // 4 eps (t + 1)

/// KL drift eps/eta, the Pinsker-derived L1 drift (KL epsilon) and
/// the linear L1 drift (L1 epsilon) for a measured trace.
std::vector<BoundReport> check_drift_bounds(const DriftTrace& trace, double eps_kl, double eps_l1, double eta,
                                            double sigmas = 3.0);

struct ValueGapConfig {
  std::size_t episodes = 200;
  std::size_t horizon = 5;     // last recorded t
  std::size_t eval_depth = 6;  // H_eval for V* and the policy values
  std::uint64_t seed = 0;
  double sigmas = 3.0;
  unsigned workers = 0;
};

/// Per-t expectations over histories produced by running the policy in the
/// true POMDP. V values are truncated at eval_depth.
struct ValueGapTrace {
  struct Row {
    std::size_t t = 0;
    SampleStats gap;               // |V^A - V*|
    SampleStats gap_to_simplified; // |V^A - V_hat*|
    SampleStats transfer;          // |V^A - V_hat^A|
    SampleStats planner;           // |V_hat^A - V_hat*|
    SampleStats optimal;           // |V_hat* - V*|
    SampleStats reward_gap;        // |R_rho - R_hat_rho|
    SampleStats obs_gap;           // ||P(.|a,rho) - P_hat(.|a,rho)||_1, a = A(rho)
    SampleStats l1_drift;
    SampleStats kl_drift;
    bool consistent = true;        // gap <= gap_to_simplified + optimal and <= transfer + planner + optimal
  };
  std::vector<Row> rows;
  EpsilonEstimate eps_kl;
  EpsilonEstimate eps_l1;
  double eta = 0.0;
  double truncation_slack = 0.0;
  std::size_t episodes = 0;
  std::size_t eval_depth = 0;
  std::size_t distinct_histories = 0;
  std::uint64_t seed = 0;
};

/// Requires policy.history_deterministic(). Epsilons are maxima over every
/// simplification step met on the sampled histories and inside the exact
/// policy-evaluation trees below them.
ValueGapTrace measure_value_gaps(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                                 const ValueGapConfig& config);

/// gamma^(H_eval+1) * R_max / (1 - gamma), doubled when rewards take both signs.
double truncation_slack(const FactoredPomdp& model, std::size_t eval_depth);

/// Value-gap bound under KL simplification and mixing, plus the supporting
/// observation, reward, KL-drift and L1-drift inequalities.
std::vector<BoundReport> tracking_reports(const ValueGapTrace& trace, const FactoredPomdp& model, double delta,
                                          double sigmas = 3.0);
/// Linear-in-t value-gap bound under L1 simplification, plus the L1 drift,
/// reward and observation inequalities.
std::vector<BoundReport> drifting_reports(const ValueGapTrace& trace, const FactoredPomdp& model, double delta,
                                          double sigmas = 3.0);

struct BoundCheckConfig {
  ValueGapConfig gaps;
  double delta = 1.0;
};

struct BoundCheck {
  ValueGapTrace trace;
  std::vector<BoundReport> reports;
  bool pass() const;
};

BoundCheck check_tracking_bound(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                                const BoundCheckConfig& config);
BoundCheck check_drifting_bound(const FactoredPomdp& model, const ClassPartition& partition, const Policy& policy,
                                const BoundCheckConfig& config);

}  // namespace fpomdp

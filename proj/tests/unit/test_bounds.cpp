#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "fpomdp/bounds.hpp"
#include "fpomdp/generator.hpp"
#include "fpomdp/planner.hpp"
#include "oracles.hpp"

using namespace fpomdp;
using fixtures::cpt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PlannerPolicy planner_for(const FactoredPomdp& model, const ClassPartition& partition, std::size_t horizon = 2,
                          std::size_t samples = 8) {
  PlannerConfig c;
  c.delta = 1.0;
  c.gamma = model.discount();
  c.r_max = model.r_max();
  c.horizon_override = horizon;
  c.samples_override = samples;
  c.seed = 12;
  c.partition = partition;
  return PlannerPolicy(model, c);
}

// x0' = x0 xor x1, x1' a fair coin; the sensor reads x0 != x1. Rows from
// states with different parity are disjoint, so eta = 0.
FactoredPomdp unmixing_model() {
  PomdpDefinition def;
  def.num_vars = 2;
  def.actions = {"a"};
  def.observations = {"equal", "differ"};
  def.transition = {{cpt({0, 1}, {0.0, 1.0, 1.0, 0.0}), cpt({}, {0.5})}};
  def.observation_model = {{0.85, 0.15}, {0.15, 0.85}, {0.15, 0.85}, {0.85, 0.15}};
  def.rewards = {0.0, 0.3, 0.6, 1.0};
  def.r_max = 1.0;
  def.discount = 0.8;
  def.initial_state = 0;
  return FactoredPomdp(def);
}

}  // namespace

TEST_CASE("bound formulas") {
  const BoundInputs in{0.02, DivergenceKind::kl, 0.5, 0.5, 2.0, 0.1};
  CHECK(tracking_value_bound(in) == doctest::Approx(0.1 + 3.0 * 2.0 / 0.25 * std::sqrt(0.08)));
  CHECK(kl_drift_bound(in) == doctest::Approx(0.04));
  CHECK(l1_from_kl_bound(in) == doctest::Approx(std::sqrt(0.08)));
  CHECK(l1_drift_bound(in, 3) == doctest::Approx(0.32));
  CHECK(drifting_value_bound(in, 0) == doctest::Approx(0.1 + 12.0 * 0.02 * 2.0 / 0.125));
  CHECK(drifting_value_bound(in, 5) - drifting_value_bound(in, 0) ==
        doctest::Approx(5.0 * 12.0 * 0.02 * 2.0 / 0.25).epsilon(1e-12));

  BoundInputs unmixed = in;
  unmixed.eta = 0.0;
  CHECK(std::isinf(tracking_value_bound(unmixed)));
  CHECK(std::isinf(kl_drift_bound(unmixed)));
  CHECK(std::isfinite(drifting_value_bound(unmixed, 4)));

  BoundInputs negative = in;
  negative.epsilon = -0.3;
  CHECK(tracking_value_bound(negative) == 0.1);
  CHECK(l1_drift_bound(negative, 2) == 0.0);

  BoundInputs infinite = in;
  infinite.epsilon = kInf;
  CHECK(std::isinf(tracking_value_bound(infinite)));
  CHECK(std::isinf(drifting_value_bound(infinite, 0)));
}

TEST_CASE("make_report tolerance and vacuity") {
  const BoundInputs in{0.1, DivergenceKind::l1, 0.5, 0.5, 1.0, 0.0};
  std::vector<SampleStats> measured{{0.4, 0.4, 0.0}, {0.5, 0.6, 0.05}, {0.9, 1.0, 0.01}};
  const auto r = make_report(BoundTag::drift_l1, "s", "f", in, measured, [](std::size_t) { return 0.4; }, 3.0, 0.0);
  CHECK(r.id() == "s_drift_L1");
  CHECK(r.rows[0].pass);
  CHECK(r.rows[1].pass);
  CHECK(r.rows[1].tolerance == doctest::Approx(0.15));
  CHECK_FALSE(r.rows[2].pass);
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.vacuous);

  const auto slack = make_report(BoundTag::drift_l1, "s", "f", in, measured, [](std::size_t) { return 0.4; }, 3.0, 0.5);
  CHECK(slack.pass());

  const BoundInputs unmixed{0.1, DivergenceKind::kl, 0.0, 0.5, 1.0, 0.0};
  const auto v = make_report(BoundTag::tracking, "s", "f", unmixed, measured, [](std::size_t) { return kInf; }, 3.0, 0.0);
  CHECK(v.vacuous);
  CHECK(v.pass());
  CHECK(v.warning.find("eta = 0") != std::string::npos);
  for (auto tag : {BoundTag::tracking, BoundTag::drifting, BoundTag::drift_l1, BoundTag::drift_kl, BoundTag::pinsker,
                   BoundTag::reward_gap, BoundTag::obsdist_gap}) {
    CHECK(to_string(tag) != "unknown");
  }
}

TEST_CASE("truncation slack") {
  const FactoredPomdp positive = fixtures::correlated_model();
  CHECK(truncation_slack(positive, 6) == doctest::Approx(std::pow(0.9, 7.0) * 10.0));
  PomdpDefinition def = fixtures::dominant_definition();
  def.rewards = {-0.5, 1.0};
  CHECK(truncation_slack(FactoredPomdp(def), 3) == doctest::Approx(2.0 * std::pow(0.9, 4.0) * 10.0));
}

TEST_CASE("check_drift_bounds on a measured trace") {
  const FactoredPomdp model = fixtures::correlated_model();
  const auto trace = drift_trace(model, ClassPartition::singletons(2), UniformRandomPolicy(2), 300, 6, 2);
  const auto reports = check_drift_bounds(trace, 0.4, 0.8, 0.2);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].tag == BoundTag::drift_kl);
  CHECK(reports[1].tag == BoundTag::pinsker);
  CHECK(reports[2].tag == BoundTag::drift_l1);
  for (const auto& r : reports) {
    CHECK(r.rows.size() == 7);
    CHECK(r.pass());
  }
  const auto vacuous = check_drift_bounds(trace, 0.4, 0.8, 0.0);
  CHECK(vacuous[0].vacuous);
  CHECK(vacuous[1].vacuous);
  CHECK_FALSE(vacuous[2].vacuous);
}

TEST_CASE("policy values agree with independent evaluations") {
  const FactoredPomdp model = fixtures::correlated_model();
  const auto dense = oracle::dense(model);
  const oracle::Classes classes{{0}, {1}};
  ValueGapConfig config;
  config.episodes = 40;
  config.horizon = 2;
  config.eval_depth = 4;
  for (ActionIndex a = 0; a < 2; ++a) {
    const auto trace = measure_value_gaps(model, ClassPartition(classes, 2), FixedActionPolicy(a), config);
    // At t = 0 every episode sits at the empty history.
    const double v_policy = oracle::fixed_action_return(dense, a, config.eval_depth + 1);
    const std::vector<double> start{1.0, 0.0, 0.0, 0.0};
    const double v_opt = oracle::expectimax(dense, start, config.eval_depth, 0.9, {}).value;
    const double v_simpl_opt = oracle::expectimax(dense, start, config.eval_depth, 0.9, classes).value;
    CHECK(trace.rows[0].gap.mean == doctest::Approx(std::fabs(v_policy - v_opt)).epsilon(1e-12));
    CHECK(trace.rows[0].optimal.mean == doctest::Approx(std::fabs(v_simpl_opt - v_opt)).epsilon(1e-12));
    CHECK(trace.rows[0].gap.std_error == doctest::Approx(0.0));
    CHECK(trace.eps_l1.max >= oracle::l1_eps_exhaustive(dense, classes, 1) - 1e-12);
  }
  CHECK_THROWS_AS(measure_value_gaps(model, ClassPartition(classes, 2), UniformRandomPolicy(2), config),
                  std::invalid_argument);
}

TEST_CASE("single-class partition: epsilon vanishes and the gap is within delta") {
  const FactoredPomdp model = fixtures::correlated_model();
  const auto single = ClassPartition::single(2);
  BoundCheckConfig config;
  config.gaps.episodes = 60;
  config.gaps.horizon = 4;
  config.gaps.eval_depth = 4;
  const auto policy = planner_for(model, single);
  const auto tracking = check_tracking_bound(model, single, policy, config);
  const auto drifting = check_drifting_bound(model, single, policy, config);
  CHECK(tracking.trace.eps_kl.max == 0.0);
  CHECK(tracking.trace.eps_l1.max == 0.0);
  CHECK(tracking.pass());
  CHECK(drifting.pass());
  for (const auto& r : drifting.reports) {
    for (const auto& row : r.rows) {
      if (r.tag == BoundTag::drifting) CHECK(row.bound == config.delta);
    }
  }
}

TEST_CASE("generated instances satisfy the tracking and drifting bounds") {
  for (double eta : {1.0, 0.5}) {
    GeneratorSpec spec;
    spec.num_vars = 2;
    spec.eta_min = eta;
    spec.seed = 31;
    spec.classes = std::vector<std::vector<std::size_t>>{{0}, {1}};
    const FactoredPomdp model = generate_model(spec);
    const auto partition = ClassPartition::from_model(model);
    BoundCheckConfig config;
    config.gaps.episodes = 80;
    config.gaps.horizon = 10;
    config.gaps.eval_depth = 3;
    const auto policy = planner_for(model, partition);
    const auto tracking = check_tracking_bound(model, partition, policy, config);
    CHECK(tracking.trace.eta >= eta - 1e-12);
    CHECK(tracking.reports.size() == 5);
    CHECK(tracking.pass());
    for (const auto& row : tracking.trace.rows) CHECK(row.consistent);
    CHECK(check_drifting_bound(model, partition, policy, config).pass());
  }
}

TEST_CASE("unmixing model: L1 drift bound holds, KL bound is vacuous") {
  const FactoredPomdp model = unmixing_model();
  const auto partition = ClassPartition::singletons(2);
  BoundCheckConfig config;
  config.gaps.episodes = 100;
  config.gaps.horizon = 6;
  config.gaps.eval_depth = 4;
  const auto policy = planner_for(model, partition, 1, 4);
  const auto tracking = check_tracking_bound(model, partition, policy, config);
  CHECK(tracking.trace.eta == 0.0);
  CHECK(tracking.trace.eps_l1.max > 0.0);
  for (const auto& r : tracking.reports) CHECK(r.vacuous);
  CHECK(tracking.pass());
  const auto drifting = check_drifting_bound(model, partition, policy, config);
  CHECK(drifting.pass());
  for (const auto& r : drifting.reports) CHECK_FALSE(r.vacuous);
}

TEST_CASE("value-gap traces do not depend on the worker count") {
  const FactoredPomdp model = fixtures::correlated_model();
  const auto partition = ClassPartition::singletons(2);
  const auto policy = planner_for(model, partition);
  ValueGapConfig config;
  config.episodes = 50;
  config.horizon = 3;
  config.eval_depth = 3;
  config.workers = 1;
  const auto a = measure_value_gaps(model, partition, policy, config);
  config.workers = 6;
  const auto b = measure_value_gaps(model, partition, policy, config);
  CHECK(a.eps_kl.max == b.eps_kl.max);
  CHECK(a.eps_l1.max == b.eps_l1.max);
  CHECK(a.distinct_histories == b.distinct_histories);
  for (std::size_t t = 0; t <= 3; ++t) {
    CHECK(a.rows[t].gap.mean == b.rows[t].gap.mean);
    CHECK(a.rows[t].obs_gap.mean == b.rows[t].obs_gap.mean);
  }
}

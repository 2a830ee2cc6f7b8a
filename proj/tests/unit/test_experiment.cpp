#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "fpomdp/experiment.hpp"
#include "fpomdp/model_io.hpp"

using namespace fpomdp;
using nlohmann::json;

namespace {

ExperimentConfig config_for(const json& doc) {
  return experiment_config_from_json(doc, std::filesystem::path(fixtures::source_path("models")));
}

}  // namespace

TEST_CASE("config parsing") {
  const json doc = {
      {"model", "correlated2.json"},
      {"partition", {{0, 1}}},
      {"partitions", {{"split", {{0}, {1}}}}},
      {"planner", {{"delta", 0.5}, {"horizon_override", 2}, {"samples_override", 4}, {"partition_ref", "split"}}},
      {"evaluator", {{"episodes", 10}, {"T", 3}, {"T_sim", 5}, {"H_eval", 2}, {"policy", "fixed:1"}}},
      {"seed", 42},
      {"workers", 2},
  };
  const ExperimentConfig config = config_for(doc);
  CHECK(config.partition_ref == "inline");
  CHECK(config.partitions.size() == 2);
  CHECK(config.evaluator.episodes == 10);
  CHECK(config.evaluator.t_sim == 5);
  CHECK(config.workers == 2);

  const FactoredPomdp model = load_experiment_model(config);
  CHECK(model.num_vars() == 2);
  CHECK(resolve_partition(config.partition_ref, config, model).num_classes() == 1);
  CHECK(resolve_partition("singletons", config, model).num_classes() == 2);
  CHECK_THROWS_AS(resolve_partition("nope", config, model), std::invalid_argument);

  const PlannerConfig planner = make_planner_config(config, model);
  CHECK(planner.gamma == 0.9);
  CHECK(planner.delta == 0.5);
  CHECK(planner.partition.num_classes() == 2);
  CHECK(*planner.horizon_override == 2);

  CHECK(trajectory_seed(config) != check_seed(config));
  CHECK(check_seed(config) != plan_seed(config));

  CHECK_THROWS(config_for({{"evaluator", {{"episodes", 5}}}}));
  CHECK_THROWS(config_for({{"model", 3}}));
  CHECK_THROWS(config_for({{"model", "correlated2.json"}, {"evaluator", {{"episodes", 1}}}}));
  const ExperimentConfig generated = config_for({{"generator", {{"num_vars", 3}, {"seed", 2}}}});
  CHECK(load_experiment_model(generated).num_vars() == 3);
}

TEST_CASE("run_plan matches rollout_return") {
  const ExperimentConfig config = config_for({
      {"model", "correlated2.json"},
      {"planner", {{"horizon_override", 2}, {"samples_override", 4}}},
      {"seed", 3},
  });
  const FactoredPomdp model = load_experiment_model(config);
  const PlannerConfig planner = make_planner_config(config, model);
  const PlanTrace trace = run_plan(model, planner, 12, plan_seed(config));
  REQUIRE(trace.steps.size() == 12);
  const PlannerPolicy policy(model, planner, false);
  CHECK(trace.discounted_return == rollout_return(model, planner.partition, policy, 12, plan_seed(config)));
  for (const auto& step : trace.steps) {
    CHECK(step.decision.horizon == 2);
    CHECK(step.decision.q.size() == 2);
  }
  std::ostringstream csv;
  write_plan_csv(trace, csv);
  CHECK(csv.str().rfind("t,action,observation,reward,discounted_return,nodes_expanded,horizon,samples,root_q\n", 0) ==
        0);
}

TEST_CASE("plan trace on a dominant action") {
  const FactoredPomdp model(fixtures::dominant_definition());
  PlannerConfig planner;
  planner.gamma = 0.9;
  planner.r_max = 1.0;
  planner.horizon_override = 3;
  planner.samples_override = 16;
  planner.partition = ClassPartition::single(1);
  const PlanTrace trace = run_plan(model, planner, 6, 1);
  for (const auto& step : trace.steps) CHECK(model.definition().actions[step.decision.action] == "good");
  CHECK(trace.steps.back().discounted_return == trace.discounted_return);
}

TEST_CASE("measure with a single class") {
  const ExperimentConfig config = config_for({
      {"model", "correlated2.json"},
      {"partition", "single"},
      {"evaluator", {{"episodes", 50}, {"T", 4}}},
      {"seed", 8},
  });
  const FactoredPomdp model = load_experiment_model(config);
  const MeasureResult result = run_measure(config, model);
  CHECK(result.eps_l1.max == 0.0);
  CHECK(result.eps_kl.max <= 1e-12);
  CHECK(result.eta == doctest::Approx(0.2));
  CHECK(result.drift.rows.size() == 5);
  for (const auto& r : result.drift_reports) CHECK(r.pass());

  const auto dir = std::filesystem::temp_directory_path() / "fpomdp_test_measure";
  std::filesystem::remove_all(dir);
  write_measure_artifacts(config, result, dir);
  for (const char* name : {"epsilon.csv", "drift.csv", "measure_summary.json", "belief_drift_L1.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  const json summary = read_json_file(dir / "measure_summary.json");
  CHECK(summary["drift_bounds"].size() == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("check runs") {
  SUBCASE("zero epsilon passes") {
    const ExperimentConfig config = config_for({
        {"model", "correlated2.json"},
        {"partition", "single"},
        {"planner", {{"horizon_override", 2}, {"samples_override", 4}}},
        {"evaluator", {{"episodes", 20}, {"T", 3}, {"H_eval", 3}}},
        {"seed", 1},
    });
    const FactoredPomdp model = load_experiment_model(config);
    const CheckResult result = run_check(config, model);
    CHECK(result.trace.eps_l1.max == 0.0);
    CHECK(result.pass());
    const auto dir = std::filesystem::temp_directory_path() / "fpomdp_test_check";
    std::filesystem::remove_all(dir);
    write_check_artifacts(config, result, dir);
    CHECK(std::filesystem::exists(dir / "value_gaps.csv"));
    CHECK(read_json_file(dir / "check_summary.json")["pass"] == true);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("unmixed model reports vacuous tracking bounds") {
    PomdpDefinition def = fixtures::independent_definition();
    for (auto& action : def.transition) {
      for (auto& c : action) {
        for (auto& p : c.table) p = p < 0.5 ? 0.0 : 1.0;
      }
    }
    const FactoredPomdp model(def);
    const auto dir = std::filesystem::temp_directory_path() / "fpomdp_test_unmixed";
    std::filesystem::create_directories(dir);
    save_model(model, dir / "m.json");
    const ExperimentConfig config = experiment_config_from_json(
        {{"model", "m.json"},
         {"planner", {{"horizon_override", 1}, {"samples_override", 2}}},
         {"evaluator", {{"episodes", 10}, {"T", 2}, {"H_eval", 2}}}},
        dir);
    const CheckResult result = run_check(config, model);
    CHECK(result.trace.eta == 0.0);
    bool any_vacuous = false;
    for (const auto& r : result.reports) {
      if (r.vacuous) {
        any_vacuous = true;
        CHECK_FALSE(r.warning.empty());
      }
    }
    CHECK(any_vacuous);
    CHECK(result.pass());
    std::filesystem::remove_all(dir);
  }
  SUBCASE("planner partition must match") {
    const ExperimentConfig config = config_for({
        {"model", "correlated2.json"},
        {"partition", "single"},
        {"planner", {{"partition_ref", "singletons"}, {"horizon_override", 1}, {"samples_override", 2}}},
        {"evaluator", {{"episodes", 4}, {"T", 1}, {"H_eval", 1}}},
    });
    CHECK_THROWS_AS(run_check(config, load_experiment_model(config)), std::invalid_argument);
  }
}

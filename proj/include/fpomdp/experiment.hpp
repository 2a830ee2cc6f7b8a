#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fpomdp/bounds.hpp"
#include "fpomdp/evaluator.hpp"
#include "fpomdp/generator.hpp"
#include "fpomdp/planner.hpp"

namespace fpomdp {

/// Planner block of an experiment config.
struct PlannerBlock {
  double delta = 1.0;
  std::optional<double> gamma_override;
  std::optional<std::size_t> horizon_override;
  std::optional<std::size_t> samples_override;
  std::optional<std::uint64_t> seed;
  std::string partition_ref;  // empty: the experiment partition
};

struct EvaluatorBlock {
  std::size_t episodes = 2000;
  std::size_t horizon = 10;     // T: last recorded t for traces and checks
  std::size_t t_sim = 20;       // steps simulated by `plan`
  std::size_t eval_depth = 6;   // H_eval
  std::size_t node_cap = 100000;
  std::string policy = "uniform_random";  // measurement policy: uniform_random | planner | fixed:<a>
};

/// An experiment: the model (file or generator), partitions, planner and
/// evaluator settings, output directory and master seed. Relative paths are
/// resolved against the config file's directory.
struct ExperimentConfig {
  std::filesystem::path base_dir;
  std::optional<std::string> model_path;  // as written in the config
  std::optional<GeneratorSpec> generator;
  std::string partition_ref = "model";
  std::map<std::string, std::vector<std::vector<std::size_t>>> partitions;
  PlannerBlock planner;
  EvaluatorBlock evaluator;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

FactoredPomdp load_experiment_model(const ExperimentConfig& config);

/// "model" (the model's classes, or one class), "single", "singletons", or a
/// key of `partitions`.
ClassPartition resolve_partition(const std::string& ref, const ExperimentConfig& config, const FactoredPomdp& model);

PlannerConfig make_planner_config(const ExperimentConfig& config, const FactoredPomdp& model);

// Labeled seeds derived from the master seed.
std::uint64_t trajectory_seed(const ExperimentConfig& config);
std::uint64_t check_seed(const ExperimentConfig& config);
std::uint64_t plan_seed(const ExperimentConfig& config);

struct PlanStep {
  std::size_t t = 0;
  Decision decision;
  ObservationIndex observation = 0;
  double reward = 0.0;
  double discounted_return = 0.0;  // through this step
};

struct PlanTrace {
  std::vector<PlanStep> steps;
  double discounted_return = 0.0;
  std::uint64_t seed = 0;
};

/// Runs the planner online in the true POMDP for `steps` steps.
PlanTrace run_plan(const FactoredPomdp& model, const PlannerConfig& planner, std::size_t steps, std::uint64_t seed);
void write_plan_csv(const PlanTrace& trace, std::ostream& out);

struct MeasureResult {
  EpsilonEstimate eps_l1;
  EpsilonEstimate eps_kl;
  double eta = 0.0;
  DriftTrace drift;
  std::vector<BoundReport> drift_reports;
};

MeasureResult run_measure(const ExperimentConfig& config, const FactoredPomdp& model);
void write_epsilon_csv(const std::vector<EpsilonEstimate>& estimates, std::ostream& out);
void write_drift_csv(const DriftTrace& trace, std::ostream& out);
void write_bound_csv(const BoundReport& report, std::ostream& out);
void write_value_gap_csv(const ValueGapTrace& trace, std::ostream& out);

/// Writes drift.csv, epsilon.csv, drift_bounds.csv files and measure_summary.json.
void write_measure_artifacts(const ExperimentConfig& config, const MeasureResult& result,
                             const std::filesystem::path& out_dir);

struct CheckResult {
  ValueGapTrace trace;
  std::vector<BoundReport> reports;  // tracking suite, then drifting suite
  double delta = 0.0;
  /// All non-vacuous reports pass.
  bool pass() const;
};

CheckResult run_check(const ExperimentConfig& config, const FactoredPomdp& model);
void write_check_artifacts(const ExperimentConfig& config, const CheckResult& result,
                           const std::filesystem::path& out_dir);

}  // namespace fpomdp

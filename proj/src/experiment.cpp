#include "fpomdp/experiment.hpp"

#include <fstream>
#include <memory>
#include <stdexcept>

#include "fpomdp/csv.hpp"
#include "fpomdp/divergence.hpp"
#include "fpomdp/episode.hpp"
#include "fpomdp/model_io.hpp"
#include "fpomdp/rng.hpp"

namespace fpomdp {

namespace {

using nlohmann::json;

template <typename T>
std::optional<T> optional_field(const json& block, const char* key) {
  const auto it = block.find(key);
  if (it == block.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::unique_ptr<Policy> make_measurement_policy(const ExperimentConfig& config, const FactoredPomdp& model,
                                                const ClassPartition& partition) {
  const std::string& name = config.evaluator.policy;
  if (name == "uniform_random") return std::make_unique<UniformRandomPolicy>(model.num_actions());
  if (name == "planner") {
    PlannerConfig planner = make_planner_config(config, model);
    if (!(planner.partition == partition)) {
      throw std::invalid_argument("config: the planner partition must match the measured partition");
    }
    return std::make_unique<PlannerPolicy>(model, std::move(planner));
  }
  if (name.rfind("fixed:", 0) == 0) {
    const std::size_t a = std::stoul(name.substr(6));
    if (a >= model.num_actions()) throw std::invalid_argument("config: fixed policy action out of range");
    return std::make_unique<FixedActionPolicy>(a);
  }
  throw std::invalid_argument("config: unknown policy '" + name + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

nlohmann::ordered_json epsilon_json(const EpsilonEstimate& e) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(e.kind);
  j["max"] = format_double(e.max);
  j["mean"] = format_double(e.mean);
  j["samples"] = e.samples;
  j["depth"] = e.depth;
  j["seed"] = e.seed;
  j["exhaustive"] = e.exhaustive;
  return j;
}

nlohmann::ordered_json report_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id();
  j["formula"] = r.formula;
  j["epsilon"] = format_double(r.inputs.epsilon);
  j["epsilon_kind"] = to_string(r.inputs.epsilon_kind);
  j["eta"] = format_double(r.inputs.eta);
  j["gamma"] = format_double(r.inputs.gamma);
  j["r_max"] = format_double(r.inputs.r_max);
  j["delta"] = format_double(r.inputs.delta);
  j["sigmas"] = format_double(r.sigmas);
  j["truncation_slack"] = format_double(r.truncation_slack);
  j["vacuous"] = r.vacuous;
  if (!r.warning.empty()) j["warning"] = r.warning;
  j["pass"] = r.pass();
  return j;
}

nlohmann::ordered_json config_echo(const ExperimentConfig& config, const ClassPartition& partition) {
  nlohmann::ordered_json j;
  if (config.model_path) j["model"] = *config.model_path;
  if (config.generator) j["generator_seed"] = config.generator->seed;
  j["partition_ref"] = config.partition_ref;
  j["partition"] = partition.classes();
  j["seed"] = config.seed;
  j["episodes"] = config.evaluator.episodes;
  j["horizon"] = config.evaluator.horizon;
  j["policy"] = config.evaluator.policy;
  return j;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw std::invalid_argument("config: document must be an object");
  ExperimentConfig config;
  config.base_dir = base_dir;
  if (const auto model = doc.find("model"); model != doc.end()) {
    if (model->is_string()) {
      config.model_path = model->get<std::string>();
    } else if (model->is_object()) {
      config.generator = generator_spec_from_json(*model);
    } else {
      throw std::invalid_argument("config: `model` must be a path or a generator spec");
    }
  } else if (const auto gen = doc.find("generator"); gen != doc.end()) {
    config.generator = generator_spec_from_json(*gen);
  } else {
    throw std::invalid_argument("config: `model` is required");
  }
  if (const auto partition = doc.find("partition"); partition != doc.end()) {
    if (partition->is_string()) {
      config.partition_ref = partition->get<std::string>();
    } else {
      config.partitions["inline"] = index_lists_from_json(*partition, "partition");
      config.partition_ref = "inline";
    }
  }
  if (const auto partitions = doc.find("partitions"); partitions != doc.end()) {
    if (!partitions->is_object()) throw std::invalid_argument("config: `partitions` must be an object");
    for (const auto& [name, value] : partitions->items()) {
      config.partitions[name] = index_lists_from_json(value, "partitions." + name);
    }
  }
  if (const auto planner = doc.find("planner"); planner != doc.end()) {
    config.planner.delta = planner->value("delta", config.planner.delta);
    config.planner.gamma_override = optional_field<double>(*planner, "gamma_override");
    config.planner.horizon_override = optional_field<std::size_t>(*planner, "horizon_override");
    config.planner.samples_override = optional_field<std::size_t>(*planner, "samples_override");
    config.planner.seed = optional_field<std::uint64_t>(*planner, "seed");
    config.planner.partition_ref = planner->value("partition_ref", std::string{});
  }
  if (const auto evaluator = doc.find("evaluator"); evaluator != doc.end()) {
    EvaluatorBlock& e = config.evaluator;
    e.episodes = evaluator->value("episodes", e.episodes);
    e.horizon = evaluator->value("T", e.horizon);
    e.t_sim = evaluator->value("T_sim", e.t_sim);
    e.eval_depth = evaluator->value("H_eval", e.eval_depth);
    e.node_cap = evaluator->value("node_cap", e.node_cap);
    e.policy = evaluator->value("policy", e.policy);
  }
  config.output_dir = doc.value("output_dir", config.output_dir);
  config.seed = doc.value("seed", config.seed);
  config.workers = doc.value("workers", config.workers);
  if (config.evaluator.episodes < 2) throw std::invalid_argument("config: evaluator.episodes must be >= 2");
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return experiment_config_from_json(read_json_file(path), path.parent_path());
}

FactoredPomdp load_experiment_model(const ExperimentConfig& config) {
  if (config.model_path) {
    std::filesystem::path path(*config.model_path);
    if (path.is_relative()) path = config.base_dir / path;
    return load_model(path);
  }
  return generate_model(*config.generator);
}

ClassPartition resolve_partition(const std::string& ref, const ExperimentConfig& config, const FactoredPomdp& model) {
  if (ref.empty() || ref == "model") return ClassPartition::from_model(model);
  if (ref == "single") return ClassPartition::single(model.num_vars());
  if (ref == "singletons") return ClassPartition::singletons(model.num_vars());
  const auto it = config.partitions.find(ref);
  if (it == config.partitions.end()) throw std::invalid_argument("config: unknown partition '" + ref + "'");
  return ClassPartition(it->second, model.num_vars());
}

PlannerConfig make_planner_config(const ExperimentConfig& config, const FactoredPomdp& model) {
  PlannerConfig planner;
  planner.delta = config.planner.delta;
  planner.gamma = config.planner.gamma_override.value_or(model.discount());
  planner.r_max = model.r_max();
  planner.horizon_override = config.planner.horizon_override;
  planner.samples_override = config.planner.samples_override;
  planner.seed = config.planner.seed.value_or(derive_seed(config.seed, {stream_label::kPlanner}));
  planner.partition = resolve_partition(
      config.planner.partition_ref.empty() ? config.partition_ref : config.planner.partition_ref, config, model);
  planner.validate();
  return planner;
}

std::uint64_t trajectory_seed(const ExperimentConfig& config) {
  return derive_seed(config.seed, {stream_label::kDrift});
}
std::uint64_t check_seed(const ExperimentConfig& config) { return derive_seed(config.seed, {stream_label::kCheck}); }
std::uint64_t plan_seed(const ExperimentConfig& config) { return derive_seed(config.seed, {stream_label::kEpisode}); }

PlanTrace run_plan(const FactoredPomdp& model, const PlannerConfig& planner, std::size_t steps, std::uint64_t seed) {
  // Records each decision while run_episode drives the simulation, so the
  // trace replays exactly what rollout_return sees under the same seed.
  class RecordingPolicy final : public Policy {
   public:
    RecordingPolicy(const FactoredPomdp& model, const PlannerConfig& config) : inner_(model, config, false) {}
    std::string name() const override { return inner_.name(); }
    ActionIndex act(const SimplifiedBelief& belief, const History& history, std::uint64_t seed) const override {
      decisions.push_back(inner_.decide(belief, history, seed));
      return decisions.back().action;
    }
    mutable std::vector<Decision> decisions;

   private:
    PlannerPolicy inner_;
  };

  const RecordingPolicy policy(model, planner);
  PlanTrace trace;
  trace.seed = seed;
  double weight = 1.0;
  run_episode(model, planner.partition, policy, steps, seed, [&](const EpisodeStep& step) {
    trace.discounted_return += weight * step.reward;
    weight *= model.discount();
    PlanStep record;
    record.t = step.t;
    record.decision = policy.decisions.back();
    record.observation = step.observation;
    record.reward = step.reward;
    record.discounted_return = trace.discounted_return;
    trace.steps.push_back(std::move(record));
  });
  return trace;
}

void write_plan_csv(const PlanTrace& trace, std::ostream& out) {
  write_csv_row(out, {"t", "action", "observation", "reward", "discounted_return", "nodes_expanded", "horizon",
                      "samples", "root_q"});
  for (const auto& step : trace.steps) {
    std::string q;
    for (std::size_t a = 0; a < step.decision.q.size(); ++a) {
      if (a) q += ';';
      q += format_double(step.decision.q[a]);
    }
    write_csv_row(out, {std::to_string(step.t), std::to_string(step.decision.action), std::to_string(step.observation),
                        format_double(step.reward), format_double(step.discounted_return),
                        std::to_string(step.decision.nodes_expanded), std::to_string(step.decision.horizon),
                        std::to_string(step.decision.samples), q});
  }
}

MeasureResult run_measure(const ExperimentConfig& config, const FactoredPomdp& model) {
  const ClassPartition partition = resolve_partition(config.partition_ref, config, model);
  const auto policy = make_measurement_policy(config, model, partition);
  const std::uint64_t seed = trajectory_seed(config);
  const EvaluatorBlock& e = config.evaluator;

  MeasureResult result;
  L1SamplerConfig sampler;
  sampler.depth = e.horizon;
  sampler.node_cap = e.node_cap;
  sampler.episodes = e.episodes;
  sampler.seed = seed;
  sampler.policy = policy.get();
  sampler.workers = config.workers;
  result.eps_l1 = measure_l1_eps(model, partition, sampler);
  result.eps_kl = measure_kl_eps(model, partition, *policy, e.horizon, e.episodes, seed, config.workers);
  result.eta = mixing_coefficient(model);
  result.drift = drift_trace(model, partition, *policy, e.episodes, e.horizon, seed, config.workers);
  result.drift_reports = check_drift_bounds(result.drift, result.eps_kl.max, result.eps_l1.max, result.eta);
  return result;
}

void write_epsilon_csv(const std::vector<EpsilonEstimate>& estimates, std::ostream& out) {
  write_csv_row(out, {"kind", "max", "mean", "samples", "depth", "seed"});
  for (const auto& e : estimates) {
    write_csv_row(out, {to_string(e.kind), format_double(e.max), format_double(e.mean), std::to_string(e.samples),
                        std::to_string(e.depth), std::to_string(e.seed)});
  }
}

void write_drift_csv(const DriftTrace& trace, std::ostream& out) {
  write_csv_row(out, {"t", "l1_mean", "l1_max", "l1_stderr", "kl_mean", "kl_max", "kl_stderr"});
  for (const auto& row : trace.rows) {
    write_csv_row(out, {std::to_string(row.t), format_double(row.l1.mean), format_double(row.l1.max),
                        format_double(row.l1.std_error), format_double(row.kl.mean), format_double(row.kl.max),
                        format_double(row.kl.std_error)});
  }
}

void write_bound_csv(const BoundReport& report, std::ostream& out) {
  write_csv_row(out, {"t", "measured", "stderr", "bound", "tolerance", "pass"});
  for (const auto& row : report.rows) {
    write_csv_row(out, {std::to_string(row.t), format_double(row.measured), format_double(row.std_error),
                        format_double(row.bound), format_double(row.tolerance), row.pass ? "1" : "0"});
  }
}

void write_value_gap_csv(const ValueGapTrace& trace, std::ostream& out) {
  write_csv_row(out, {"t", "gap_mean", "gap_stderr", "gap_to_simplified_opt", "value_transfer", "planner_gap",
                      "optimal_gap", "reward_gap", "obs_gap", "l1_drift", "kl_drift", "consistent"});
  for (const auto& row : trace.rows) {
    write_csv_row(out, {std::to_string(row.t), format_double(row.gap.mean), format_double(row.gap.std_error),
                        format_double(row.gap_to_simplified.mean), format_double(row.transfer.mean),
                        format_double(row.planner.mean), format_double(row.optimal.mean),
                        format_double(row.reward_gap.mean), format_double(row.obs_gap.mean),
                        format_double(row.l1_drift.mean), format_double(row.kl_drift.mean),
                        row.consistent ? "1" : "0"});
  }
}

void write_measure_artifacts(const ExperimentConfig& config, const MeasureResult& result,
                             const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_with(out_dir / "epsilon.csv", [&](std::ostream& out) { write_epsilon_csv({result.eps_l1, result.eps_kl}, out); });
  write_with(out_dir / "drift.csv", [&](std::ostream& out) { write_drift_csv(result.drift, out); });
  for (const auto& report : result.drift_reports) {
    write_with(out_dir / (report.id() + ".csv"), [&](std::ostream& out) { write_bound_csv(report, out); });
  }

  const FactoredPomdp model = load_experiment_model(config);
  nlohmann::ordered_json summary;
  summary["config"] = config_echo(config, resolve_partition(config.partition_ref, config, model));
  summary["eta"] = format_double(result.eta);
  summary["epsilon"] = {epsilon_json(result.eps_l1), epsilon_json(result.eps_kl)};
  summary["trajectory_seed"] = result.drift.seed;
  summary["drift_policy"] = result.drift.policy;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& report : result.drift_reports) reports.push_back(report_json(report));
  summary["drift_bounds"] = std::move(reports);
  write_file(out_dir / "measure_summary.json", summary.dump(2) + "\n");
}

bool CheckResult::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.vacuous || r.pass(); });
}

CheckResult run_check(const ExperimentConfig& config, const FactoredPomdp& model) {
  const ClassPartition partition = resolve_partition(config.partition_ref, config, model);
  const PlannerConfig planner = make_planner_config(config, model);
  if (!(planner.partition == partition)) {
    throw std::invalid_argument("config: the planner partition must match the measured partition");
  }
  const PlannerPolicy policy(model, planner);
  ValueGapConfig gaps;
  gaps.episodes = config.evaluator.episodes;
  gaps.horizon = config.evaluator.horizon;
  gaps.eval_depth = config.evaluator.eval_depth;
  gaps.seed = check_seed(config);
  gaps.workers = config.workers;

  CheckResult result;
  result.delta = planner.delta;
  result.trace = measure_value_gaps(model, partition, policy, gaps);
  result.reports = tracking_reports(result.trace, model, planner.delta, gaps.sigmas);
  auto drifting = drifting_reports(result.trace, model, planner.delta, gaps.sigmas);
  result.reports.insert(result.reports.end(), drifting.begin(), drifting.end());
  return result;
}

void write_check_artifacts(const ExperimentConfig& config, const CheckResult& result,
                           const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_with(out_dir / "value_gaps.csv", [&](std::ostream& out) { write_value_gap_csv(result.trace, out); });
  for (const auto& report : result.reports) {
    write_with(out_dir / (report.id() + ".csv"), [&](std::ostream& out) { write_bound_csv(report, out); });
  }
  const FactoredPomdp model = load_experiment_model(config);
  nlohmann::ordered_json summary;
  summary["config"] = config_echo(config, resolve_partition(config.partition_ref, config, model));
  summary["delta"] = format_double(result.delta);
  summary["eta"] = format_double(result.trace.eta);
  summary["epsilon"] = {epsilon_json(result.trace.eps_l1), epsilon_json(result.trace.eps_kl)};
  summary["eval_depth"] = result.trace.eval_depth;
  summary["truncation_slack"] = format_double(result.trace.truncation_slack);
  summary["distinct_histories"] = result.trace.distinct_histories;
  summary["check_seed"] = result.trace.seed;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& report : result.reports) reports.push_back(report_json(report));
  summary["reports"] = std::move(reports);
  summary["pass"] = result.pass();
  write_file(out_dir / "check_summary.json", summary.dump(2) + "\n");
}

}  // namespace fpomdp

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fpomdp/csv.hpp"
#include "fpomdp/divergence.hpp"
#include "fpomdp/evaluator.hpp"
#include "fpomdp/experiment.hpp"
#include "fpomdp/generator.hpp"
#include "fpomdp/model_io.hpp"
#include "fpomdp/planner.hpp"

namespace {

using namespace fpomdp;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kBudget = 3 };

struct Options {
  std::string config;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t depth = 0;
  std::string mode = "true";
  std::string belief;
  std::string partition = "model";
  unsigned workers = 0;
  bool pretty = false;
};

ExperimentConfig load_config(const Options& opt) {
  ExperimentConfig config = load_experiment_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.workers) config.workers = opt.workers;
  return config;
}

std::filesystem::path output_dir(const Options& opt, const ExperimentConfig& config) {
  return opt.out.empty() ? std::filesystem::path(config.output_dir) : std::filesystem::path(opt.out);
}

int cmd_gen(const Options& opt) {
  GeneratorSpec spec;
  if (!opt.config.empty()) {
    const auto doc = read_json_file(opt.config);
    spec = generator_spec_from_json(doc.contains("generator") ? doc.at("generator") : doc);
  }
  if (opt.seed) spec.seed = *opt.seed;
  const std::string text = serialize_model(generate_model(spec));
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + opt.out);
    out << text;
  }
  return kOk;
}

int cmd_validate(const Options& opt) {
  const FactoredPomdp model = load_model(opt.model);
  std::cout << "valid: " << model.num_vars() << " variables, " << model.num_actions() << " actions, "
            << model.num_observations() << " observations\n";
  return kOk;
}

int cmd_plan(const Options& opt) {
  const ExperimentConfig config = load_config(opt);
  const FactoredPomdp model = load_experiment_model(config);
  const PlannerConfig planner = make_planner_config(config, model);
  const auto start = std::chrono::steady_clock::now();
  const PlanTrace trace = run_plan(model, planner, config.evaluator.t_sim, plan_seed(config));
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  std::cerr << "wall_time_s=" << wall.count() << "\n";

  if (!opt.out.empty()) {
    std::filesystem::create_directories(opt.out);
    std::ofstream out(std::filesystem::path(opt.out) / "plan.csv", std::ios::binary);
    write_plan_csv(trace, out);
  }
  if (opt.pretty) {
    std::cout << "H=" << horizon_H(planner) << " C=" << sample_count_C(planner, model.num_actions()) << "\n";
    std::cout << std::setw(4) << "t" << std::setw(8) << "action" << std::setw(6) << "obs" << std::setw(10)
              << "reward" << std::setw(12) << "return" << std::setw(10) << "nodes" << "\n";
    for (const auto& s : trace.steps) {
      std::cout << std::setw(4) << s.t << std::setw(8) << model.definition().actions[s.decision.action]
                << std::setw(6) << s.observation << std::setw(10) << std::setprecision(4) << s.reward
                << std::setw(12) << s.discounted_return << std::setw(10) << s.decision.nodes_expanded << "\n";
    }
  } else if (opt.out.empty()) {
    write_plan_csv(trace, std::cout);
  } else {
    std::cout << "discounted_return=" << format_double(trace.discounted_return) << "\n";
  }
  return kOk;
}

BeliefState parse_belief(const std::string& spec, const FactoredPomdp& model) {
  if (spec.empty()) return BeliefState::point_mass(model.num_states(), model.initial_state());
  nlohmann::json doc;
  if (spec.front() == '[' || std::isdigit(static_cast<unsigned char>(spec.front()))) {
    doc = parse_json_text(spec);
  } else {
    doc = read_json_file(spec);
  }
  if (doc.is_number_unsigned()) {
    const auto s = doc.get<std::size_t>();
    if (s >= model.num_states()) throw std::invalid_argument("belief: state index out of range");
    return BeliefState::point_mass(model.num_states(), s);
  }
  const auto probs = doc.get<std::vector<double>>();
  if (probs.size() != model.num_states()) throw std::invalid_argument("belief: expected 2^num_vars entries");
  return BeliefState(probs);
}

ClassPartition oracle_partition(const std::string& ref, const FactoredPomdp& model) {
  if (ref == "model") return ClassPartition::from_model(model);
  if (ref == "single") return ClassPartition::single(model.num_vars());
  if (ref == "singletons") return ClassPartition::singletons(model.num_vars());
  return ClassPartition(index_lists_from_json(parse_json_text(ref), "partition"), model.num_vars());
}

int cmd_oracle(const Options& opt) {
  const FactoredPomdp model = load_model(opt.model);
  const BeliefState belief = parse_belief(opt.belief, model);
  const LookaheadMode mode = opt.mode == "simplified" ? LookaheadMode::simplified : LookaheadMode::true_beliefs;
  const LookaheadResult result =
      exact_lookahead(model, belief, opt.depth, mode, oracle_partition(opt.partition, model));
  if (opt.pretty) {
    std::cout << "value  " << std::setprecision(8) << result.value << "\n"
              << "action " << model.definition().actions[result.action] << " (" << result.action << ")\n"
              << "nodes  " << result.nodes << "\n";
    for (std::size_t a = 0; a < result.q.size(); ++a) {
      std::cout << "  Q[" << model.definition().actions[a] << "] = " << result.q[a] << "\n";
    }
    return kOk;
  }
  std::string q;
  for (std::size_t a = 0; a < result.q.size(); ++a) q += (a ? ";" : "") + format_double(result.q[a]);
  write_csv_row(std::cout, {"value", "action", "nodes", "depth", "mode", "q"});
  write_csv_row(std::cout, {format_double(result.value), std::to_string(result.action), std::to_string(result.nodes),
                            std::to_string(opt.depth), opt.mode, q});
  return kOk;
}

void print_report_line(const BoundReport& r) {
  std::size_t failed = 0;
  for (const auto& row : r.rows) failed += row.pass ? 0 : 1;
  std::cout << r.id() << ": " << (r.pass() ? "pass" : "FAIL");
  if (r.vacuous) std::cout << " (vacuous)";
  std::cout << ", " << failed << " of " << r.rows.size() << " rows violated\n";
  if (!r.warning.empty()) std::cerr << "warning: " << r.id() << ": " << r.warning << "\n";
}

int cmd_measure(const Options& opt) {
  const ExperimentConfig config = load_config(opt);
  const FactoredPomdp model = load_experiment_model(config);
  const MeasureResult result = run_measure(config, model);
  write_measure_artifacts(config, result, output_dir(opt, config));
  std::cout << "eta=" << format_double(result.eta) << "\n"
            << "eps_L1=" << format_double(result.eps_l1.max) << (result.eps_l1.exhaustive ? " (exhaustive)" : "")
            << "\n"
            << "eps_KL=" << format_double(result.eps_kl.max) << "\n";
  bool pass = true;
  for (const auto& report : result.drift_reports) {
    print_report_line(report);
    pass = pass && (report.vacuous || report.pass());
  }
  return pass ? kOk : kFailure;
}

int cmd_check(const Options& opt) {
  const ExperimentConfig config = load_config(opt);
  const FactoredPomdp model = load_experiment_model(config);
  const CheckResult result = run_check(config, model);
  write_check_artifacts(config, result, output_dir(opt, config));
  std::cout << "eta=" << format_double(result.trace.eta) << "\n"
            << "eps_L1=" << format_double(result.trace.eps_l1.max) << "\n"
            << "eps_KL=" << format_double(result.trace.eps_kl.max) << "\n";
  for (const auto& report : result.reports) print_report_line(report);
  return result.pass() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factored POMDP planning with simplified beliefs"};
  app.require_subcommand(1);
  Options opt;

  auto* gen = app.add_subcommand("gen", "Generate a random model from a generator spec");
  gen->add_option("--config", opt.config, "Generator spec (or a config with a `generator` block)");
  gen->add_option("--seed", opt.seed, "Override the spec seed");
  gen->add_option("--out", opt.out, "Output model file (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Check every model invariant");
  validate->add_option("--model", opt.model, "Model file")->required();

  auto* plan = app.add_subcommand("plan", "Run the planner online and log each decision");
  auto* oracle = app.add_subcommand("oracle", "Exact expectimax value of a belief");
  auto* measure = app.add_subcommand("measure", "Measure epsilon, eta and belief drift");
  auto* check = app.add_subcommand("check", "Check the value-gap bounds");
  for (auto* sub : {plan, measure, check}) {
    sub->add_option("--config", opt.config, "Experiment config")->required();
    sub->add_option("--seed", opt.seed, "Override the master seed");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--workers", opt.workers, "Worker threads (0: hardware)");
  }
  plan->add_flag("--pretty", opt.pretty, "Human-readable table");

  oracle->add_option("--model", opt.model, "Model file")->required();
  oracle->add_option("--depth", opt.depth, "Lookahead depth")->required();
  oracle->add_option("--mode", opt.mode, "true or simplified")->check(CLI::IsMember({"true", "simplified"}));
  oracle->add_option("--belief", opt.belief, "State index, JSON array or file (default: initial state)");
  oracle->add_option("--partition", opt.partition, "model, single, singletons or a JSON class list");
  oracle->add_flag("--pretty", opt.pretty, "Human-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(opt);
    if (*validate) return cmd_validate(opt);
    if (*plan) return cmd_plan(opt);
    if (*oracle) return cmd_oracle(opt);
    if (*measure) return cmd_measure(opt);
    if (*check) return cmd_check(opt);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kFailure;
  } catch (const ModelError& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

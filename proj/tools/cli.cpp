#include "cli.hpp"

#include <fstream>
#include <map>

#include <CLI11.hpp>

#include "grafcet/analyzer.hpp"
#include "grafcet/dsl.hpp"
#include "grafcet/explorer.hpp"
#include "grafcet/scenario.hpp"
#include "grafcet/trace.hpp"

namespace grafcet::cli {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

const std::map<std::string, ForcingEvaluation> policy_names{
    {"preemptive", ForcingEvaluation::preemptive},
    {"two-phase", ForcingEvaluation::two_phase},
};

void print_diagnostics(std::ostream& os, const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) os << d << '\n';
}

/// Prints diagnostics to `err` and returns the compiled model, or nullptr.
std::shared_ptr<const CompiledModel> load(const std::string& file, std::ostream& err) {
  AnalysisResult analysis = load_model(file);
  print_diagnostics(err, analysis.diagnostics);
  if (!analysis.ok()) return nullptr;
  return compile(*analysis.model);
}

std::optional<Scenario> load_scenario(const std::string& file, std::ostream& err) {
  ScenarioParseResult parsed = parse_scenario_file(file);
  print_diagnostics(err, parsed.diagnostics);
  return parsed.scenario;
}

int cmd_validate(const std::string& file, std::ostream& out) {
  AnalysisResult analysis = load_model(file);
  print_diagnostics(out, analysis.diagnostics);
  int errors = 0;
  int warnings = 0;
  for (const auto& d : analysis.diagnostics) (d.severity == Severity::error ? errors : warnings)++;
  out << file << ": " << errors << " error(s), " << warnings << " warning(s)\n";
  return errors == 0 ? exit_ok : exit_failed;
}

int cmd_expand(const std::string& file, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_model_file(file);
  print_diagnostics(err, parsed.diagnostics);
  if (!parsed.ok()) return exit_failed;
  try {
    std::vector<Diagnostic> warnings;
    GrafcetModel expanded = expand_macros(*parsed.model, &warnings);
    print_diagnostics(err, warnings);
    out << print_model(expanded);
  } catch (const AnalysisError& e) {
    err << format_diagnostic({Severity::error, std::string(to_string(e.kind())) + ": " + e.what(), e.span()})
        << '\n';
    return exit_failed;
  }
  return exit_ok;
}

int cmd_run(const std::string& file, const std::string& scenario_file, const Policy& policy,
            const std::string& trace_file, std::ostream& out, std::ostream& err) {
  auto model = load(file, err);
  if (!model) return exit_failed;
  auto scenario = load_scenario(scenario_file, err);
  if (!scenario) return exit_failed;
  ScenarioResult result = run_scenario(model, *scenario, policy);
  if (!trace_file.empty()) {
    std::ofstream trace(trace_file, std::ios::binary);
    if (!trace) {
      err << "cannot write trace file '" << trace_file << "'\n";
      return exit_failed;
    }
    trace << to_jsonl(result.runs);
  }
  for (const auto& f : result.failures) {
    out << scenario_file << ": step " << f.step << ": expected " << f.expected << ", got " << f.actual
        << '\n';
  }
  out << (result.passed ? "PASS" : "FAIL") << ' ' << scenario_file << " (" << result.runs.size()
      << " run(s), policy " << to_string(policy.forcing) << ")\n";
  return result.passed ? exit_ok : exit_failed;
}

int cmd_compare(const std::string& file, const std::string& scenario_file, int max_evolutions,
                std::ostream& out, std::ostream& err) {
  auto model = load(file, err);
  if (!model) return exit_failed;
  auto scenario = load_scenario(scenario_file, err);
  if (!scenario) return exit_failed;
  PolicyComparison cmp = compare_policies(model, *scenario, max_evolutions);
  out << format_comparison(cmp);
  return cmp.equivalent ? exit_ok : exit_failed;
}

int cmd_explore(const std::string& file, const ExploreOptions& options, const std::string& dot_file,
                std::ostream& out, std::ostream& err) {
  auto model = load(file, err);
  if (!model) return exit_failed;
  StableStateGraph graph = explore(model, options);
  auto anomalies = find_anomalies(*model, graph);
  if (!dot_file.empty()) {
    std::ofstream dot(dot_file, std::ios::binary);
    if (!dot) {
      err << "cannot write DOT file '" << dot_file << "'\n";
      return exit_failed;
    }
    dot << to_dot(*model, graph);
  }
  out << summary_json(graph, anomalies);
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GRAFCET interpretation engine", "grafcet"};
  app.require_subcommand(1);

  std::string file;
  std::string scenario_file;
  std::string trace_file;
  std::string dot_file;
  std::string policy_name = "preemptive";
  Policy policy;
  ExploreOptions explore_options;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("FILE", file, "model (.gft)")->required()->check(CLI::ExistingFile);
  };
  auto add_policy = [&](CLI::App* sub) {
    sub->add_option("--policy", policy_name, "forcing evaluation")
        ->check(CLI::IsMember({"preemptive", "two-phase"}));
    sub->add_option("--max-evolutions", policy.max_evolutions, "evolution budget per run")
        ->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "parse, expand and check a model");
  add_model(validate);
  auto* expand = app.add_subcommand("expand", "print the macro-expanded model");
  add_model(expand);
  auto* run = app.add_subcommand("run", "run a scenario");
  add_model(run);
  run->add_option("--scenario", scenario_file, "scenario (.gsc)")->required()->check(CLI::ExistingFile);
  add_policy(run);
  run->add_option("--trace", trace_file, "write the JSONL trace here");
  auto* compare = app.add_subcommand("compare", "run a scenario under both forcing policies");
  add_model(compare);
  compare->add_option("--scenario", scenario_file, "scenario (.gsc)")->required()->check(CLI::ExistingFile);
  compare->add_option("--max-evolutions", policy.max_evolutions, "evolution budget per run")
      ->check(CLI::PositiveNumber);
  auto* explore_cmd = app.add_subcommand("explore", "explore stable situations over input events");
  add_model(explore_cmd);
  explore_cmd->add_option("--depth", explore_options.depth, "input events from the initial node")
      ->check(CLI::NonNegativeNumber);
  explore_cmd->add_option("--multi", explore_options.multi, "inputs changed per event (0 = 1)")
      ->check(CLI::NonNegativeNumber);
  explore_cmd->add_option("--dot", dot_file, "write a DOT graph here");
  explore_cmd->add_option("--threads", explore_options.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  add_policy(explore_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'grafcet --help' for usage\n";
    return exit_usage;
  }
  policy.forcing = policy_names.at(policy_name);

  if (*validate) return cmd_validate(file, out);
  if (*expand) return cmd_expand(file, out, err);
  if (*run) return cmd_run(file, scenario_file, policy, trace_file, out, err);
  if (*compare) return cmd_compare(file, scenario_file, policy.max_evolutions, out, err);
  explore_options.policy = policy;
  return cmd_explore(file, explore_options, dot_file, out, err);
}

}  // namespace grafcet::cli

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grafcet/compiled_model.hpp"
#include "grafcet/diagnostic.hpp"
#include "grafcet/engine.hpp"

namespace grafcet {

struct ScenarioStep {
  enum class Kind { init, set, expect_situation, expect_var, expect_outputs, expect_error };

  Kind kind = Kind::init;
  std::vector<std::pair<std::string, Value>> assignments;  // set, expect var, expect outputs
  std::vector<PartialSituation> situation;                 // expect situation
  RunErrorKind error = RunErrorKind::unstable_cycle;       // expect error
  SourceSpan span;
};

struct Scenario {
  std::vector<ScenarioStep> steps;
};

struct ScenarioParseResult {
  std::optional<Scenario> scenario;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return scenario.has_value(); }
};

/// Parses `.gsc` text: `init;`, `set a=true, b=false;`,
/// `expect situation G1{2} G2{};`, `expect var y=3;`,
/// `expect outputs O1=true;`, `expect error unstable_cycle;`.
ScenarioParseResult parse_scenario(std::string_view source, const std::string& file = "<scenario>");
ScenarioParseResult parse_scenario_file(const std::filesystem::path& path);

struct ScenarioFailure {
  int step = 0;  // 1-based index into Scenario::steps
  std::string expected;
  std::string actual;
};

struct ScenarioResult {
  bool passed = false;
  std::vector<ScenarioFailure> failures;
  std::vector<RunResult> runs;  // one per init / set step executed
};

/// Expectations are checked against the latest run and collected; an
/// unexpected run error or API misuse stops execution.
ScenarioResult run_scenario(std::shared_ptr<const CompiledModel> model, const Scenario& scenario,
                            Policy policy = {});

struct PolicyComparison {
  bool equivalent = true;
  int run = 0;        // 1-based, valid when !equivalent
  int evolution = 0;  // 1-based record index inside the run
  std::string preemptive;
  std::string two_phase;
};

/// Runs the scenario under both forcing policies (in parallel) and locates
/// the first record or outcome that differs.
PolicyComparison compare_policies(std::shared_ptr<const CompiledModel> model,
                                  const Scenario& scenario, int max_evolutions = 100000);

std::string format_comparison(const PolicyComparison& comparison);

}  // namespace grafcet

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "grafcet/compiled_model.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

enum class ForcingEvaluation { preemptive, two_phase };

struct Policy {
  ForcingEvaluation forcing = ForcingEvaluation::preemptive;
  int max_evolutions = 100000;
};

const char* to_string(ForcingEvaluation forcing);

enum class RunErrorKind {
  unstable_cycle,
  evolution_budget_exceeded,
  forcing_conflict,
  hierarchy_conflict,
  write_conflict,
};

/// `unstable_cycle`, `forcing_conflict`, ...
const char* to_string(RunErrorKind kind);
bool parse_run_error_kind(const std::string& text, RunErrorKind& kind);

struct ForcingRecord {
  std::string owner;
  std::string target;
  std::vector<std::string> situation;

  bool operator==(const ForcingRecord&) const = default;
};

struct EvolutionRecord {
  int index = 0;
  std::vector<std::string> cleared;
  std::vector<std::string> activated;
  std::vector<std::string> deactivated;
  std::vector<std::string> rule_five;
  std::vector<Binding> writes;  // declaration order
  std::vector<ForcingRecord> forcings;
  std::vector<std::string> suppressed;
  bool stable = false;

  bool operator==(const EvolutionRecord&) const = default;
};

struct PartialSituation {
  std::string partial;
  std::vector<std::string> steps;

  bool operator==(const PartialSituation&) const = default;
};

struct StableReport {
  std::vector<PartialSituation> situation;  // declaration order
  std::vector<Binding> outputs;             // declaration order
  std::vector<EvolutionRecord> evolutions;
};

struct RunError {
  RunErrorKind kind = RunErrorKind::unstable_cycle;
  std::string detail;
  std::vector<EvolutionRecord> partial_trace;
};

using RunResult = std::variant<StableReport, RunError>;

inline bool is_error(const RunResult& r) { return std::holds_alternative<RunError>(r); }
const std::vector<EvolutionRecord>& evolutions_of(const RunResult& r);

/// `G1{2} G2{21,22}`
std::string format_situation(const std::vector<PartialSituation>& situation);

/// Thrown by Interpreter::evolve_once when an evolution cannot complete.
class EvolutionFailure : public std::runtime_error {
 public:
  EvolutionFailure(RunErrorKind kind, const std::string& detail, EvolutionRecord partial)
      : std::runtime_error(detail), kind_(kind), partial_(std::move(partial)) {}

  RunErrorKind kind() const { return kind_; }
  const EvolutionRecord& partial_record() const { return partial_; }

 private:
  RunErrorKind kind_;
  EvolutionRecord partial_;
};

/// Misuse of the interpreter API (unknown ids, event before a stable state).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Runtime state; indices refer to the CompiledModel.
struct EngineState {
  std::vector<char> active;
  std::vector<Value> values;
  std::vector<std::uint8_t> variable_edges;
  std::vector<std::uint8_t> step_edges;
  std::vector<char> forced;
  std::vector<char> pending;  // initial steps whose activation actions are owed
  bool initialized = false;
  bool stable = false;

  bool operator==(const EngineState&) const = default;
};

class Interpreter {
 public:
  /// `model` must be analyzed (see analyze()).
  explicit Interpreter(const GrafcetModel& model, Policy policy = {});
  Interpreter(std::shared_ptr<const CompiledModel> model, Policy policy = {});

  /// Sets the initial situation and runs to the first stable situation.
  RunResult initialize();

  /// Applies simultaneous input changes and runs to stability. Changes equal
  /// to the current value are ignored; if none remains the report holds one
  /// trivial stable record.
  RunResult apply_input_event(const std::vector<std::pair<std::string, Value>>& changes);

  /// One evolution with the current edge context. Throws EvolutionFailure on
  /// a write, forcing or hierarchy conflict.
  EvolutionRecord evolve_once();

  /// Repeats evolve_once until stable, with cycle and budget detection.
  RunResult run_to_stability();

  std::string situation_of(const std::string& partial) const;
  std::vector<PartialSituation> situation() const;
  bool step_activity(const std::string& step) const;
  Value value_of(const std::string& variable) const;
  std::vector<Binding> outputs() const;

  const EngineState& state() const { return state_; }
  void restore(EngineState state) { state_ = std::move(state); }
  const CompiledModel& model() const { return *model_; }
  std::shared_ptr<const CompiledModel> shared_model() const { return model_; }
  const Policy& policy() const { return policy_; }

 private:
  void recompute_continuous_outputs();
  bool any_clearable() const;
  int evolution_counter_ = 0;

  std::shared_ptr<const CompiledModel> model_;
  Policy policy_;
  EngineState state_;
};

}  // namespace grafcet

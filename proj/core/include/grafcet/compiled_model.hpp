#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "grafcet/model.hpp"

namespace grafcet {

/// Edge flags kept per variable and per step.
enum EdgeBits : std::uint8_t { edge_none = 0, edge_rising = 1, edge_falling = 2 };

/// Postfix program over value and step-activity slots.
class Program {
 public:
  enum class Code : std::uint8_t {
    push_literal,
    push_variable,
    push_step,
    rising_variable,
    falling_variable,
    rising_step,
    falling_step,
    logical_not,
    logical_and,
    logical_or,
    equal,
    not_equal,
    less,
    less_equal,
    greater,
    greater_equal,
    add,
    subtract,
  };

  struct Instruction {
    Code code;
    int slot = 0;
    Value literal = 0;
  };

  Program() = default;
  std::vector<Instruction>& code() { return code_; }
  const std::vector<Instruction>& code() const { return code_; }
  bool empty() const { return code_.empty(); }

  Value evaluate(const std::vector<Value>& values, const std::vector<char>& active,
                 const std::vector<std::uint8_t>& variable_edges,
                 const std::vector<std::uint8_t>& step_edges) const;

 private:
  std::vector<Instruction> code_;
};

struct CompiledAction {
  ActionKind kind = ActionKind::continuous;
  int target = -1;
  bool has_condition = false;
  Program condition;
  Program value;
};

struct CompiledForcing {
  int owner = -1;
  int target = -1;
  SituationSpec::Variant variant = SituationSpec::Variant::empty;
  std::vector<int> steps;  // explicit set, sorted by index
};

struct CompiledStep {
  std::string id;
  int partial = -1;
  bool initial = false;
  bool enclosing = false;
  bool activation_link = false;
  std::vector<int> encloses;
  std::vector<CompiledAction> on_activation;
  std::vector<CompiledAction> on_deactivation;
  std::vector<CompiledAction> on_event;
  std::vector<CompiledAction> continuous;
  std::vector<CompiledForcing> forcings;
};

struct CompiledTransition {
  std::string id;
  int partial = -1;
  std::vector<int> pre;
  std::vector<int> post;
  Program condition;
};

struct CompiledPartial {
  std::string id;
  int depth = 0;
  int enclosed_by = -1;  // step index
  std::vector<int> steps;
  std::vector<int> transitions;
  std::vector<int> initial_steps;
  std::vector<int> link_steps;
};

struct CompiledVariable {
  std::string id;
  VariableRole role = VariableRole::internal;
  ValueType type = ValueType::boolean;
  Value initial = 0;
};

/// Index-based form of an analyzed model. Immutable and shareable.
struct CompiledModel {
  std::string name;
  std::vector<CompiledVariable> variables;
  std::vector<CompiledStep> steps;
  std::vector<CompiledTransition> transitions;
  std::vector<CompiledPartial> partials;
  /// Partial Grafcet indices by (depth, declaration order).
  std::vector<int> evaluation_order;
  std::vector<int> continuous_outputs;
  std::vector<int> boolean_inputs;
  std::map<std::string, int> variable_index;
  std::map<std::string, int> step_index;
  std::map<std::string, int> partial_index;

  int find_variable(const std::string& id) const;
  int find_step(const std::string& id) const;
  int find_partial(const std::string& id) const;
};

/// Requires an analyzed model (no macro steps, depth_of filled).
std::shared_ptr<const CompiledModel> compile(const GrafcetModel& model);

}  // namespace grafcet

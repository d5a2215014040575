#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grafcet/diagnostic.hpp"
#include "grafcet/expression.hpp"

namespace grafcet {

enum class VariableRole { input, output, internal };
enum class ValueType { boolean, integer };

struct VariableDecl {
  std::string id;
  VariableRole role = VariableRole::internal;
  ValueType type = ValueType::boolean;
  Value initial = 0;
  Origin origin;

  bool operator==(const VariableDecl&) const = default;
};

/// A named, typed value as it appears in traces and reports.
struct Binding {
  std::string name;
  ValueType type = ValueType::boolean;
  Value value = 0;

  bool operator==(const Binding&) const = default;
};

enum class ActionKind {
  continuous,
  stored_on_activation,
  stored_on_deactivation,
  stored_on_event,
};

struct Action {
  ActionKind kind = ActionKind::continuous;
  /// Guard of a continuous action, or the event of a stored-on-event action.
  std::optional<Expression> condition;
  std::string target;
  /// Right-hand side of stored actions; empty for continuous actions.
  std::optional<Expression> value;
  Origin origin;

  bool operator==(const Action&) const = default;
};

struct SituationSpec {
  enum class Variant { explicit_set, current, empty, init };
  Variant variant = Variant::empty;
  std::vector<std::string> steps;  // explicit_set only

  bool operator==(const SituationSpec&) const = default;
};

struct ForcingOrder {
  std::string owner;
  std::string target;
  SituationSpec spec;
  Origin origin;

  bool operator==(const ForcingOrder&) const = default;
};

enum class StepKind { normal, enclosing, macro, entry, exit };

struct Step {
  std::string id;
  StepKind kind = StepKind::normal;
  bool initial = false;
  std::vector<Action> actions;
  std::vector<ForcingOrder> forcings;
  bool activation_link = false;
  std::vector<std::string> encloses;
  Origin origin;

  bool operator==(const Step&) const = default;
};

struct Transition {
  std::string id;
  std::vector<std::string> pre;
  std::vector<std::string> post;
  Expression condition;
  Origin origin;

  bool operator==(const Transition&) const = default;
};

struct PartialGrafcet {
  std::string id;
  std::vector<Step> steps;
  std::vector<Transition> transitions;
  std::optional<std::string> enclosed_by;
  Origin origin;

  bool operator==(const PartialGrafcet&) const = default;
};

/// Expansion chart of the macro step named `macro`.
struct Expansion {
  std::string macro;
  std::vector<Step> steps;
  std::vector<Transition> transitions;
  Origin origin;

  bool operator==(const Expansion&) const = default;
};

struct GrafcetModel {
  std::string name;
  std::vector<VariableDecl> variables;
  std::vector<PartialGrafcet> partials;
  std::vector<Expansion> expansions;
  /// Hierarchical depth per partial Grafcet; filled by analysis.
  std::map<std::string, int> depth_of;

  bool operator==(const GrafcetModel&) const = default;

  const PartialGrafcet* find_partial(const std::string& id) const;
  const VariableDecl* find_variable(const std::string& id) const;
  const Step* find_step(const std::string& id) const;
  /// Partial Grafcet owning `step_id`, or nullptr.
  const PartialGrafcet* partial_of_step(const std::string& step_id) const;
  const Expansion* find_expansion(const std::string& macro) const;
};

const char* to_string(VariableRole role);
const char* to_string(ValueType type);
const char* to_string(StepKind kind);

/// `{21,22}`, `{*}`, `{}` or `{INIT}`.
std::string to_source(const SituationSpec& spec);

/// Orders step ids by their trailing number, then lexically ("2" < "12" < "E13").
bool step_id_less(const std::string& a, const std::string& b);
void sort_step_ids(std::vector<std::string>& ids);

/// `G1{2,3}` with the steps sorted by `step_id_less`.
std::string situation_notation(const std::string& partial, std::vector<std::string> steps);

std::string format_value(ValueType type, Value value);

}  // namespace grafcet

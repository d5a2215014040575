#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grafcet/compiled_model.hpp"
#include "grafcet/engine.hpp"

namespace grafcet {

using InputChanges = std::vector<std::pair<std::string, Value>>;

struct ExploreOptions {
  Policy policy;
  int depth = 3;    // input events from the initial stable node
  int multi = 0;    // maximum inputs changed per event; 0 means 1
  int threads = 1;  // results do not depend on this
};

struct StableNode {
  std::vector<PartialSituation> situation;
  std::vector<Binding> values;  // internal and output variables
  std::vector<Binding> inputs;
  EngineState state;
  int level = 0;  // first BFS level at which the node was reached
};

struct GraphEdge {
  int source = -1;  // -1: initialization edge
  InputChanges changes;
  int target = -1;  // -1 when the run failed
  std::optional<RunErrorKind> error;
  std::string detail;
};

struct StableStateGraph {
  std::vector<StableNode> nodes;
  std::vector<GraphEdge> edges;
  int root = -1;  // -1 when initialization failed
  std::vector<std::string> reached_steps;        // active in a node or during a run
  std::vector<std::string> cleared_transitions;  // cleared at least once
};

/// Breadth-first exploration of stable situations over boolean input events.
StableStateGraph explore(std::shared_ptr<const CompiledModel> model, const ExploreOptions& options);

struct Anomaly {
  enum class Kind { unreachable_step, dead_transition, error_edge };

  Kind kind = Kind::unreachable_step;
  std::string subject;  // step id, transition id or error kind
  int count = 1;
  std::string example;

  bool operator==(const Anomaly&) const = default;
};

const char* to_string(Anomaly::Kind kind);

/// Unreachable steps, dead transitions, then error edges grouped by kind.
std::vector<Anomaly> find_anomalies(const CompiledModel& model, const StableStateGraph& graph);

std::string to_dot(const CompiledModel& model, const StableStateGraph& graph);

/// `{"nodes":N,"edges":M,"errors":K,"anomalies":[...]}`
std::string summary_json(const StableStateGraph& graph, const std::vector<Anomaly>& anomalies);

/// `a=true, b=false`
std::string format_changes(const CompiledModel& model, const InputChanges& changes);

}  // namespace grafcet

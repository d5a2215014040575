#include "grafcet/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace grafcet {

const char* to_string(Anomaly::Kind kind) {
  switch (kind) {
    case Anomaly::Kind::unreachable_step: return "unreachable_step";
    case Anomaly::Kind::dead_transition: return "dead_transition";
    case Anomaly::Kind::error_edge: return "error_edge";
  }
  return "?";
}

std::string format_changes(const CompiledModel& model, const InputChanges& changes) {
  std::string out;
  for (const auto& [id, value] : changes) {
    if (!out.empty()) out += ", ";
    const int v = model.find_variable(id);
    out += id + "=" + format_value(v >= 0 ? model.variables[v].type : ValueType::integer, value);
  }
  return out;
}

namespace {

struct Outcome {
  RunResult result;
  EngineState state;
};

/// Subsets of `n` inputs with 1..k members, by size then lexicographically.
std::vector<std::vector<int>> change_sets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  for (int size = 1; size <= std::min(n, k); ++size) {
    std::function<void(int)> rec = [&](int start) {
      if (static_cast<int>(current.size()) == size) {
        out.push_back(current);
        return;
      }
      for (int i = start; i < n; ++i) {
        current.push_back(i);
        rec(i + 1);
        current.pop_back();
      }
    };
    rec(0);
  }
  return out;
}

std::string node_key(const EngineState& st) {
  std::string key(st.active.begin(), st.active.end());
  for (Value v : st.values) key.append(reinterpret_cast<const char*>(&v), sizeof v);
  return key;
}

StableNode make_node(const CompiledModel& m, const Interpreter& engine, int level) {
  StableNode node;
  node.situation = engine.situation();
  node.state = engine.state();
  for (std::size_t v = 0; v < m.variables.size(); ++v) {
    const auto& var = m.variables[v];
    Binding b{var.id, var.type, node.state.values[v]};
    (var.role == VariableRole::input ? node.inputs : node.values).push_back(b);
  }
  node.level = level;
  return node;
}

class Collector {
 public:
  explicit Collector(const CompiledModel& m)
      : m_(m), reached_(m.steps.size(), 0), cleared_(m.transitions.size(), 0) {
    for (std::size_t s = 0; s < m.steps.size(); ++s) {
      if (m.steps[s].initial) reached_[s] = 1;
    }
  }

  void absorb(const RunResult& r) {
    for (const auto& rec : evolutions_of(r)) {
      for (const auto& id : rec.activated) reached_[m_.find_step(id)] = 1;
      for (const auto& id : rec.cleared) cleared_[transition_index(id)] = 1;
    }
  }

  void absorb(const EngineState& st) {
    for (std::size_t s = 0; s < st.active.size(); ++s) {
      if (st.active[s]) reached_[s] = 1;
    }
  }

  void finish(StableStateGraph& g) const {
    for (std::size_t s = 0; s < reached_.size(); ++s) {
      if (reached_[s]) g.reached_steps.push_back(m_.steps[s].id);
    }
    for (std::size_t t = 0; t < cleared_.size(); ++t) {
      if (cleared_[t]) g.cleared_transitions.push_back(m_.transitions[t].id);
    }
  }

 private:
  int transition_index(const std::string& id) {
    if (index_.empty()) {
      for (std::size_t t = 0; t < m_.transitions.size(); ++t) index_[m_.transitions[t].id] = static_cast<int>(t);
    }
    return index_.at(id);
  }

  const CompiledModel& m_;
  std::vector<char> reached_;
  std::vector<char> cleared_;
  std::map<std::string, int> index_;
};

}  // namespace

StableStateGraph explore(std::shared_ptr<const CompiledModel> model, const ExploreOptions& options) {
  const CompiledModel& m = *model;
  StableStateGraph graph;
  Collector collector(m);
  std::map<std::string, int> index_of;

  Interpreter root_engine(model, options.policy);
  RunResult init = root_engine.initialize();
  collector.absorb(init);
  GraphEdge init_edge;
  if (const auto* err = std::get_if<RunError>(&init)) {
    init_edge.error = err->kind;
    init_edge.detail = err->detail;
    graph.edges.push_back(std::move(init_edge));
    collector.finish(graph);
    return graph;
  }
  graph.nodes.push_back(make_node(m, root_engine, 0));
  collector.absorb(graph.nodes.back().state);
  index_of[node_key(graph.nodes.back().state)] = 0;
  graph.root = 0;
  init_edge.target = 0;
  graph.edges.push_back(std::move(init_edge));

  const auto sets = change_sets(static_cast<int>(m.boolean_inputs.size()), std::max(1, options.multi));
  std::vector<int> frontier{0};
  const int threads = std::max(1, options.threads);

  for (int level = 1; level <= options.depth && !frontier.empty() && !sets.empty(); ++level) {
    struct Task {
      int source;
      InputChanges changes;
    };
    std::vector<Task> tasks;
    for (int n : frontier) {
      for (const auto& set : sets) {
        Task task{n, {}};
        for (int i : set) {
          const int v = m.boolean_inputs[i];
          task.changes.emplace_back(m.variables[v].id, graph.nodes[n].state.values[v] ? 0 : 1);
        }
        tasks.push_back(std::move(task));
      }
    }

    std::vector<std::optional<Outcome>> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      Interpreter engine(model, options.policy);
      for (std::size_t t = next++; t < tasks.size(); t = next++) {
        engine.restore(graph.nodes[tasks[t].source].state);
        RunResult r = engine.apply_input_event(tasks[t].changes);
        outcomes[t] = Outcome{std::move(r), engine.state()};
      }
    };
    if (threads == 1 || tasks.size() < 2) {
      worker();
    } else {
      std::vector<std::thread> pool;
      const int count = std::min<int>(threads, static_cast<int>(tasks.size()));
      for (int i = 0; i < count; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    std::vector<int> next_frontier;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      Outcome& out = *outcomes[t];
      collector.absorb(out.result);
      GraphEdge edge;
      edge.source = tasks[t].source;
      edge.changes = std::move(tasks[t].changes);
      if (const auto* err = std::get_if<RunError>(&out.result)) {
        edge.error = err->kind;
        edge.detail = err->detail;
      } else {
        const std::string key = node_key(out.state);
        auto [it, fresh] = index_of.emplace(key, static_cast<int>(graph.nodes.size()));
        if (fresh) {
          Interpreter view(model, options.policy);
          view.restore(out.state);
          graph.nodes.push_back(make_node(m, view, level));
          collector.absorb(out.state);
          next_frontier.push_back(it->second);
        }
        edge.target = it->second;
      }
      graph.edges.push_back(std::move(edge));
    }
    frontier = std::move(next_frontier);
  }
  collector.finish(graph);
  return graph;
}

std::vector<Anomaly> find_anomalies(const CompiledModel& model, const StableStateGraph& graph) {
  std::vector<Anomaly> out;
  const std::set<std::string> reached(graph.reached_steps.begin(), graph.reached_steps.end());
  const std::set<std::string> cleared(graph.cleared_transitions.begin(), graph.cleared_transitions.end());
  for (const auto& s : model.steps) {
    if (!reached.count(s.id)) out.push_back({Anomaly::Kind::unreachable_step, s.id, 1, ""});
  }
  for (const auto& t : model.transitions) {
    if (!cleared.count(t.id)) out.push_back({Anomaly::Kind::dead_transition, t.id, 1, ""});
  }
  std::map<std::string, Anomaly> errors;
  for (const auto& e : graph.edges) {
    if (!e.error) continue;
    const std::string kind = to_string(*e.error);
    auto [it, fresh] = errors.emplace(kind, Anomaly{Anomaly::Kind::error_edge, kind, 0, ""});
    if (fresh) {
      it->second.example = (e.source < 0 ? std::string("initialization")
                                         : "node " + std::to_string(e.source) + " on " +
                                               format_changes(model, e.changes)) +
                           ": " + e.detail;
    }
    ++it->second.count;
  }
  for (auto& [kind, anomaly] : errors) out.push_back(std::move(anomaly));
  return out;
}

namespace {

std::string dot_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string digest(const std::vector<Binding>& bindings) {
  std::string out;
  for (const auto& b : bindings) {
    if (!out.empty()) out += ' ';
    out += b.name + "=" + format_value(b.type, b.value);
  }
  return out;
}

}  // namespace

std::string to_dot(const CompiledModel& model, const StableStateGraph& graph) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(model.name) << "\" {\n";
  os << "  init [shape=point];\n";
  for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
    const auto& node = graph.nodes[n];
    std::string label = dot_escape(format_situation(node.situation));
    const std::string inputs = digest(node.inputs);
    const std::string values = digest(node.values);
    if (!inputs.empty()) label += "\\n" + dot_escape(inputs);
    if (!values.empty()) label += "\\n" + dot_escape(values);
    os << "  n" << n << " [label=\"" << label << "\"];\n";
  }
  int errors = 0;
  for (const auto& e : graph.edges) {
    const std::string from = e.source < 0 ? "init" : "n" + std::to_string(e.source);
    const std::string label = dot_escape(format_changes(model, e.changes));
    if (e.error) {
      const std::string sink = "err" + std::to_string(errors++);
      os << "  " << sink << " [label=\"" << to_string(*e.error) << "\", shape=box, style=dashed];\n";
      os << "  " << from << " -> " << sink << " [label=\"" << label << "\", style=dashed];\n";
    } else {
      os << "  " << from << " -> n" << e.target << " [label=\"" << label << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string summary_json(const StableStateGraph& graph, const std::vector<Anomaly>& anomalies) {
  nlohmann::ordered_json j;
  j["nodes"] = graph.nodes.size();
  j["edges"] = graph.edges.size();
  j["errors"] = std::count_if(graph.edges.begin(), graph.edges.end(),
                              [](const GraphEdge& e) { return e.error.has_value(); });
  j["anomalies"] = nlohmann::ordered_json::array();
  for (const auto& a : anomalies) {
    nlohmann::ordered_json aj;
    aj["kind"] = to_string(a.kind);
    aj["subject"] = a.subject;
    if (a.kind == Anomaly::Kind::error_edge) {
      aj["count"] = a.count;
      aj["example"] = a.example;
    }
    j["anomalies"].push_back(std::move(aj));
  }
  return j.dump(2) + "\n";
}

}  // namespace grafcet

#include "grafcet/engine.hpp"

#include <algorithm>
#include <unordered_map>

namespace grafcet {

const char* to_string(ForcingEvaluation forcing) {
  return forcing == ForcingEvaluation::preemptive ? "preemptive" : "two-phase";
}

const char* to_string(RunErrorKind kind) {
  switch (kind) {
    case RunErrorKind::unstable_cycle: return "unstable_cycle";
    case RunErrorKind::evolution_budget_exceeded: return "evolution_budget_exceeded";
    case RunErrorKind::forcing_conflict: return "forcing_conflict";
    case RunErrorKind::hierarchy_conflict: return "hierarchy_conflict";
    case RunErrorKind::write_conflict: return "write_conflict";
  }
  return "?";
}

bool parse_run_error_kind(const std::string& text, RunErrorKind& kind) {
  for (auto k : {RunErrorKind::unstable_cycle, RunErrorKind::evolution_budget_exceeded,
                 RunErrorKind::forcing_conflict, RunErrorKind::hierarchy_conflict,
                 RunErrorKind::write_conflict}) {
    if (text == to_string(k)) {
      kind = k;
      return true;
    }
  }
  return false;
}

const std::vector<EvolutionRecord>& evolutions_of(const RunResult& r) {
  if (const auto* report = std::get_if<StableReport>(&r)) return report->evolutions;
  return std::get<RunError>(r).partial_trace;
}

std::string format_situation(const std::vector<PartialSituation>& situation) {
  std::string out;
  for (const auto& ps : situation) {
    if (!out.empty()) out += ' ';
    out += situation_notation(ps.partial, ps.steps);
  }
  return out;
}

namespace {

std::vector<std::string> sorted_ids(const CompiledModel& m, const std::vector<int>& steps) {
  std::vector<std::string> ids;
  ids.reserve(steps.size());
  for (int s : steps) ids.push_back(m.steps[s].id);
  sort_step_ids(ids);
  return ids;
}

std::string brace_ids(const std::vector<std::string>& ids) {
  std::string out = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
  return out + "}";
}

/// Scratch data of a single evolution.
class Evolution {
 public:
  Evolution(const CompiledModel& m, EngineState& st, const Policy& policy, int index)
      : m_(m),
        st_(st),
        policy_(policy),
        snap_active_(st.active),
        snap_values_(st.values),
        var_edges_(st.variable_edges),
        step_edges_(st.step_edges),
        pending_at_start_(st.pending),
        hier_deact_(m.steps.size(), 0),
        suppressed_(m.steps.size(), 0),
        rule_five_(m.steps.size(), 0),
        to_act_(m.steps.size(), 0),
        to_deact_(m.steps.size(), 0),
        forced_now_(m.partials.size(), 0),
        forced_situation_(m.partials.size()),
        forced_by_(m.partials.size(), -1),
        enclosure_changed_(m.partials.size(), 0),
        written_(m.variables.size(), 0),
        written_value_(m.variables.size(), 0),
        writer_(m.variables.size(), -1) {
    record_.index = index;
  }

  EvolutionRecord run() {
    const bool preemptive = policy_.forcing == ForcingEvaluation::preemptive;
    for (int pg : m_.evaluation_order) {
      structural(pg, preemptive ? forced_now_ : st_.forced);
      if (preemptive) emit(pg);
    }
    if (!preemptive) {
      for (int pg : m_.evaluation_order) emit(pg);
    }
    finish();
    return record_;
  }

  [[noreturn]] void fail(RunErrorKind kind, const std::string& detail) {
    summarize();
    throw EvolutionFailure(kind, detail, record_);
  }

 private:
  Value eval(const Program& p) const {
    return p.evaluate(snap_values_, snap_active_, var_edges_, step_edges_);
  }

  void write(const CompiledAction& a, int step) {
    Value v = eval(a.value);
    if (m_.variables[a.target].type == ValueType::boolean) v = v ? 1 : 0;
    if (written_[a.target] && written_value_[a.target] != v) {
      const auto& var = m_.variables[a.target];
      fail(RunErrorKind::write_conflict,
           "variable '" + var.id + "' assigned " + format_value(var.type, written_value_[a.target]) +
               " by step " + m_.steps[writer_[a.target]].id + " and " + format_value(var.type, v) +
               " by step " + m_.steps[step].id);
    }
    written_[a.target] = 1;
    written_value_[a.target] = v;
    writer_[a.target] = step;
    st_.values[a.target] = v;
  }

  void run_activation_actions(int s) {
    for (const auto& a : m_.steps[s].on_activation) write(a, s);
  }

  // Steps c) and d) for one partial Grafcet.
  void structural(int pg, const std::vector<char>& forced) {
    const CompiledPartial& p = m_.partials[pg];
    if (!forced[pg]) {
      for (int t : p.transitions) {
        const CompiledTransition& tr = m_.transitions[t];
        bool enabled = true;
        for (int s : tr.pre) {
          if (!snap_active_[s] || hier_deact_[s]) {
            enabled = false;
            break;
          }
        }
        if (!enabled || !eval(tr.condition)) continue;
        record_.cleared.push_back(tr.id);
        for (int s : tr.pre) to_deact_[s] = 1;
        for (int s : tr.post) to_act_[s] = 1;
      }
    }

    std::vector<int> activated;
    std::vector<int> deactivated;
    for (int s : p.steps) {
      if (to_act_[s] && to_deact_[s]) {
        rule_five_[s] = 1;
      } else if (to_act_[s]) {
        if (!snap_active_[s] && !st_.active[s]) activated.push_back(s);
      } else if (to_deact_[s]) {
        deactivated.push_back(s);
      }
    }
    for (int s : deactivated) st_.active[s] = 0;
    for (int s : activated) st_.active[s] = 1;

    for (int s : deactivated) {
      for (const auto& a : m_.steps[s].on_deactivation) write(a, s);
    }
    for (int s : activated) run_activation_actions(s);
    for (int s : p.steps) {
      if (st_.pending[s]) {
        st_.pending[s] = 0;
        run_activation_actions(s);
      }
    }
    for (int s : p.steps) {
      if (!snap_active_[s] || hier_deact_[s]) continue;
      for (const auto& a : m_.steps[s].on_event) {
        if (eval(a.condition)) write(a, s);
      }
    }
  }

  void activate_by_hierarchy(int s) {
    st_.active[s] = 1;
    run_activation_actions(s);
  }

  void deactivate_by_hierarchy(int s) {
    st_.active[s] = 0;
    hier_deact_[s] = 1;
    suppressed_[s] = 1;
  }

  std::vector<int> live_situation(int pg) const {
    std::vector<int> out;
    for (int s : m_.partials[pg].steps) {
      if (st_.active[s]) out.push_back(s);
    }
    return out;
  }

  std::string describe(int pg, const std::vector<int>& steps) const {
    return m_.partials[pg].id + brace_ids(sorted_ids(m_, steps));
  }

  // Step e) for one partial Grafcet: forcing orders of its active steps and
  // enclosing effects of its enclosing steps.
  void emit(int pg) {
    for (int s : m_.partials[pg].steps) {
      const CompiledStep& step = m_.steps[s];
      if (st_.active[s]) {
        for (const auto& f : step.forcings) apply_forcing(f);
      }
      if (!step.enclosing) continue;
      const bool was = snap_active_[s] && !pending_at_start_[s];
      const bool now = st_.active[s] != 0;
      if (was == now) continue;
      for (int e : step.encloses) {
        if (now) {
          enclose_activate(s, e);
        } else {
          enclose_deactivate(s, e);
        }
      }
    }
  }

  void apply_forcing(const CompiledForcing& f) {
    const CompiledPartial& target = m_.partials[f.target];
    std::vector<int> situation;
    switch (f.variant) {
      case SituationSpec::Variant::explicit_set: situation = f.steps; break;
      case SituationSpec::Variant::current: situation = live_situation(f.target); break;
      case SituationSpec::Variant::empty: break;
      case SituationSpec::Variant::init: situation = target.initial_steps; break;
    }
    std::sort(situation.begin(), situation.end());
    const std::string& owner = m_.steps[f.owner].id;

    if (forced_now_[f.target] && forced_situation_[f.target] != situation) {
      fail(RunErrorKind::forcing_conflict,
           "step " + m_.steps[forced_by_[f.target]].id + " forces " +
               describe(f.target, forced_situation_[f.target]) + " while step " + owner +
               " forces " + describe(f.target, situation));
    }
    if (target.enclosed_by >= 0) {
      const bool encloser_active = st_.active[target.enclosed_by] != 0;
      if (!encloser_active && !situation.empty()) {
        fail(RunErrorKind::hierarchy_conflict,
             "step " + owner + " forces " + describe(f.target, situation) +
                 " while its enclosing step " + m_.steps[target.enclosed_by].id + " is inactive");
      }
      if (encloser_active && situation.empty()) {
        fail(RunErrorKind::hierarchy_conflict,
             "step " + owner + " empties " + target.id + " while its enclosing step " +
                 m_.steps[target.enclosed_by].id + " is active");
      }
    }
    if (enclosure_changed_[f.target] && situation != live_situation(f.target)) {
      fail(RunErrorKind::hierarchy_conflict,
           "step " + owner + " forces " + describe(f.target, situation) +
               " after an enclosing step changed " + target.id + " in the same evolution");
    }

    std::vector<char> wanted(m_.steps.size(), 0);
    for (int s : situation) wanted[s] = 1;
    for (int s : target.steps) {
      if (!wanted[s] && st_.active[s]) deactivate_by_hierarchy(s);
    }
    for (int s : target.steps) {
      if (wanted[s] && !st_.active[s]) activate_by_hierarchy(s);
    }
    forced_now_[f.target] = 1;
    forced_situation_[f.target] = situation;
    forced_by_[f.target] = f.owner;
    record_.forcings.push_back({owner, target.id, sorted_ids(m_, situation)});
  }

  void enclose_activate(int encloser, int pg) {
    const CompiledPartial& p = m_.partials[pg];
    std::vector<int> missing;
    for (int s : p.link_steps) {
      if (!st_.active[s]) missing.push_back(s);
    }
    if (missing.empty()) return;
    if (forced_now_[pg]) {
      fail(RunErrorKind::hierarchy_conflict,
           "activation of enclosing step " + m_.steps[encloser].id + " contradicts forced " +
               describe(pg, forced_situation_[pg]));
    }
    for (int s : missing) activate_by_hierarchy(s);
    enclosure_changed_[pg] = 1;
  }

  void enclose_deactivate(int encloser, int pg) {
    std::vector<int> active = live_situation(pg);
    if (active.empty()) return;
    if (forced_now_[pg]) {
      fail(RunErrorKind::hierarchy_conflict,
           "deactivation of enclosing step " + m_.steps[encloser].id + " contradicts forced " +
               describe(pg, forced_situation_[pg]));
    }
    for (int s : active) deactivate_by_hierarchy(s);
    enclosure_changed_[pg] = 1;
  }

  void summarize() {
    std::vector<int> activated;
    std::vector<int> deactivated;
    std::vector<int> rule_five;
    std::vector<int> suppressed;
    for (std::size_t s = 0; s < m_.steps.size(); ++s) {
      const int i = static_cast<int>(s);
      if (st_.active[s] && !snap_active_[s]) activated.push_back(i);
      if (!st_.active[s] && snap_active_[s]) deactivated.push_back(i);
      if (rule_five_[s] && st_.active[s] && snap_active_[s]) rule_five.push_back(i);
      if (suppressed_[s]) suppressed.push_back(i);
    }
    record_.activated = sorted_ids(m_, activated);
    record_.deactivated = sorted_ids(m_, deactivated);
    record_.rule_five = sorted_ids(m_, rule_five);
    record_.suppressed = sorted_ids(m_, suppressed);
    record_.writes.clear();
    for (std::size_t v = 0; v < m_.variables.size(); ++v) {
      if (written_[v]) {
        record_.writes.push_back({m_.variables[v].id, m_.variables[v].type, written_value_[v]});
      }
    }
  }

  // Step f): edges for the next evolution and the stability verdict.
  void finish() {
    summarize();
    for (std::size_t s = 0; s < m_.steps.size(); ++s) {
      st_.step_edges[s] = st_.active[s] == snap_active_[s]
                              ? edge_none
                              : (st_.active[s] ? edge_rising : edge_falling);
    }
    for (std::size_t v = 0; v < m_.variables.size(); ++v) {
      std::uint8_t e = edge_none;
      if (m_.variables[v].type == ValueType::boolean && st_.values[v] != snap_values_[v]) {
        e = st_.values[v] ? edge_rising : edge_falling;
      }
      st_.variable_edges[v] = e;
    }
    st_.forced = forced_now_;
  }

  const CompiledModel& m_;
  EngineState& st_;
  const Policy& policy_;
  const std::vector<char> snap_active_;
  const std::vector<Value> snap_values_;
  const std::vector<std::uint8_t> var_edges_;
  const std::vector<std::uint8_t> step_edges_;
  const std::vector<char> pending_at_start_;
  std::vector<char> hier_deact_;
  std::vector<char> suppressed_;
  std::vector<char> rule_five_;
  std::vector<char> to_act_;
  std::vector<char> to_deact_;
  std::vector<char> forced_now_;
  std::vector<std::vector<int>> forced_situation_;
  std::vector<int> forced_by_;
  std::vector<char> enclosure_changed_;
  std::vector<char> written_;
  std::vector<Value> written_value_;
  std::vector<int> writer_;
  EvolutionRecord record_;
};

std::string state_key(const EngineState& st) {
  std::string key;
  key.reserve(st.active.size() * 3 + st.values.size() * 8 + st.forced.size() + 2);
  key.append(st.active.begin(), st.active.end());
  key.append(st.pending.begin(), st.pending.end());
  key.append(st.forced.begin(), st.forced.end());
  key.append(st.step_edges.begin(), st.step_edges.end());
  key.append(st.variable_edges.begin(), st.variable_edges.end());
  for (Value v : st.values) key.append(reinterpret_cast<const char*>(&v), sizeof v);
  return key;
}

}  // namespace

Interpreter::Interpreter(const GrafcetModel& model, Policy policy)
    : Interpreter(compile(model), policy) {}

Interpreter::Interpreter(std::shared_ptr<const CompiledModel> model, Policy policy)
    : model_(std::move(model)), policy_(policy) {
  if (policy_.max_evolutions < 1) throw UsageError("max_evolutions must be positive");
}

RunResult Interpreter::initialize() {
  const CompiledModel& m = *model_;
  state_ = EngineState{};
  state_.active.assign(m.steps.size(), 0);
  state_.pending.assign(m.steps.size(), 0);
  for (std::size_t s = 0; s < m.steps.size(); ++s) {
    if (m.steps[s].initial) state_.active[s] = state_.pending[s] = 1;
  }
  for (const auto& v : m.variables) state_.values.push_back(v.initial);
  state_.variable_edges.assign(m.variables.size(), edge_none);
  state_.step_edges.assign(m.steps.size(), edge_none);
  state_.forced.assign(m.partials.size(), 0);
  state_.initialized = true;
  return run_to_stability();
}

RunResult Interpreter::apply_input_event(const std::vector<std::pair<std::string, Value>>& changes) {
  if (!state_.initialized || !state_.stable) {
    throw UsageError("input event applied while the engine is not in a stable situation");
  }
  const CompiledModel& m = *model_;
  std::vector<std::pair<int, Value>> effective;
  for (const auto& [name, value] : changes) {
    const int v = m.find_variable(name);
    if (v < 0 || m.variables[v].role != VariableRole::input) {
      throw UsageError("'" + name + "' is not an input variable");
    }
    if (m.variables[v].type == ValueType::boolean && value != 0 && value != 1) {
      throw UsageError("boolean input '" + name + "' set to a non-boolean value");
    }
    if (state_.values[v] != value) effective.emplace_back(v, value);
  }
  std::fill(state_.variable_edges.begin(), state_.variable_edges.end(), edge_none);
  std::fill(state_.step_edges.begin(), state_.step_edges.end(), edge_none);
  if (effective.empty()) {
    EvolutionRecord trivial;
    trivial.index = 1;
    trivial.stable = true;
    return StableReport{situation(), outputs(), {trivial}};
  }
  for (const auto& [v, value] : effective) {
    if (m.variables[v].type == ValueType::boolean) {
      state_.variable_edges[v] = value ? edge_rising : edge_falling;
    }
    state_.values[v] = value;
  }
  return run_to_stability();
}

EvolutionRecord Interpreter::evolve_once() {
  if (!state_.initialized) throw UsageError("engine not initialized");
  state_.stable = false;
  Evolution evolution(*model_, state_, policy_, ++evolution_counter_);
  EvolutionRecord record = evolution.run();
  record.stable = !any_clearable();
  state_.stable = record.stable;
  return record;
}

RunResult Interpreter::run_to_stability() {
  evolution_counter_ = 0;
  std::vector<EvolutionRecord> trace;
  std::unordered_map<std::string, int> seen;
  for (;;) {
    auto [it, fresh] = seen.emplace(state_key(state_), static_cast<int>(trace.size()));
    if (!fresh) {
      state_.stable = false;
      const int period = static_cast<int>(trace.size()) - it->second;
      return RunError{RunErrorKind::unstable_cycle,
                      "situation " + format_situation(situation()) + " repeats after " +
                          std::to_string(trace.size()) + " evolutions (period " +
                          std::to_string(period) + ")",
                      std::move(trace)};
    }
    if (static_cast<int>(trace.size()) >= policy_.max_evolutions) {
      state_.stable = false;
      return RunError{RunErrorKind::evolution_budget_exceeded,
                      "no stable situation within " + std::to_string(policy_.max_evolutions) +
                          " evolutions",
                      std::move(trace)};
    }
    try {
      trace.push_back(evolve_once());
    } catch (const EvolutionFailure& failure) {
      state_.stable = false;
      trace.push_back(failure.partial_record());
      return RunError{failure.kind(), failure.what(), std::move(trace)};
    }
    if (trace.back().stable) {
      recompute_continuous_outputs();
      return StableReport{situation(), outputs(), std::move(trace)};
    }
  }
}

bool Interpreter::any_clearable() const {
  const CompiledModel& m = *model_;
  for (std::size_t pg = 0; pg < m.partials.size(); ++pg) {
    if (state_.forced[pg]) continue;
    for (int t : m.partials[pg].transitions) {
      const CompiledTransition& tr = m.transitions[t];
      bool enabled = std::all_of(tr.pre.begin(), tr.pre.end(),
                                 [&](int s) { return state_.active[s] != 0; });
      if (enabled &&
          tr.condition.evaluate(state_.values, state_.active, state_.variable_edges,
                                state_.step_edges)) {
        return true;
      }
    }
  }
  return false;
}

void Interpreter::recompute_continuous_outputs() {
  const CompiledModel& m = *model_;
  const std::vector<std::uint8_t> no_var_edges(m.variables.size(), edge_none);
  const std::vector<std::uint8_t> no_step_edges(m.steps.size(), edge_none);
  std::vector<Value> next = state_.values;
  for (int o : m.continuous_outputs) next[o] = 0;
  for (std::size_t s = 0; s < m.steps.size(); ++s) {
    if (!state_.active[s]) continue;
    for (const auto& a : m.steps[s].continuous) {
      if (!a.has_condition ||
          a.condition.evaluate(state_.values, state_.active, no_var_edges, no_step_edges)) {
        next[a.target] = 1;
      }
    }
  }
  state_.values = std::move(next);
}

std::string Interpreter::situation_of(const std::string& partial) const {
  const int pg = model_->find_partial(partial);
  if (pg < 0) throw UsageError("unknown partial Grafcet '" + partial + "'");
  std::vector<std::string> ids;
  for (int s : model_->partials[pg].steps) {
    if (!state_.active.empty() && state_.active[s]) ids.push_back(model_->steps[s].id);
  }
  return situation_notation(partial, std::move(ids));
}

std::vector<PartialSituation> Interpreter::situation() const {
  std::vector<PartialSituation> out;
  for (const auto& p : model_->partials) {
    PartialSituation ps{p.id, {}};
    for (int s : p.steps) {
      if (!state_.active.empty() && state_.active[s]) ps.steps.push_back(model_->steps[s].id);
    }
    sort_step_ids(ps.steps);
    out.push_back(std::move(ps));
  }
  return out;
}

bool Interpreter::step_activity(const std::string& step) const {
  const int s = model_->find_step(step);
  if (s < 0) throw UsageError("unknown step '" + step + "'");
  return !state_.active.empty() && state_.active[s];
}

Value Interpreter::value_of(const std::string& variable) const {
  const int v = model_->find_variable(variable);
  if (v < 0) throw UsageError("unknown variable '" + variable + "'");
  return state_.values.empty() ? model_->variables[v].initial : state_.values[v];
}

std::vector<Binding> Interpreter::outputs() const {
  std::vector<Binding> out;
  for (std::size_t v = 0; v < model_->variables.size(); ++v) {
    const auto& var = model_->variables[v];
    if (var.role != VariableRole::output) continue;
    out.push_back({var.id, var.type, state_.values.empty() ? var.initial : state_.values[v]});
  }
  return out;
}

}  // namespace grafcet

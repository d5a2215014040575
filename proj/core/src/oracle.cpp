#include "grafcet/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

namespace grafcet {

std::string describe(const Observation& o) {
  if (o.error) return std::string("error ") + to_string(*o.error);
  std::string out = format_situation(o.situation);
  for (const auto& b : o.outputs) out += " " + b.name + "=" + format_value(b.type, b.value);
  return out;
}

namespace {

using Names = std::set<std::string>;

struct Conflict {
  RunErrorKind kind;
};

struct World {
  Names active;
  std::map<std::string, Value> values;
  Names events;  // "+a", "-a", "+X1", ...
  Names forced;
  Names owed;    // initial steps whose activation actions are still due
};

std::string fingerprint(const World& w) {
  std::string key;
  for (const auto& s : w.active) key += s + ",";
  key += "|";
  for (const auto& [k, v] : w.values) key += k + "=" + std::to_string(v) + ",";
  key += "|";
  for (const auto& e : w.events) key += e + ",";
  key += "|";
  for (const auto& f : w.forced) key += f + ",";
  key += "|";
  for (const auto& o : w.owed) key += o + ",";
  return key;
}

Names difference(const Names& a, const Names& b) {
  Names out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

Names intersection(const Names& a, const Names& b) {
  Names out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

class Oracle {
 public:
  Oracle(const GrafcetModel& model, Policy policy) : m_(model), policy_(policy) {
    for (const auto& v : m_.variables) decl_[v.id] = &v;
    for (const auto& pg : m_.partials) {
      for (const auto& s : pg.steps) owner_[s.id] = &pg;
    }
    rank_partials();
  }

  Observation start() {
    world_ = World{};
    for (const auto& pg : m_.partials) {
      for (const auto& s : pg.steps) {
        if (s.initial) {
          world_.active.insert(s.id);
          world_.owed.insert(s.id);
        }
      }
    }
    for (const auto& v : m_.variables) world_.values[v.id] = v.initial;
    return settle();
  }

  Observation event(const InputChanges& changes) {
    world_.events.clear();
    bool any = false;
    for (const auto& [id, value] : changes) {
      if (world_.values.at(id) == value) continue;
      any = true;
      if (decl_.at(id)->type == ValueType::boolean) world_.events.insert((value ? "+" : "-") + id);
      world_.values[id] = value;
    }
    if (!any) return observe();
    return settle();
  }

 private:
  // Hierarchical depth by repeated relaxation over forcing / enclosing pairs.
  void rank_partials() {
    std::map<std::string, int> depth;
    std::vector<std::pair<std::string, std::string>> above;
    for (const auto& pg : m_.partials) {
      depth[pg.id] = 0;
      for (const auto& s : pg.steps) {
        for (const auto& f : s.forcings) above.emplace_back(pg.id, f.target);
        for (const auto& e : s.encloses) above.emplace_back(pg.id, e);
      }
    }
    for (std::size_t round = 0; round < m_.partials.size(); ++round) {
      for (const auto& [sup, inf] : above) depth[inf] = std::max(depth[inf], depth[sup] + 1);
    }
    for (const auto& pg : m_.partials) order_.push_back(&pg);
    std::stable_sort(order_.begin(), order_.end(), [&](const PartialGrafcet* a, const PartialGrafcet* b) {
      return depth[a->id] < depth[b->id];
    });
  }

  Value eval(const Expression& e, const Names& act, const std::map<std::string, Value>& vals,
             const Names& events) const {
    using Op = Expression::Op;
    auto sub = [&](const Expression& x) { return eval(x, act, vals, events); };
    auto edge_name = [](const Expression& ref) {
      return ref.op() == Op::step_activity ? "X" + ref.identifier() : ref.identifier();
    };
    switch (e.op()) {
      case Op::bool_literal:
      case Op::int_literal: return e.literal();
      case Op::name:
      case Op::variable: return vals.at(e.identifier());
      case Op::step_activity: return act.count(e.identifier()) ? 1 : 0;
      case Op::logical_not: return sub(e.lhs()) == 0;
      case Op::logical_and: return sub(e.lhs()) != 0 && sub(e.rhs()) != 0;
      case Op::logical_or: return sub(e.lhs()) != 0 || sub(e.rhs()) != 0;
      case Op::equal: return sub(e.lhs()) == sub(e.rhs());
      case Op::not_equal: return sub(e.lhs()) != sub(e.rhs());
      case Op::less: return sub(e.lhs()) < sub(e.rhs());
      case Op::less_equal: return sub(e.lhs()) <= sub(e.rhs());
      case Op::greater: return sub(e.lhs()) > sub(e.rhs());
      case Op::greater_equal: return sub(e.lhs()) >= sub(e.rhs());
      case Op::add:
        return static_cast<Value>(static_cast<std::uint64_t>(sub(e.lhs())) +
                                  static_cast<std::uint64_t>(sub(e.rhs())));
      case Op::subtract:
        return static_cast<Value>(static_cast<std::uint64_t>(sub(e.lhs())) -
                                  static_cast<std::uint64_t>(sub(e.rhs())));
      case Op::rising: return events.count("+" + edge_name(e.lhs())) ? 1 : 0;
      case Op::falling: return events.count("-" + edge_name(e.lhs())) ? 1 : 0;
    }
    return 0;
  }

  Names steps_of(const PartialGrafcet& pg, const Names& within) const {
    Names out;
    for (const auto& s : pg.steps) {
      if (within.count(s.id)) out.insert(s.id);
    }
    return out;
  }

  // --- one evolution -------------------------------------------------------

  struct Pass {
    Names before;
    std::map<std::string, Value> snapshot;
    Names events;
    Names owed_before;
    Names knocked_out;  // deactivated by forcing or enclosing in this pass
    Names forced;
    std::map<std::string, Names> forced_to;
    Names enclosure_touched;
    std::map<std::string, Value> assigned;
  };

  void assign(Pass& p, const Action& a) {
    Value v = eval(*a.value, p.before, p.snapshot, p.events);
    if (decl_.at(a.target)->type == ValueType::boolean) v = v != 0;
    auto [it, fresh] = p.assigned.emplace(a.target, v);
    if (!fresh && it->second != v) throw Conflict{RunErrorKind::write_conflict};
    world_.values[a.target] = v;
  }

  void on_activation(Pass& p, const std::string& step) {
    for (const auto& a : m_.find_step(step)->actions) {
      if (a.kind == ActionKind::stored_on_activation) assign(p, a);
    }
  }

  void move_steps(Pass& p, const PartialGrafcet& pg) {
    const bool frozen = policy_.forcing == ForcingEvaluation::preemptive ? p.forced.count(pg.id) > 0
                                                                         : world_.forced.count(pg.id) > 0;
    const std::size_t n = pg.transitions.size();
    std::vector<bool> fires(n, false);
    for (std::size_t i = 0; i < n && !frozen; ++i) {
      const auto& t = pg.transitions[i];
      bool ok = true;
      for (const auto& s : t.pre) ok = ok && p.before.count(s) && !p.knocked_out.count(s);
      fires[i] = ok && eval(t.condition, p.before, p.snapshot, p.events) != 0;
    }
    // Largest subset of transitions whose members all fire.
    std::uint32_t chosen = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      bool all = true;
      for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i & 1u) && !fires[i]) all = false;
      }
      if (all && std::popcount(mask) > std::popcount(chosen)) chosen = mask;
    }
    Names to_activate;
    Names to_deactivate;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(chosen >> i & 1u)) continue;
      to_deactivate.insert(pg.transitions[i].pre.begin(), pg.transitions[i].pre.end());
      to_activate.insert(pg.transitions[i].post.begin(), pg.transitions[i].post.end());
    }
    const Names both = intersection(to_activate, to_deactivate);
    const Names going = difference(to_deactivate, to_activate);
    const Names coming = difference(difference(difference(to_activate, to_deactivate), p.before), world_.active);
    for (const auto& s : going) world_.active.erase(s);
    for (const auto& s : coming) world_.active.insert(s);
    (void)both;  // stays active with no effect at all

    for (const auto& s : going) {
      for (const auto& a : m_.find_step(s)->actions) {
        if (a.kind == ActionKind::stored_on_deactivation) assign(p, a);
      }
    }
    for (const auto& s : coming) on_activation(p, s);
    for (const auto& s : steps_of(pg, world_.owed)) {
      world_.owed.erase(s);
      on_activation(p, s);
    }
    for (const auto& step : pg.steps) {
      if (!p.before.count(step.id) || p.knocked_out.count(step.id)) continue;
      for (const auto& a : step.actions) {
        if (a.kind == ActionKind::stored_on_event && eval(*a.condition, p.before, p.snapshot, p.events)) {
          assign(p, a);
        }
      }
    }
  }

  void impose(Pass& p, const PartialGrafcet& target, const Names& wanted) {
    for (const auto& s : steps_of(target, world_.active)) {
      if (!wanted.count(s)) {
        world_.active.erase(s);
        p.knocked_out.insert(s);
      }
    }
    for (const auto& s : wanted) {
      if (!world_.active.count(s)) {
        world_.active.insert(s);
        on_activation(p, s);
      }
    }
  }

  void force(Pass& p, const ForcingOrder& f) {
    const PartialGrafcet& target = *m_.find_partial(f.target);
    Names wanted;
    switch (f.spec.variant) {
      case SituationSpec::Variant::explicit_set: wanted.insert(f.spec.steps.begin(), f.spec.steps.end()); break;
      case SituationSpec::Variant::current: wanted = steps_of(target, world_.active); break;
      case SituationSpec::Variant::empty: break;
      case SituationSpec::Variant::init:
        for (const auto& s : target.steps) {
          if (s.initial) wanted.insert(s.id);
        }
        break;
    }
    if (p.forced.count(target.id) && p.forced_to[target.id] != wanted) {
      throw Conflict{RunErrorKind::forcing_conflict};
    }
    if (target.enclosed_by) {
      const bool on = world_.active.count(*target.enclosed_by) > 0;
      if (on == wanted.empty()) throw Conflict{RunErrorKind::hierarchy_conflict};
    }
    if (p.enclosure_touched.count(target.id) && wanted != steps_of(target, world_.active)) {
      throw Conflict{RunErrorKind::hierarchy_conflict};
    }
    impose(p, target, wanted);
    p.forced.insert(target.id);
    p.forced_to[target.id] = wanted;
  }

  void enclose(Pass& p, const std::string& enclosed, bool on) {
    const PartialGrafcet& pg = *m_.find_partial(enclosed);
    Names wanted;
    Names current = steps_of(pg, world_.active);
    if (on) {
      wanted = current;
      for (const auto& s : pg.steps) {
        if (s.activation_link) wanted.insert(s.id);
      }
    }
    if (wanted == current) return;
    if (p.forced.count(pg.id)) throw Conflict{RunErrorKind::hierarchy_conflict};
    impose(p, pg, wanted);
    p.enclosure_touched.insert(pg.id);
  }

  void emit(Pass& p, const PartialGrafcet& pg) {
    for (const auto& step : pg.steps) {
      if (world_.active.count(step.id)) {
        for (const auto& f : step.forcings) force(p, f);
      }
      if (step.kind != StepKind::enclosing) continue;
      const bool was = p.before.count(step.id) && !p.owed_before.count(step.id);
      const bool is = world_.active.count(step.id) > 0;
      if (was == is) continue;
      for (const auto& e : step.encloses) enclose(p, e, is);
    }
  }

  bool evolve() {
    Pass p;
    p.before = world_.active;
    p.snapshot = world_.values;
    p.events = world_.events;
    p.owed_before = world_.owed;
    if (policy_.forcing == ForcingEvaluation::preemptive) {
      for (const auto* pg : order_) {
        move_steps(p, *pg);
        emit(p, *pg);
      }
    } else {
      for (const auto* pg : order_) move_steps(p, *pg);
      for (const auto* pg : order_) emit(p, *pg);
    }

    Names next_events;
    for (const auto& s : difference(world_.active, p.before)) next_events.insert("+X" + s);
    for (const auto& s : difference(p.before, world_.active)) next_events.insert("-X" + s);
    for (const auto& v : m_.variables) {
      if (v.type != ValueType::boolean) continue;
      const Value now = world_.values.at(v.id);
      if (now != p.snapshot.at(v.id)) next_events.insert((now ? "+" : "-") + v.id);
    }
    world_.events = std::move(next_events);
    world_.forced = p.forced;

    for (const auto& pg : m_.partials) {
      if (world_.forced.count(pg.id)) continue;
      for (const auto& t : pg.transitions) {
        const bool enabled = std::all_of(t.pre.begin(), t.pre.end(),
                                         [&](const std::string& s) { return world_.active.count(s) > 0; });
        if (enabled && eval(t.condition, world_.active, world_.values, world_.events)) return false;
      }
    }
    return true;
  }

  Observation settle() {
    std::vector<std::string> seen;
    for (int count = 0;; ++count) {
      const std::string key = fingerprint(world_);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) return failure(RunErrorKind::unstable_cycle);
      seen.push_back(key);
      if (count >= policy_.max_evolutions) return failure(RunErrorKind::evolution_budget_exceeded);
      try {
        if (evolve()) break;
      } catch (const Conflict& c) {
        return failure(c.kind);
      }
    }
    // Continuous outputs at the stable situation.
    Names driven;
    Names asserted;
    for (const auto& pg : m_.partials) {
      for (const auto& s : pg.steps) {
        for (const auto& a : s.actions) {
          if (a.kind != ActionKind::continuous) continue;
          driven.insert(a.target);
          if (world_.active.count(s.id) &&
              (!a.condition || eval(*a.condition, world_.active, world_.values, Names{}))) {
            asserted.insert(a.target);
          }
        }
      }
    }
    for (const auto& o : driven) world_.values[o] = asserted.count(o) ? 1 : 0;
    return observe();
  }

  Observation failure(RunErrorKind kind) {
    failed_ = true;
    return Observation{kind, {}, {}};
  }

  Observation observe() const {
    Observation o;
    for (const auto& pg : m_.partials) {
      PartialSituation ps{pg.id, {}};
      for (const auto& s : steps_of(pg, world_.active)) ps.steps.push_back(s);
      sort_step_ids(ps.steps);
      o.situation.push_back(std::move(ps));
    }
    for (const auto& v : m_.variables) {
      if (v.role == VariableRole::output) o.outputs.push_back({v.id, v.type, world_.values.at(v.id)});
    }
    return o;
  }

 public:
  bool failed() const { return failed_; }

 private:
  const GrafcetModel& m_;
  Policy policy_;
  std::map<std::string, const VariableDecl*> decl_;
  std::map<std::string, const PartialGrafcet*> owner_;
  std::vector<const PartialGrafcet*> order_;
  World world_;
  bool failed_ = false;
};

}  // namespace

std::vector<Observation> oracle_run(const GrafcetModel& model, const std::vector<InputChanges>& sequence,
                                    Policy policy, OracleLimits limits) {
  int steps = 0;
  int inputs = 0;
  for (const auto& pg : model.partials) {
    steps += static_cast<int>(pg.steps.size());
    if (static_cast<int>(pg.transitions.size()) > limits.max_transitions_per_partial) {
      throw OracleScaleExceeded("partial Grafcet '" + pg.id + "' has too many transitions for the oracle");
    }
    for (const auto& s : pg.steps) {
      if (s.kind == StepKind::macro) throw OracleScaleExceeded("the oracle needs a macro-expanded model");
    }
  }
  for (const auto& v : model.variables) inputs += v.role == VariableRole::input;
  if (steps > limits.max_steps) throw OracleScaleExceeded("too many steps for the oracle");
  if (inputs > limits.max_inputs) throw OracleScaleExceeded("too many inputs for the oracle");

  Oracle oracle(model, policy);
  std::vector<Observation> out{oracle.start()};
  for (const auto& changes : sequence) {
    if (oracle.failed()) break;
    out.push_back(oracle.event(changes));
  }
  return out;
}

std::vector<Observation> engine_run(std::shared_ptr<const CompiledModel> model,
                                    const std::vector<InputChanges>& sequence, Policy policy) {
  Interpreter engine(std::move(model), policy);
  auto observe = [](const RunResult& r) {
    if (const auto* e = std::get_if<RunError>(&r)) return Observation{e->kind, {}, {}};
    const auto& report = std::get<StableReport>(r);
    return Observation{std::nullopt, report.situation, report.outputs};
  };
  std::vector<Observation> out{observe(engine.initialize())};
  for (const auto& changes : sequence) {
    if (out.back().error) break;
    out.push_back(observe(engine.apply_input_event(changes)));
  }
  return out;
}

}  // namespace grafcet

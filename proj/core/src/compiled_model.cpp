#include "grafcet/compiled_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace grafcet {

Value Program::evaluate(const std::vector<Value>& values, const std::vector<char>& active,
                        const std::vector<std::uint8_t>& variable_edges,
                        const std::vector<std::uint8_t>& step_edges) const {
  Value stack[64];
  std::vector<Value> spill;
  Value* sp = stack;
  if (code_.size() > 64) {
    spill.resize(code_.size());
    sp = spill.data();
  }
  Value* base = sp;
  for (const auto& in : code_) {
    switch (in.code) {
      case Code::push_literal: *sp++ = in.literal; break;
      case Code::push_variable: *sp++ = values[in.slot]; break;
      case Code::push_step: *sp++ = active[in.slot] ? 1 : 0; break;
      case Code::rising_variable: *sp++ = (variable_edges[in.slot] & edge_rising) ? 1 : 0; break;
      case Code::falling_variable: *sp++ = (variable_edges[in.slot] & edge_falling) ? 1 : 0; break;
      case Code::rising_step: *sp++ = (step_edges[in.slot] & edge_rising) ? 1 : 0; break;
      case Code::falling_step: *sp++ = (step_edges[in.slot] & edge_falling) ? 1 : 0; break;
      case Code::logical_not: sp[-1] = sp[-1] ? 0 : 1; break;
      default: {
        const Value b = *--sp;
        const Value a = sp[-1];
        Value r = 0;
        switch (in.code) {
          case Code::logical_and: r = (a && b) ? 1 : 0; break;
          case Code::logical_or: r = (a || b) ? 1 : 0; break;
          case Code::equal: r = a == b; break;
          case Code::not_equal: r = a != b; break;
          case Code::less: r = a < b; break;
          case Code::less_equal: r = a <= b; break;
          case Code::greater: r = a > b; break;
          case Code::greater_equal: r = a >= b; break;
          case Code::add: r = static_cast<Value>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b)); break;
          case Code::subtract: r = static_cast<Value>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b)); break;
          default: break;
        }
        sp[-1] = r;
      }
    }
  }
  return sp == base ? 0 : sp[-1];
}

int CompiledModel::find_variable(const std::string& id) const {
  auto it = variable_index.find(id);
  return it == variable_index.end() ? -1 : it->second;
}

int CompiledModel::find_step(const std::string& id) const {
  auto it = step_index.find(id);
  return it == step_index.end() ? -1 : it->second;
}

int CompiledModel::find_partial(const std::string& id) const {
  auto it = partial_index.find(id);
  return it == partial_index.end() ? -1 : it->second;
}

namespace {

class Compiler {
 public:
  explicit Compiler(CompiledModel& out) : out_(out) {}

  Program compile(const Expression& e) {
    Program p;
    emit(e, p);
    return p;
  }

 private:
  int variable(const std::string& id) {
    int v = out_.find_variable(id);
    if (v < 0) throw std::invalid_argument("unknown variable '" + id + "'");
    return v;
  }
  int step(const std::string& id) {
    int s = out_.find_step(id);
    if (s < 0) throw std::invalid_argument("unknown step '" + id + "'");
    return s;
  }

  void emit(const Expression& e, Program& p) {
    using Op = Expression::Op;
    using Code = Program::Code;
    auto& code = p.code();
    switch (e.op()) {
      case Op::bool_literal:
      case Op::int_literal: code.push_back({Code::push_literal, 0, e.literal()}); return;
      case Op::variable: code.push_back({Code::push_variable, variable(e.identifier())}); return;
      case Op::step_activity: code.push_back({Code::push_step, step(e.identifier())}); return;
      case Op::name: throw std::invalid_argument("unresolved name '" + e.identifier() + "'");
      case Op::rising:
      case Op::falling: {
        const Expression& ref = e.lhs();
        const bool rising = e.op() == Op::rising;
        if (ref.op() == Op::step_activity) {
          code.push_back({rising ? Code::rising_step : Code::falling_step, step(ref.identifier())});
        } else {
          code.push_back({rising ? Code::rising_variable : Code::falling_variable,
                          variable(ref.identifier())});
        }
        return;
      }
      case Op::logical_not:
        emit(e.lhs(), p);
        code.push_back({Code::logical_not});
        return;
      default: break;
    }
    emit(e.lhs(), p);
    emit(e.rhs(), p);
    Code c = Code::logical_and;
    switch (e.op()) {
      case Op::logical_and: c = Code::logical_and; break;
      case Op::logical_or: c = Code::logical_or; break;
      case Op::equal: c = Code::equal; break;
      case Op::not_equal: c = Code::not_equal; break;
      case Op::less: c = Code::less; break;
      case Op::less_equal: c = Code::less_equal; break;
      case Op::greater: c = Code::greater; break;
      case Op::greater_equal: c = Code::greater_equal; break;
      case Op::add: c = Code::add; break;
      case Op::subtract: c = Code::subtract; break;
      default: throw std::invalid_argument("unexpected expression node");
    }
    code.push_back({c});
  }

  CompiledModel& out_;
};

}  // namespace

std::shared_ptr<const CompiledModel> compile(const GrafcetModel& model) {
  auto out = std::make_shared<CompiledModel>();
  out->name = model.name;

  for (const auto& v : model.variables) {
    out->variable_index[v.id] = static_cast<int>(out->variables.size());
    out->variables.push_back({v.id, v.role, v.type, v.initial});
    if (v.role == VariableRole::input && v.type == ValueType::boolean) {
      out->boolean_inputs.push_back(static_cast<int>(out->variables.size()) - 1);
    }
  }
  for (const auto& pg : model.partials) {
    const int pi = static_cast<int>(out->partials.size());
    out->partial_index[pg.id] = pi;
    CompiledPartial cp;
    cp.id = pg.id;
    auto d = model.depth_of.find(pg.id);
    cp.depth = d == model.depth_of.end() ? 0 : d->second;
    for (const auto& s : pg.steps) {
      const int si = static_cast<int>(out->steps.size());
      out->step_index[s.id] = si;
      CompiledStep cs;
      cs.id = s.id;
      cs.partial = pi;
      cs.initial = s.initial;
      cs.enclosing = s.kind == StepKind::enclosing;
      cs.activation_link = s.activation_link;
      out->steps.push_back(std::move(cs));
      cp.steps.push_back(si);
      if (s.initial) cp.initial_steps.push_back(si);
      if (s.activation_link) cp.link_steps.push_back(si);
    }
    out->partials.push_back(std::move(cp));
  }

  Compiler compiler(*out);
  std::vector<char> is_continuous(out->variables.size(), 0);
  for (const auto& pg : model.partials) {
    const int pi = out->find_partial(pg.id);
    if (pg.enclosed_by) out->partials[pi].enclosed_by = out->find_step(*pg.enclosed_by);
    for (const auto& s : pg.steps) {
      CompiledStep& cs = out->steps[out->find_step(s.id)];
      for (const auto& e : s.encloses) cs.encloses.push_back(out->find_partial(e));
      for (const auto& a : s.actions) {
        CompiledAction ca;
        ca.kind = a.kind;
        ca.target = out->find_variable(a.target);
        if (ca.target < 0) throw std::invalid_argument("unknown action target '" + a.target + "'");
        if (a.condition) {
          ca.has_condition = true;
          ca.condition = compiler.compile(*a.condition);
        }
        if (a.value) ca.value = compiler.compile(*a.value);
        switch (a.kind) {
          case ActionKind::continuous:
            is_continuous[ca.target] = 1;
            cs.continuous.push_back(std::move(ca));
            break;
          case ActionKind::stored_on_activation: cs.on_activation.push_back(std::move(ca)); break;
          case ActionKind::stored_on_deactivation: cs.on_deactivation.push_back(std::move(ca)); break;
          case ActionKind::stored_on_event: cs.on_event.push_back(std::move(ca)); break;
        }
      }
      for (const auto& f : s.forcings) {
        CompiledForcing cf;
        cf.owner = out->find_step(s.id);
        cf.target = out->find_partial(f.target);
        if (cf.target < 0) throw std::invalid_argument("unknown forcing target '" + f.target + "'");
        cf.variant = f.spec.variant;
        for (const auto& id : f.spec.steps) cf.steps.push_back(out->find_step(id));
        std::sort(cf.steps.begin(), cf.steps.end());
        cs.forcings.push_back(std::move(cf));
      }
    }
    for (const auto& t : pg.transitions) {
      CompiledTransition ct;
      ct.id = t.id;
      ct.partial = pi;
      for (const auto& id : t.pre) ct.pre.push_back(out->find_step(id));
      for (const auto& id : t.post) ct.post.push_back(out->find_step(id));
      ct.condition = compiler.compile(t.condition);
      out->partials[pi].transitions.push_back(static_cast<int>(out->transitions.size()));
      out->transitions.push_back(std::move(ct));
    }
  }
  for (std::size_t v = 0; v < is_continuous.size(); ++v) {
    if (is_continuous[v]) out->continuous_outputs.push_back(static_cast<int>(v));
  }

  out->evaluation_order.resize(out->partials.size());
  for (std::size_t i = 0; i < out->partials.size(); ++i) out->evaluation_order[i] = static_cast<int>(i);
  std::stable_sort(out->evaluation_order.begin(), out->evaluation_order.end(),
                   [&](int a, int b) { return out->partials[a].depth < out->partials[b].depth; });
  return out;
}

}  // namespace grafcet

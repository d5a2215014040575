#include <sstream>

#include "grafcet/dsl.hpp"

namespace grafcet {

namespace {

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  return out;
}

void print_action(std::ostream& os, const Action& a) {
  os << "      ";
  switch (a.kind) {
    case ActionKind::continuous:
      os << "do " << a.target;
      if (a.condition) os << " if " << to_source(*a.condition);
      break;
    case ActionKind::stored_on_activation:
      os << "on_activation " << a.target << " := " << to_source(a.value.value_or(Expression()));
      break;
    case ActionKind::stored_on_deactivation:
      os << "on_deactivation " << a.target << " := " << to_source(a.value.value_or(Expression()));
      break;
    case ActionKind::stored_on_event:
      os << "on_event " << to_source(a.condition.value_or(Expression())) << ": " << a.target
         << " := " << to_source(a.value.value_or(Expression()));
      break;
  }
  os << ";\n";
}

void print_step(std::ostream& os, const Step& s) {
  os << "    ";
  if (s.initial) os << "initial ";
  if (s.kind == StepKind::enclosing) os << "enclosing ";
  if (s.kind == StepKind::macro) os << "macro ";
  os << "step " << s.id;
  if (s.activation_link) os << '*';
  if (!s.encloses.empty()) os << " encloses " << join_ids(s.encloses);
  if (!s.actions.empty() || !s.forcings.empty()) {
    os << " {\n";
    for (const auto& a : s.actions) print_action(os, a);
    for (const auto& f : s.forcings) {
      os << "      force " << f.target << ' ' << to_source(f.spec) << ";\n";
    }
    os << "    }";
  }
  os << ";\n";
}

void print_transition(std::ostream& os, const Transition& t) {
  os << "    transition " << t.id << " {\n";
  os << "      from: " << join_ids(t.pre) << ";\n";
  os << "      to: " << join_ids(t.post) << ";\n";
  os << "      when: " << to_source(t.condition) << ";\n";
  os << "    }\n";
}

void print_chart(std::ostream& os, const char* keyword, const std::string& id,
                 const std::vector<Step>& steps, const std::vector<Transition>& transitions) {
  os << "  " << keyword << ' ' << id << " {\n";
  for (const auto& s : steps) print_step(os, s);
  for (const auto& t : transitions) print_transition(os, t);
  os << "  }\n";
}

}  // namespace

std::string print_model(const GrafcetModel& model) {
  std::ostringstream os;
  os << "grafcet " << quote(model.name) << " {\n";
  for (const auto& v : model.variables) {
    os << "  var " << to_string(v.role) << ' ' << v.id << ": " << to_string(v.type);
    if (v.initial != 0) os << " = " << format_value(v.type, v.initial);
    os << ";\n";
  }
  for (const auto& pg : model.partials) {
    os << '\n';
    print_chart(os, "partial", pg.id, pg.steps, pg.transitions);
  }
  for (const auto& e : model.expansions) {
    os << '\n';
    print_chart(os, "expansion", e.macro, e.steps, e.transitions);
  }
  os << "}\n";
  return os.str();
}

}  // namespace grafcet

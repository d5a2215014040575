#include "grafcet/model.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace grafcet {

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.span.file.empty() ? "<input>" : d.span.file) << ':' << d.span.line << ':'
     << d.span.column << ": " << (d.severity == Severity::error ? "error" : "warning") << ": "
     << d.message;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& diagnostic) {
  return os << format_diagnostic(diagnostic);
}

const PartialGrafcet* GrafcetModel::find_partial(const std::string& id) const {
  for (const auto& pg : partials) {
    if (pg.id == id) return &pg;
  }
  return nullptr;
}

const VariableDecl* GrafcetModel::find_variable(const std::string& id) const {
  for (const auto& v : variables) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

const Step* GrafcetModel::find_step(const std::string& id) const {
  for (const auto& pg : partials) {
    for (const auto& s : pg.steps) {
      if (s.id == id) return &s;
    }
  }
  return nullptr;
}

const PartialGrafcet* GrafcetModel::partial_of_step(const std::string& step_id) const {
  for (const auto& pg : partials) {
    for (const auto& s : pg.steps) {
      if (s.id == step_id) return &pg;
    }
  }
  return nullptr;
}

const Expansion* GrafcetModel::find_expansion(const std::string& macro) const {
  for (const auto& e : expansions) {
    if (e.macro == macro) return &e;
  }
  return nullptr;
}

const char* to_string(VariableRole role) {
  switch (role) {
    case VariableRole::input: return "input";
    case VariableRole::output: return "output";
    case VariableRole::internal: return "internal";
  }
  return "?";
}

const char* to_string(ValueType type) { return type == ValueType::boolean ? "bool" : "int"; }

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::normal: return "normal";
    case StepKind::enclosing: return "enclosing";
    case StepKind::macro: return "macro";
    case StepKind::entry: return "entry";
    case StepKind::exit: return "exit";
  }
  return "?";
}

std::string to_source(const SituationSpec& spec) {
  switch (spec.variant) {
    case SituationSpec::Variant::current: return "{*}";
    case SituationSpec::Variant::empty: return "{}";
    case SituationSpec::Variant::init: return "{INIT}";
    case SituationSpec::Variant::explicit_set: break;
  }
  std::string out = "{";
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    if (i) out += ',';
    out += spec.steps[i];
  }
  return out + '}';
}

namespace {

// Value of the trailing digit run, or max() when the id has none.
std::pair<unsigned long long, std::size_t> numeric_suffix(const std::string& id) {
  std::size_t begin = id.size();
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(id[begin - 1]))) --begin;
  if (begin == id.size()) return {std::numeric_limits<unsigned long long>::max(), 0};
  unsigned long long value = 0;
  for (std::size_t i = begin; i < id.size(); ++i) {
    const unsigned digit = static_cast<unsigned>(id[i] - '0');
    if (value > (std::numeric_limits<unsigned long long>::max() - digit) / 10) {
      return {std::numeric_limits<unsigned long long>::max() - 1, id.size() - begin};
    }
    value = value * 10 + digit;
  }
  return {value, id.size() - begin};
}

}  // namespace

bool step_id_less(const std::string& a, const std::string& b) {
  const auto na = numeric_suffix(a);
  const auto nb = numeric_suffix(b);
  if (na.first != nb.first) return na.first < nb.first;
  return a < b;
}

void sort_step_ids(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end(), step_id_less);
}

std::string situation_notation(const std::string& partial, std::vector<std::string> steps) {
  sort_step_ids(steps);
  std::string out = partial + '{';
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ',';
    out += steps[i];
  }
  return out + '}';
}

std::string format_value(ValueType type, Value value) {
  if (type == ValueType::boolean) return value ? "true" : "false";
  return std::to_string(value);
}

}  // namespace grafcet

#include "fixtures.hpp"

#include <functional>
#include <stdexcept>

#include "grafcet/dsl.hpp"

#ifndef GRAFCET_FIXTURE_DIR
#error "GRAFCET_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace grafcet::testing {

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(GRAFCET_FIXTURE_DIR) / (name + ".gft");
}

namespace {

GrafcetModel require(AnalysisResult result, const std::string& what) {
  if (!result.ok()) {
    std::string message = "analysis of " + what + " failed:";
    for (const auto& d : result.diagnostics) message += "\n  " + format_diagnostic(d);
    throw std::runtime_error(message);
  }
  return std::move(*result.model);
}

}  // namespace

GrafcetModel load_fixture(const std::string& name) {
  return require(load_model(fixture_path(name)), name);
}

std::shared_ptr<const CompiledModel> compile_fixture(const std::string& name) {
  return compile(load_fixture(name));
}

GrafcetModel analyzed(const std::string& source) {
  ParseResult parsed = parse_model(source);
  if (!parsed.ok()) {
    std::string message = "parse failed:";
    for (const auto& d : parsed.diagnostics) message += "\n  " + format_diagnostic(d);
    throw std::runtime_error(message);
  }
  return require(analyze(*parsed.model), "inline model");
}

const std::vector<std::string>& runnable_fixtures() {
  static const std::vector<std::string> names{
      "m_rw",  "m_rw_perm", "m_r5e",          "m_ev",           "m_shift",
      "m_fo",  "m_div",     "m_macro",        "m_macro_nested", "m_enc",
      "m_conflict", "m_transient_fo", "m_toggle", "m_counter",
  };
  return names;
}

std::vector<std::vector<InputChanges>> toggle_sequences(const GrafcetModel& model, int max_length,
                                                        int max_inputs) {
  std::vector<const VariableDecl*> inputs;
  for (const auto& v : model.variables) {
    if (v.role == VariableRole::input && v.type == ValueType::boolean &&
        static_cast<int>(inputs.size()) < max_inputs) {
      inputs.push_back(&v);
    }
  }
  std::vector<std::vector<InputChanges>> out;
  std::vector<InputChanges> current;
  std::vector<Value> values;
  for (const auto* v : inputs) values.push_back(v->initial);
  std::function<void()> rec = [&] {
    out.push_back(current);
    if (static_cast<int>(current.size()) == max_length) return;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      values[i] = !values[i];
      current.push_back({{inputs[i]->id, values[i]}});
      rec();
      current.pop_back();
      values[i] = !values[i];
    }
  };
  rec();
  return out;
}

}  // namespace grafcet::testing

#include "grafcet/scenario.hpp"

#include <fstream>
#include <future>
#include <sstream>

#include "grafcet/trace.hpp"
#include "lexer.hpp"

namespace grafcet {

namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

struct SyntaxError {
  Diagnostic diagnostic;
};

class ScenarioParser {
 public:
  explicit ScenarioParser(std::vector<Token> tokens) : ts_(std::move(tokens)) {}

  Scenario parse() {
    Scenario scenario;
    while (!ts_.at_end()) scenario.steps.push_back(parse_step());
    if (scenario.steps.empty() || scenario.steps.front().kind != ScenarioStep::Kind::init) {
      const SourceSpan span = scenario.steps.empty() ? ts_.peek().span : scenario.steps.front().span;
      throw SyntaxError{{Severity::error, "scenario must start with 'init;'", span}};
    }
    return scenario;
  }

 private:
  [[noreturn]] void fail(const Token& at, std::string message) {
    throw SyntaxError{{Severity::error, std::move(message), at.span}};
  }

  void expect_punct(std::string_view p) {
    if (!ts_.accept_punct(p)) fail(ts_.peek(), "expected '" + std::string(p) + "'");
  }

  std::string identifier(const char* what) {
    const Token& t = ts_.peek();
    if (t.kind != TokenKind::word) fail(t, std::string("expected ") + what);
    return ts_.next().text;
  }

  Value literal() {
    const bool negative = ts_.accept_punct("-");
    const Token& t = ts_.peek();
    if (!negative && t.is_word("true")) return ts_.next(), 1;
    if (!negative && t.is_word("false")) return ts_.next(), 0;
    if (t.kind == TokenKind::word && detail::is_all_digits(t.text)) {
      auto v = detail::parse_integer(t.text, negative);
      if (!v) fail(t, "integer literal out of range");
      ts_.next();
      return *v;
    }
    fail(t, "expected a literal (true, false or an integer)");
  }

  std::vector<std::pair<std::string, Value>> assignment_list() {
    std::vector<std::pair<std::string, Value>> out;
    do {
      std::string id = identifier("a variable name");
      expect_punct("=");
      out.emplace_back(std::move(id), literal());
    } while (ts_.accept_punct(","));
    return out;
  }

  ScenarioStep parse_step() {
    ScenarioStep step;
    const Token& head = ts_.peek();
    step.span = head.span;
    if (ts_.accept_word("init")) {
      step.kind = ScenarioStep::Kind::init;
    } else if (ts_.accept_word("set")) {
      step.kind = ScenarioStep::Kind::set;
      step.assignments = assignment_list();
    } else if (ts_.accept_word("expect")) {
      const Token& what = ts_.peek();
      if (ts_.accept_word("situation")) {
        step.kind = ScenarioStep::Kind::expect_situation;
        do {
          PartialSituation ps;
          ps.partial = identifier("a partial Grafcet name");
          expect_punct("{");
          if (!ts_.peek().is_punct("}")) {
            do {
              ps.steps.push_back(identifier("a step id"));
            } while (ts_.accept_punct(","));
          }
          expect_punct("}");
          sort_step_ids(ps.steps);
          step.situation.push_back(std::move(ps));
        } while (ts_.peek().kind == TokenKind::word);
      } else if (ts_.accept_word("var")) {
        step.kind = ScenarioStep::Kind::expect_var;
        std::string id = identifier("a variable name");
        expect_punct("=");
        step.assignments.emplace_back(std::move(id), literal());
      } else if (ts_.accept_word("outputs")) {
        step.kind = ScenarioStep::Kind::expect_outputs;
        step.assignments = assignment_list();
      } else if (ts_.accept_word("error")) {
        step.kind = ScenarioStep::Kind::expect_error;
        const Token& kind = ts_.peek();
        if (kind.kind != TokenKind::word || !parse_run_error_kind(kind.text, step.error)) {
          fail(kind, "unknown error kind '" + kind.text + "'");
        }
        ts_.next();
      } else {
        fail(what, "unknown expectation kind '" + what.text + "'");
      }
    } else {
      fail(head, "expected 'init', 'set' or 'expect'");
    }
    expect_punct(";");
    return step;
  }

  TokenStream ts_;
};

std::string describe_value(const CompiledModel& m, const std::string& id, Value v) {
  const int index = m.find_variable(id);
  const ValueType type = index >= 0 ? m.variables[index].type : ValueType::integer;
  return id + "=" + format_value(type, v);
}

std::string describe_outcome(const RunResult& r) {
  if (const auto* e = std::get_if<RunError>(&r)) return std::string("error ") + to_string(e->kind);
  return format_situation(std::get<StableReport>(r).situation);
}

}  // namespace

ScenarioParseResult parse_scenario(std::string_view source, const std::string& file) {
  ScenarioParseResult result;
  auto tokens = detail::tokenize(source, file, result.diagnostics);
  if (has_errors(result.diagnostics)) return result;
  try {
    result.scenario = ScenarioParser(std::move(tokens)).parse();
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(e.diagnostic);
  }
  return result;
}

ScenarioParseResult parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ScenarioParseResult r;
    r.diagnostics.push_back({Severity::error, "cannot open file", SourceSpan{path.string()}});
    return r;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

ScenarioResult run_scenario(std::shared_ptr<const CompiledModel> model, const Scenario& scenario,
                            Policy policy) {
  ScenarioResult result;
  const CompiledModel& m = *model;
  Interpreter engine(model, policy);
  bool error_unacknowledged = false;

  auto unexpected_error = [](const RunResult& run) {
    const auto& e = std::get<RunError>(run);
    return std::string("unexpected ") + to_string(e.kind) + ": " + e.detail;
  };

  auto fail = [&](std::size_t index, std::string expected, std::string actual) {
    result.failures.push_back({static_cast<int>(index) + 1, std::move(expected), std::move(actual)});
  };

  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    const ScenarioStep& step = scenario.steps[i];
    const bool last_failed = !result.runs.empty() && is_error(result.runs.back());

    if (error_unacknowledged && step.kind != ScenarioStep::Kind::expect_error) {
      fail(i, "expect error", unexpected_error(result.runs.back()));
      error_unacknowledged = false;
      break;
    }
    error_unacknowledged = false;

    try {
      switch (step.kind) {
        case ScenarioStep::Kind::init:
          result.runs.push_back(engine.initialize());
          break;
        case ScenarioStep::Kind::set:
          if (result.runs.empty() || last_failed) {
            throw UsageError("input event without a stable situation");
          }
          result.runs.push_back(engine.apply_input_event(step.assignments));
          break;
        case ScenarioStep::Kind::expect_situation: {
          if (result.runs.empty() || last_failed) {
            fail(i, "situation", result.runs.empty() ? "no run" : describe_outcome(result.runs.back()));
            break;
          }
          std::vector<PartialSituation> actual;
          for (const auto& ps : step.situation) {
            const int pg = m.find_partial(ps.partial);
            if (pg < 0) throw UsageError("unknown partial Grafcet '" + ps.partial + "'");
            actual.push_back(std::get<StableReport>(result.runs.back()).situation[pg]);
          }
          if (actual != step.situation) fail(i, format_situation(step.situation), format_situation(actual));
          break;
        }
        case ScenarioStep::Kind::expect_var: {
          const auto& [id, expected] = step.assignments.front();
          const Value actual = engine.value_of(id);
          if (actual != expected) fail(i, describe_value(m, id, expected), describe_value(m, id, actual));
          break;
        }
        case ScenarioStep::Kind::expect_outputs: {
          if (result.runs.empty() || last_failed) {
            fail(i, "outputs", result.runs.empty() ? "no run" : describe_outcome(result.runs.back()));
            break;
          }
          const auto& outputs = std::get<StableReport>(result.runs.back()).outputs;
          for (const auto& [id, expected] : step.assignments) {
            const Binding* found = nullptr;
            for (const auto& b : outputs) {
              if (b.name == id) found = &b;
            }
            if (!found) throw UsageError("'" + id + "' is not an output variable");
            if (found->value != expected) {
              fail(i, describe_value(m, id, expected), describe_value(m, id, found->value));
            }
          }
          break;
        }
        case ScenarioStep::Kind::expect_error: {
          const std::string expected = std::string("error ") + to_string(step.error);
          if (!last_failed) {
            fail(i, expected, result.runs.empty() ? "no run" : describe_outcome(result.runs.back()));
          } else if (std::get<RunError>(result.runs.back()).kind != step.error) {
            fail(i, expected, describe_outcome(result.runs.back()));
          }
          break;
        }
      }
    } catch (const UsageError& e) {
      fail(i, "valid scenario step", e.what());
      break;
    }
    if (!result.runs.empty() && is_error(result.runs.back()) &&
        (step.kind == ScenarioStep::Kind::init || step.kind == ScenarioStep::Kind::set)) {
      error_unacknowledged = true;
    }
  }
  if (error_unacknowledged) {
    fail(scenario.steps.size() - 1, "expect error",
         unexpected_error(result.runs.back()));
  }
  result.passed = result.failures.empty();
  return result;
}

PolicyComparison compare_policies(std::shared_ptr<const CompiledModel> model,
                                  const Scenario& scenario, int max_evolutions) {
  auto run = [&](ForcingEvaluation forcing) {
    return run_scenario(model, scenario, Policy{forcing, max_evolutions});
  };
  auto second = std::async(std::launch::async, run, ForcingEvaluation::two_phase);
  const ScenarioResult a = run(ForcingEvaluation::preemptive);
  const ScenarioResult b = second.get();

  PolicyComparison cmp;
  const std::size_t runs = std::max(a.runs.size(), b.runs.size());
  for (std::size_t r = 0; r < runs; ++r) {
    if (r >= a.runs.size() || r >= b.runs.size()) {
      cmp.equivalent = false;
      cmp.run = static_cast<int>(r) + 1;
      cmp.evolution = 1;
      cmp.preemptive = r < a.runs.size() ? describe_outcome(a.runs[r]) : "run stopped";
      cmp.two_phase = r < b.runs.size() ? describe_outcome(b.runs[r]) : "run stopped";
      return cmp;
    }
    const auto& ra = evolutions_of(a.runs[r]);
    const auto& rb = evolutions_of(b.runs[r]);
    const std::size_t n = std::max(ra.size(), rb.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (k < ra.size() && k < rb.size() && ra[k] == rb[k]) continue;
      cmp.equivalent = false;
      cmp.run = static_cast<int>(r) + 1;
      cmp.evolution = static_cast<int>(k) + 1;
      cmp.preemptive = k < ra.size() ? record_to_json(ra[k]) : "no evolution";
      cmp.two_phase = k < rb.size() ? record_to_json(rb[k]) : "no evolution";
      cmp.preemptive += " -> " + describe_outcome(a.runs[r]);
      cmp.two_phase += " -> " + describe_outcome(b.runs[r]);
      return cmp;
    }
    if (outcome_to_json(a.runs[r]) != outcome_to_json(b.runs[r])) {
      cmp.equivalent = false;
      cmp.run = static_cast<int>(r) + 1;
      cmp.evolution = static_cast<int>(n);
      cmp.preemptive = outcome_to_json(a.runs[r]);
      cmp.two_phase = outcome_to_json(b.runs[r]);
      return cmp;
    }
  }
  return cmp;
}

std::string format_comparison(const PolicyComparison& c) {
  if (c.equivalent) return "equivalent\n";
  std::ostringstream os;
  os << "divergence at run " << c.run << ", evolution " << c.evolution << "\n"
     << "  preemptive: " << c.preemptive << "\n"
     << "  two-phase:  " << c.two_phase << "\n";
  return os.str();
}

}  // namespace grafcet

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "grafcet/dsl.hpp"
#include "lexer.hpp"

namespace grafcet {

namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

constexpr std::string_view keywords[] = {
    "grafcet",   "var",        "input",         "output",          "internal", "bool",
    "int",       "partial",    "initial",       "enclosing",       "macro",    "step",
    "encloses",  "do",         "if",            "on_activation",   "on_deactivation",
    "on_event",  "force",      "transition",    "from",            "to",       "when",
    "expansion", "NOT",        "AND",           "OR",              "rising",   "falling",
    "true",      "false",      "INIT",
};

struct SyntaxError {
  Diagnostic diagnostic;
};

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  return SourceSpan{a.file, a.line, a.column, b.end_line, b.end_column};
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diagnostics)
      : ts_(std::move(tokens)), diagnostics_(diagnostics) {}

  GrafcetModel parse_document() {
    GrafcetModel model;
    expect_word("grafcet");
    const Token& name = ts_.next();
    if (name.kind != TokenKind::string) fail(name, "expected model name string after 'grafcet'");
    model.name = name.text;
    expect_punct("{");
    while (ts_.peek().is_word("var")) parse_vardecl(model);
    while (ts_.peek().is_word("partial")) model.partials.push_back(parse_partial());
    while (ts_.peek().is_word("expansion")) model.expansions.push_back(parse_expansion());
    const Token& t = ts_.peek();
    if (!t.is_punct("}")) {
      if (t.kind == TokenKind::word && !is_keyword(t.text)) fail(t, "unknown keyword '" + t.text + "'");
      if (t.is_word("var")) fail(t, "variable declarations must precede partial Grafcets");
      if (t.is_word("partial")) fail(t, "partial Grafcets must precede expansion charts");
      fail(t, "expected 'partial', 'expansion' or '}'");
    }
    ts_.next();
    if (!ts_.at_end()) fail(ts_.peek(), "unexpected content after the closing '}'");
    if (model.partials.empty()) {
      diagnostics_.push_back({Severity::error, "a model needs at least one partial Grafcet",
                              name.span});
    }
    return model;
  }

 private:
  [[noreturn]] void fail(const Token& at, std::string message) {
    throw SyntaxError{{Severity::error, std::move(message), at.span}};
  }

  const Token& expect_punct(std::string_view p) {
    const Token& t = ts_.peek();
    if (!t.is_punct(p)) {
      fail(t, "expected '" + std::string(p) + "'" + describe(t));
    }
    return ts_.next();
  }

  const Token& expect_word(std::string_view w) {
    const Token& t = ts_.peek();
    if (!t.is_word(w)) {
      if (t.kind == TokenKind::word && !is_keyword(t.text)) {
        fail(t, "unknown keyword '" + t.text + "', expected '" + std::string(w) + "'");
      }
      fail(t, "expected '" + std::string(w) + "'" + describe(t));
    }
    return ts_.next();
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::end: return " but reached end of input";
      case TokenKind::string: return " but found a string";
      default: return " but found '" + t.text + "'";
    }
  }

  const Token& expect_identifier(const char* what) {
    const Token& t = ts_.peek();
    if (t.kind != TokenKind::word) fail(t, std::string("expected ") + what + describe(t));
    if (is_keyword(t.text)) fail(t, "'" + t.text + "' is a reserved word and cannot name a " + what);
    return ts_.next();
  }

  std::vector<Token> parse_idlist(const char* what) {
    std::vector<Token> ids;
    ids.push_back(expect_identifier(what));
    while (ts_.accept_punct(",")) ids.push_back(expect_identifier(what));
    return ids;
  }

  Value parse_literal(ValueType* type_out) {
    const Token& t = ts_.peek();
    if (t.is_word("true") || t.is_word("false")) {
      ts_.next();
      *type_out = ValueType::boolean;
      return t.text == "true" ? 1 : 0;
    }
    bool negative = false;
    if (t.is_punct("-")) {
      negative = true;
      ts_.next();
    }
    const Token& digits = ts_.peek();
    if (digits.kind == TokenKind::word && detail::is_all_digits(digits.text)) {
      auto v = detail::parse_integer(digits.text, negative);
      if (!v) fail(digits, "integer literal out of range");
      ts_.next();
      *type_out = ValueType::integer;
      return *v;
    }
    fail(digits, "expected a literal (true, false or an integer)" + describe(digits));
  }

  void parse_vardecl(GrafcetModel& model) {
    expect_word("var");
    VariableRole role;
    const Token& r = ts_.next();
    if (r.is_word("input")) {
      role = VariableRole::input;
    } else if (r.is_word("output")) {
      role = VariableRole::output;
    } else if (r.is_word("internal")) {
      role = VariableRole::internal;
    } else {
      fail(r, "expected 'input', 'output' or 'internal'" + describe(r));
    }
    auto ids = parse_idlist("variable");
    expect_punct(":");
    ValueType type;
    const Token& ty = ts_.next();
    if (ty.is_word("bool")) {
      type = ValueType::boolean;
    } else if (ty.is_word("int")) {
      type = ValueType::integer;
    } else {
      fail(ty, "expected 'bool' or 'int'" + describe(ty));
    }
    Value initial = 0;
    if (ts_.peek().is_punct("=")) {
      const Token& eq = ts_.next();
      ValueType lit_type;
      initial = parse_literal(&lit_type);
      if (lit_type != type) {
        diagnostics_.push_back({Severity::error,
                                std::string("initial value does not match declared type '") +
                                    to_string(type) + "'",
                                eq.span});
      }
      if (role == VariableRole::output) {
        diagnostics_.push_back(
            {Severity::error, "output variables start at false/0 and take no initial value",
             eq.span});
      }
    }
    expect_punct(";");
    for (const auto& id : ids) {
      if (!std::isalpha(static_cast<unsigned char>(id.text[0])) && id.text[0] != '_') {
        diagnostics_.push_back(
            {Severity::error, "variable name '" + id.text + "' must start with a letter", id.span});
      }
      if (id.text.find('.') != std::string::npos) {
        diagnostics_.push_back(
            {Severity::error, "variable name '" + id.text + "' must not contain '.'", id.span});
      }
      model.variables.push_back({id.text, role, type, initial, Origin{id.span}});
    }
  }

  PartialGrafcet parse_partial() {
    const Token& kw = expect_word("partial");
    const Token& id = expect_identifier("partial Grafcet");
    PartialGrafcet pg;
    pg.id = id.text;
    pg.origin.span = join(kw.span, id.span);
    parse_chart_body(pg.steps, pg.transitions);
    return pg;
  }

  Expansion parse_expansion() {
    const Token& kw = expect_word("expansion");
    const Token& id = expect_identifier("macro step");
    Expansion e;
    e.macro = id.text;
    e.origin.span = join(kw.span, id.span);
    parse_chart_body(e.steps, e.transitions);
    return e;
  }

  void parse_chart_body(std::vector<Step>& steps, std::vector<Transition>& transitions) {
    expect_punct("{");
    while (!ts_.peek().is_punct("}")) {
      const Token& t = ts_.peek();
      if (t.is_word("initial") || t.is_word("enclosing") || t.is_word("macro") ||
          t.is_word("step")) {
        steps.push_back(parse_step());
      } else if (t.is_word("transition")) {
        transitions.push_back(parse_transition());
      } else if (t.kind == TokenKind::word && !is_keyword(t.text)) {
        fail(t, "unknown keyword '" + t.text + "'");
      } else {
        fail(t, "expected 'step', 'transition' or '}'" + describe(t));
      }
    }
    ts_.next();
  }

  Step parse_step() {
    Step step;
    const Token& first = ts_.peek();
    if (ts_.accept_word("initial")) step.initial = true;
    if (ts_.accept_word("enclosing")) {
      step.kind = StepKind::enclosing;
    } else if (ts_.accept_word("macro")) {
      step.kind = StepKind::macro;
    }
    expect_word("step");
    const Token& id = expect_identifier("step");
    step.id = id.text;
    if (ts_.accept_punct("*")) step.activation_link = true;
    if (ts_.peek().is_word("encloses")) {
      const Token& enc = ts_.next();
      for (const auto& t : parse_idlist("partial Grafcet")) step.encloses.push_back(t.text);
      if (step.kind != StepKind::enclosing) {
        diagnostics_.push_back(
            {Severity::error, "only enclosing steps may use 'encloses'", enc.span});
      }
    }
    if (ts_.accept_punct("{")) {
      while (!ts_.peek().is_punct("}")) parse_action(step);
      ts_.next();
    }
    const Token& semi = expect_punct(";");
    step.origin.span = join(first.span, semi.span);
    return step;
  }

  void parse_action(Step& step) {
    const Token& kw = ts_.next();
    Action action;
    if (kw.is_word("do")) {
      action.kind = ActionKind::continuous;
      action.target = expect_identifier("variable").text;
      if (ts_.accept_word("if")) action.condition = parse_expr_spanned();
    } else if (kw.is_word("on_activation") || kw.is_word("on_deactivation")) {
      action.kind = kw.text == "on_activation" ? ActionKind::stored_on_activation
                                               : ActionKind::stored_on_deactivation;
      action.target = expect_identifier("variable").text;
      expect_punct(":=");
      action.value = parse_expr_spanned();
    } else if (kw.is_word("on_event")) {
      action.kind = ActionKind::stored_on_event;
      action.condition = parse_expr_spanned();
      expect_punct(":");
      action.target = expect_identifier("variable").text;
      expect_punct(":=");
      action.value = parse_expr_spanned();
    } else if (kw.is_word("force")) {
      ForcingOrder order;
      order.owner = step.id;
      order.target = expect_identifier("partial Grafcet").text;
      order.spec = parse_sitspec();
      const Token& semi = expect_punct(";");
      order.origin.span = join(kw.span, semi.span);
      step.forcings.push_back(std::move(order));
      return;
    } else if (kw.kind == TokenKind::word && !is_keyword(kw.text)) {
      fail(kw, "unknown keyword '" + kw.text + "'");
    } else {
      fail(kw, "expected an action ('do', 'on_activation', 'on_deactivation', 'on_event', "
               "'force')" + describe(kw));
    }
    const Token& semi = expect_punct(";");
    action.origin.span = join(kw.span, semi.span);
    step.actions.push_back(std::move(action));
  }

  SituationSpec parse_sitspec() {
    expect_punct("{");
    SituationSpec spec;
    if (ts_.accept_punct("*")) {
      spec.variant = SituationSpec::Variant::current;
    } else if (ts_.accept_word("INIT")) {
      spec.variant = SituationSpec::Variant::init;
    } else if (ts_.peek().is_punct("}")) {
      spec.variant = SituationSpec::Variant::empty;
    } else {
      spec.variant = SituationSpec::Variant::explicit_set;
      for (const auto& t : parse_idlist("step")) spec.steps.push_back(t.text);
    }
    expect_punct("}");
    return spec;
  }

  Transition parse_transition() {
    const Token& kw = expect_word("transition");
    Transition t;
    t.id = expect_identifier("transition").text;
    expect_punct("{");
    expect_word("from");
    expect_punct(":");
    if (!ts_.peek().is_punct(";")) {
      for (const auto& s : parse_idlist("step")) t.pre.push_back(s.text);
    }
    expect_punct(";");
    expect_word("to");
    expect_punct(":");
    if (!ts_.peek().is_punct(";")) {
      for (const auto& s : parse_idlist("step")) t.post.push_back(s.text);
    }
    expect_punct(";");
    expect_word("when");
    expect_punct(":");
    t.condition = parse_expr_spanned();
    expect_punct(";");
    const Token& close = expect_punct("}");
    t.origin.span = join(kw.span, close.span);
    return t;
  }

  Expression parse_expr_spanned() { return parse_or(); }

  const Token& consume() { return ts_.next(); }

  Expression parse_or() {
    Expression lhs = parse_and();
    while (ts_.peek().is_word("OR")) {
      consume();
      lhs = Expression::binary(Expression::Op::logical_or, lhs, parse_and());
    }
    return lhs;
  }

  Expression parse_and() {
    Expression lhs = parse_compare();
    while (ts_.peek().is_word("AND")) {
      consume();
      lhs = Expression::binary(Expression::Op::logical_and, lhs, parse_compare());
    }
    return lhs;
  }

  Expression parse_compare() {
    Expression lhs = parse_additive();
    static const std::pair<std::string_view, Expression::Op> ops[] = {
        {"=", Expression::Op::equal},        {"!=", Expression::Op::not_equal},
        {"<", Expression::Op::less},         {"<=", Expression::Op::less_equal},
        {">", Expression::Op::greater},      {">=", Expression::Op::greater_equal},
    };
    for (const auto& [text, op] : ops) {
      if (ts_.peek().is_punct(text)) {
        consume();
        Expression rhs = parse_additive();
        for (const auto& [again, unused] : ops) {
          (void)unused;
          if (ts_.peek().is_punct(again)) fail(ts_.peek(), "comparisons do not chain; add parentheses");
        }
        return Expression::binary(op, lhs, rhs);
      }
    }
    return lhs;
  }

  Expression parse_additive() {
    Expression lhs = parse_unary();
    for (;;) {
      if (ts_.peek().is_punct("+")) {
        consume();
        lhs = Expression::binary(Expression::Op::add, lhs, parse_unary());
      } else if (ts_.peek().is_punct("-")) {
        consume();
        lhs = Expression::binary(Expression::Op::subtract, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expression parse_unary() {
    if (ts_.peek().is_word("NOT")) {
      consume();
      return Expression::negate(parse_unary());
    }
    return parse_primary();
  }

  Expression parse_primary() {
    const Token& t = ts_.peek();
    if (t.is_punct("(")) {
      consume();
      Expression inner = parse_or();
      if (!ts_.peek().is_punct(")")) fail(ts_.peek(), "expected ')'" + describe(ts_.peek()));
      consume();
      return inner;
    }
    if (t.is_word("true") || t.is_word("false")) {
      consume();
      return Expression::boolean(t.text == "true");
    }
    if (t.is_punct("-")) {
      consume();
      const Token& digits = ts_.peek();
      if (digits.kind != TokenKind::word || !detail::is_all_digits(digits.text)) {
        fail(digits, "expected an integer after unary '-'");
      }
      auto v = detail::parse_integer(digits.text, true);
      if (!v) fail(digits, "integer literal out of range");
      consume();
      return Expression::integer(*v);
    }
    if (t.is_word("rising") || t.is_word("falling")) {
      const bool rising = t.text == "rising";
      consume();
      if (!ts_.peek().is_punct("(")) fail(ts_.peek(), "expected '(' after '" + t.text + "'");
      consume();
      const Token& id = ts_.peek();
      if (id.kind != TokenKind::word || is_keyword(id.text) || detail::is_all_digits(id.text)) {
        fail(id, "edge atoms apply to a single boolean variable or step activity");
      }
      consume();
      SourceSpan span = id.span;
      if (!ts_.peek().is_punct(")")) {
        fail(ts_.peek(), "edge atoms apply to a single boolean variable or step activity");
      }
      consume();
      Expression ref = Expression::name(id.text);
      name_spans_.emplace_back(id.text, span);
      return rising ? Expression::rising(ref) : Expression::falling(ref);
    }
    if (t.kind == TokenKind::word) {
      if (detail::is_all_digits(t.text)) {
        auto v = detail::parse_integer(t.text, false);
        if (!v) fail(t, "integer literal out of range");
        consume();
        return Expression::integer(*v);
      }
      if (is_keyword(t.text)) fail(t, "unexpected '" + t.text + "' in expression");
      consume();
      name_spans_.emplace_back(t.text, t.span);
      return Expression::name(t.text);
    }
    fail(t, "expected an expression" + describe(t));
  }

 public:
  // First span recorded for each identifier used in an expression.
  std::optional<SourceSpan> span_of_name(const std::string& name) const {
    for (const auto& [n, s] : name_spans_) {
      if (n == name) return s;
    }
    return std::nullopt;
  }

 private:
  TokenStream ts_;
  std::vector<Diagnostic>& diagnostics_;
  std::vector<std::pair<std::string, SourceSpan>> name_spans_;
};

// ---------------------------------------------------------------------------
// Semantic pass: uniqueness, name resolution, typing and local action rules.

class Resolver {
 public:
  Resolver(GrafcetModel& model, const Parser& parser, std::vector<Diagnostic>& diagnostics)
      : model_(model), parser_(parser), diagnostics_(diagnostics) {}

  void run() {
    check_variables();
    check_partials();
    for (auto& pg : model_.partials) {
      resolve_chart(pg.steps, pg.transitions, pg.id, nullptr);
    }
    std::set<std::string> expansion_ids;
    for (auto& e : model_.expansions) {
      if (!expansion_ids.insert(e.macro).second) {
        error("duplicate expansion chart for macro step '" + e.macro + "'", e.origin.span);
      }
      resolve_chart(e.steps, e.transitions, e.macro, &e);
    }
    check_macro_references();
    derive_enclosures();
  }

 private:
  void error(std::string message, const SourceSpan& span) {
    diagnostics_.push_back({Severity::error, std::move(message), span});
  }
  void warning(std::string message, const SourceSpan& span) {
    diagnostics_.push_back({Severity::warning, std::move(message), span});
  }

  void check_variables() {
    std::set<std::string> seen;
    for (const auto& v : model_.variables) {
      if (!seen.insert(v.id).second) error("duplicate variable '" + v.id + "'", v.origin.span);
    }
  }

  void check_partials() {
    std::set<std::string> pg_ids;
    std::set<std::string> trans_ids;
    for (const auto& pg : model_.partials) {
      if (!pg_ids.insert(pg.id).second) {
        error("duplicate partial Grafcet '" + pg.id + "'", pg.origin.span);
      }
      for (const auto& s : pg.steps) {
        if (!global_steps_.emplace(s.id, pg.id).second) {
          error("duplicate step '" + s.id + "'", s.origin.span);
        }
      }
      for (const auto& t : pg.transitions) {
        if (!trans_ids.insert(t.id).second) {
          error("duplicate transition '" + t.id + "'", t.origin.span);
        }
      }
    }
    for (const auto& v : model_.variables) {
      if (v.id.size() > 1 && v.id[0] == 'X' && global_steps_.count(v.id.substr(1))) {
        error("'" + v.id + "' is the implicit activity variable of step '" + v.id.substr(1) +
                  "' and cannot be declared",
              v.origin.span);
      }
    }
  }

  void resolve_chart(std::vector<Step>& steps, std::vector<Transition>& transitions,
                     const std::string& owner, const Expansion* expansion) {
    std::set<std::string> local;
    for (auto& s : steps) {
      if (expansion) {
        if (!local.insert(s.id).second) {
          error("duplicate step '" + s.id + "' in expansion of '" + owner + "'", s.origin.span);
        }
        if (s.kind == StepKind::normal && !s.id.empty()) {
          if (s.id[0] == 'E') s.kind = StepKind::entry;
          if (s.id[0] == 'S') s.kind = StepKind::exit;
        }
        if (s.kind == StepKind::enclosing) {
          error("enclosing steps are not supported inside expansion charts", s.origin.span);
        }
      } else {
        local.insert(s.id);
      }
      check_step(s, owner);
    }
    if (expansion) {
      std::set<std::string> trans_ids;
      for (const auto& t : transitions) {
        if (!trans_ids.insert(t.id).second) {
          error("duplicate transition '" + t.id + "' in expansion of '" + owner + "'",
                t.origin.span);
        }
      }
    }
    for (auto& t : transitions) {
      check_step_list(t.pre, local, t, "from");
      check_step_list(t.post, local, t, "to");
      t.condition = resolve(t.condition, local, t.origin.span);
      expect_type(t.condition, ValueType::boolean, "transition condition", t.origin.span);
    }
    for (auto& s : steps) {
      for (auto& a : s.actions) resolve_action(a, local);
    }
  }

  void check_step(const Step& s, const std::string& owner) {
    if (s.kind == StepKind::macro) {
      if (s.id.empty() || s.id[0] != 'M') {
        error("macro step ids must start with 'M' ('" + s.id + "')", s.origin.span);
      }
      if (!s.actions.empty() || !s.forcings.empty()) {
        error("macro step '" + s.id + "' cannot carry actions or forcing orders", s.origin.span);
      }
      if (!s.encloses.empty()) error("macro step '" + s.id + "' cannot enclose", s.origin.span);
      if (s.activation_link) {
        error("macro step '" + s.id + "' cannot carry an activation link", s.origin.span);
      }
    }
    if (s.kind == StepKind::enclosing) {
      if (s.encloses.empty()) {
        error("enclosing step '" + s.id + "' must list the partial Grafcets it encloses",
              s.origin.span);
      }
      std::set<std::string> seen;
      for (const auto& e : s.encloses) {
        if (!model_.find_partial(e)) {
          error("unknown partial Grafcet '" + e + "' enclosed by step '" + s.id + "'",
                s.origin.span);
        } else if (e == owner) {
          error("step '" + s.id + "' cannot enclose its own partial Grafcet", s.origin.span);
        }
        if (!seen.insert(e).second) {
          error("partial Grafcet '" + e + "' listed twice in 'encloses'", s.origin.span);
        }
      }
    }
    for (const auto& f : s.forcings) {
      if (!model_.find_partial(f.target)) {
        error("forcing order targets unknown partial Grafcet '" + f.target + "'", f.origin.span);
      }
      std::set<std::string> seen;
      for (const auto& id : f.spec.steps) {
        if (!seen.insert(id).second) {
          error("step '" + id + "' listed twice in forcing situation", f.origin.span);
        }
      }
    }
  }

  void check_step_list(const std::vector<std::string>& ids, const std::set<std::string>& local,
                       const Transition& t, const char* field) {
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (!local.count(id)) {
        error("transition '" + t.id + "' " + field + ": unknown step '" + id + "'",
              t.origin.span);
      }
      if (!seen.insert(id).second) {
        error("transition '" + t.id + "' " + field + ": step '" + id + "' listed twice",
              t.origin.span);
      }
    }
  }

  void resolve_action(Action& a, const std::set<std::string>& local) {
    const SourceSpan& span = a.origin.span;
    const VariableDecl* target = model_.find_variable(a.target);
    if (!target) {
      if (a.target.size() > 1 && a.target[0] == 'X') {
        error("step activity variable '" + a.target + "' is read-only", span);
      } else {
        error("action targets undeclared variable '" + a.target + "'", span);
      }
    }
    if (a.condition) {
      a.condition = resolve(*a.condition, local, span);
      expect_type(*a.condition, ValueType::boolean, "action condition", span);
    }
    if (a.value) a.value = resolve(*a.value, local, span);

    switch (a.kind) {
      case ActionKind::continuous:
        if (target && target->role != VariableRole::output) {
          error("continuous action must assert an output variable ('" + a.target + "')", span);
        }
        if (target && target->type != ValueType::boolean) {
          error("continuous action target '" + a.target + "' must be boolean", span);
        }
        if (a.condition && a.condition->contains_edge()) {
          error("edge atom in continuous-action condition", span);
        }
        break;
      case ActionKind::stored_on_event:
        if (a.condition && !a.condition->contains_edge()) {
          error("action on event needs at least one rising/falling edge in its condition", span);
        }
        [[fallthrough]];
      case ActionKind::stored_on_activation:
      case ActionKind::stored_on_deactivation:
        if (target && target->role == VariableRole::input) {
          error("stored action cannot assign input variable '" + a.target + "'", span);
        }
        if (target && a.value) expect_type(*a.value, target->type, "assigned value", span);
        break;
    }
  }

  Expression resolve(const Expression& e, const std::set<std::string>& local,
                     const SourceSpan& fallback) {
    return e.rewrite_leaves([&](const Expression& leaf) -> std::optional<Expression> {
      if (leaf.op() != Expression::Op::name) return std::nullopt;
      const std::string& n = leaf.identifier();
      if (model_.find_variable(n)) return Expression::variable(n);
      if (n.size() > 1 && n[0] == 'X') {
        const std::string step = n.substr(1);
        if (local.count(step) || global_steps_.count(step)) {
          const Step* s = find_any_step(step, local);
          if (s && s->kind == StepKind::macro) {
            error("activity of macro step '" + step + "' is not readable; read its expansion "
                  "steps instead", span_for(n, fallback));
          }
          return Expression::step_activity(step);
        }
      }
      error("unknown identifier '" + n + "'", span_for(n, fallback));
      return std::nullopt;
    });
  }

  const Step* find_any_step(const std::string& id, const std::set<std::string>& local) const {
    for (const auto& pg : model_.partials) {
      for (const auto& s : pg.steps) {
        if (s.id == id) return &s;
      }
    }
    if (local.count(id)) {
      for (const auto& e : model_.expansions) {
        for (const auto& s : e.steps) {
          if (s.id == id) return &s;
        }
      }
    }
    return nullptr;
  }

  SourceSpan span_for(const std::string& name, const SourceSpan& fallback) const {
    auto s = parser_.span_of_name(name);
    return s ? *s : fallback;
  }

  std::optional<ValueType> type_of(const Expression& e, const SourceSpan& span) {
    using Op = Expression::Op;
    switch (e.op()) {
      case Op::bool_literal: return ValueType::boolean;
      case Op::int_literal: return ValueType::integer;
      case Op::name: return std::nullopt;
      case Op::step_activity: return ValueType::boolean;
      case Op::variable: {
        const VariableDecl* v = model_.find_variable(e.identifier());
        return v ? std::optional(v->type) : std::nullopt;
      }
      case Op::rising:
      case Op::falling: {
        const Expression& ref = e.lhs();
        if (ref.op() == Op::variable) {
          const VariableDecl* v = model_.find_variable(ref.identifier());
          if (v && v->type != ValueType::boolean) {
            error("edge atom on non-boolean variable '" + ref.identifier() + "'", span);
          }
        }
        return ValueType::boolean;
      }
      case Op::logical_not: {
        need(e.lhs(), ValueType::boolean, "NOT", span);
        return ValueType::boolean;
      }
      case Op::logical_and:
      case Op::logical_or:
        need(e.lhs(), ValueType::boolean, e.op() == Op::logical_and ? "AND" : "OR", span);
        need(e.rhs(), ValueType::boolean, e.op() == Op::logical_and ? "AND" : "OR", span);
        return ValueType::boolean;
      case Op::add:
      case Op::subtract:
        need(e.lhs(), ValueType::integer, "arithmetic", span);
        need(e.rhs(), ValueType::integer, "arithmetic", span);
        return ValueType::integer;
      case Op::equal:
      case Op::not_equal: {
        auto l = type_of(e.lhs(), span);
        auto r = type_of(e.rhs(), span);
        if (l && r && *l != *r) error("'=' / '!=' compare operands of different types", span);
        return ValueType::boolean;
      }
      default:
        need(e.lhs(), ValueType::integer, "ordering comparison", span);
        need(e.rhs(), ValueType::integer, "ordering comparison", span);
        return ValueType::boolean;
    }
  }

  void need(const Expression& e, ValueType type, const char* context, const SourceSpan& span) {
    auto t = type_of(e, span);
    if (t && *t != type) {
      error(std::string(context) + " expects " +
                (type == ValueType::boolean ? "boolean" : "integer") + " operands",
            span);
    }
  }

  void expect_type(const Expression& e, ValueType type, const char* what,
                   const SourceSpan& span) {
    auto t = type_of(e, span);
    if (t && *t != type) {
      error(std::string(what) + " must be " +
                (type == ValueType::boolean ? "boolean" : "integer"),
            span);
    }
  }

  void check_macro_references() {
    std::set<std::string> macro_ids;
    auto collect = [&](const std::vector<Step>& steps) {
      for (const auto& s : steps) {
        if (s.kind == StepKind::macro) macro_ids.insert(s.id);
      }
    };
    for (const auto& pg : model_.partials) collect(pg.steps);
    for (const auto& e : model_.expansions) collect(e.steps);
    for (const auto& e : model_.expansions) {
      if (!macro_ids.count(e.macro)) {
        warning("expansion chart '" + e.macro + "' is not referenced by any macro step",
                e.origin.span);
      }
    }
  }

  void derive_enclosures() {
    for (const auto& pg : model_.partials) {
      for (const auto& s : pg.steps) {
        for (const auto& target : s.encloses) {
          for (auto& other : model_.partials) {
            if (other.id == target && !other.enclosed_by) other.enclosed_by = s.id;
          }
        }
      }
    }
  }

  GrafcetModel& model_;
  const Parser& parser_;
  std::vector<Diagnostic>& diagnostics_;
  std::map<std::string, std::string> global_steps_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(std::begin(keywords), std::end(keywords), word) != std::end(keywords);
}

ParseResult parse_model(std::string_view source, const std::string& file) {
  ParseResult result;
  auto tokens = detail::tokenize(source, file, result.diagnostics);
  if (has_errors(result.diagnostics)) return result;
  Parser parser(std::move(tokens), result.diagnostics);
  GrafcetModel model;
  try {
    model = parser.parse_document();
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(e.diagnostic);
    return result;
  }
  if (!has_errors(result.diagnostics)) {
    Resolver(model, parser, result.diagnostics).run();
  }
  if (!has_errors(result.diagnostics)) result.model = std::move(model);
  return result;
}

ParseResult parse_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back(
        {Severity::error, "cannot open file", SourceSpan{path.string(), 1, 1, 1, 1}});
    return r;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), path.string());
}

}  // namespace grafcet

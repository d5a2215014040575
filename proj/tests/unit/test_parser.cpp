#include <gtest/gtest.h>

#include <string>

#include "grafcet/dsl.hpp"

namespace grafcet {
namespace {

using Op = Expression::Op;

const char* const minimal =
    R"(grafcet "t" { var input a: bool; partial G1 { initial step 1; step 2; transition t1 { from: 1; to: 2; when: rising(a); } } })";

std::string first_error(const ParseResult& r) {
  for (const auto& d : r.diagnostics) {
    if (d.severity == Severity::error) return d.message;
  }
  return {};
}

std::string wrap(const std::string& body) {
  return "grafcet \"t\" {\n  var input a: bool;\n  var input b: bool;\n  var output O1: bool;\n"
         "  var internal y: bool;\n  var internal n: int;\n" +
         body + "\n}\n";
}

TEST(Parser, MinimalModel) {
  ParseResult r = parse_model(minimal);
  ASSERT_TRUE(r.ok()) << first_error(r);
  const GrafcetModel& m = *r.model;
  EXPECT_EQ(m.name, "t");
  ASSERT_EQ(m.partials.size(), 1u);
  EXPECT_EQ(m.partials[0].steps.size(), 2u);
  ASSERT_EQ(m.partials[0].transitions.size(), 1u);
  EXPECT_TRUE(m.partials[0].steps[0].initial);
  EXPECT_FALSE(m.partials[0].steps[1].initial);
  const Transition& t = m.partials[0].transitions[0];
  EXPECT_EQ(t.pre, std::vector<std::string>{"1"});
  EXPECT_EQ(t.post, std::vector<std::string>{"2"});
  EXPECT_EQ(t.condition, Expression::rising(Expression::variable("a")));
}

TEST(Parser, ConjunctionOfTwoEdges) {
  ParseResult r = parse_model(wrap(
      "partial G1 { initial step 1; step 2; transition t1 { from: 1; to: 2; when: rising(a) AND rising(b); } }"));
  ASSERT_TRUE(r.ok()) << first_error(r);
  EXPECT_EQ(r.model->partials[0].transitions[0].condition,
            Expression::binary(Op::logical_and, Expression::rising(Expression::variable("a")),
                               Expression::rising(Expression::variable("b"))));
}

TEST(Parser, StepActivityReadsResolve) {
  ParseResult r = parse_model(wrap(
      "partial G1 { initial step 1; step 2; transition t1 { from: 1; to: 2; when: X2 OR rising(X1); } }"));
  ASSERT_TRUE(r.ok()) << first_error(r);
  EXPECT_EQ(r.model->partials[0].transitions[0].condition,
            Expression::binary(Op::logical_or, Expression::step_activity("2"),
                               Expression::rising(Expression::step_activity("1"))));
}

TEST(Parser, EdgeInContinuousConditionIsAnError) {
  ParseResult r = parse_model(wrap("partial G1 { initial step 1; step 2 { do O1 if rising(a); }; }"));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(first_error(r), "edge atom in continuous-action condition");
}

TEST(Parser, ActionForms) {
  ParseResult r = parse_model(wrap(R"(partial G1 {
    initial step 1 {
      do O1 if a AND NOT b;
      on_activation n := n + 1;
      on_deactivation y := false;
      on_event rising(a): n := 0;
    };
  })"));
  ASSERT_TRUE(r.ok()) << first_error(r);
  const auto& actions = r.model->partials[0].steps[0].actions;
  ASSERT_EQ(actions.size(), 4u);
  EXPECT_EQ(actions[0].kind, ActionKind::continuous);
  EXPECT_EQ(actions[0].target, "O1");
  ASSERT_TRUE(actions[0].condition.has_value());
  EXPECT_FALSE(actions[0].value.has_value());
  EXPECT_EQ(actions[1].kind, ActionKind::stored_on_activation);
  EXPECT_EQ(to_source(*actions[1].value), "n + 1");
  EXPECT_EQ(actions[2].kind, ActionKind::stored_on_deactivation);
  EXPECT_EQ(actions[3].kind, ActionKind::stored_on_event);
  EXPECT_EQ(*actions[3].condition, Expression::rising(Expression::variable("a")));
}

TEST(Parser, OnEventNeedsAnEdge) {
  ParseResult r = parse_model(wrap("partial G1 { initial step 1 { on_event a: y := true; }; }"));
  EXPECT_EQ(first_error(r), "action on event needs at least one rising/falling edge in its condition");
}

TEST(Parser, ForcingVariants) {
  ParseResult r = parse_model(wrap(R"(partial G1 {
    initial step 1 { force G2 {21, 22}; force G3 {*}; force G4 {}; force G5 {INIT}; };
  }
  partial G2 { initial step 21; step 22; }
  partial G3 { initial step 31; }
  partial G4 { initial step 41; }
  partial G5 { initial step 51; })"));
  ASSERT_TRUE(r.ok()) << first_error(r);
  const auto& f = r.model->partials[0].steps[0].forcings;
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0].target, "G2");
  EXPECT_EQ(f[0].owner, "1");
  EXPECT_EQ(f[0].spec.variant, SituationSpec::Variant::explicit_set);
  EXPECT_EQ(f[0].spec.steps, (std::vector<std::string>{"21", "22"}));
  EXPECT_EQ(f[1].spec.variant, SituationSpec::Variant::current);
  EXPECT_EQ(f[2].spec.variant, SituationSpec::Variant::empty);
  EXPECT_EQ(f[3].spec.variant, SituationSpec::Variant::init);
  EXPECT_EQ(to_source(f[0].spec), "{21,22}");
  EXPECT_EQ(to_source(f[1].spec), "{*}");
}

TEST(Parser, EnclosingAndActivationLinks) {
  ParseResult r = parse_model(wrap(R"(partial G1 { initial enclosing step 1 encloses G2; }
  partial G2 { step 21*; step 22; transition t { from: 21; to: 22; when: a; } })"));
  ASSERT_TRUE(r.ok()) << first_error(r);
  const GrafcetModel& m = *r.model;
  EXPECT_EQ(m.partials[0].steps[0].kind, StepKind::enclosing);
  EXPECT_EQ(m.partials[0].steps[0].encloses, std::vector<std::string>{"G2"});
  EXPECT_EQ(m.partials[1].enclosed_by, std::optional<std::string>("1"));
  EXPECT_TRUE(m.partials[1].steps[0].activation_link);
  EXPECT_FALSE(m.partials[1].steps[1].activation_link);
}

TEST(Parser, DuplicateStepIsAnError) {
  ParseResult r = parse_model(wrap("partial G1 { initial step 1; step 1; }"));
  EXPECT_EQ(first_error(r), "duplicate step '1'");
}

TEST(Parser, UnknownIdentifierIsAnError) {
  ParseResult r =
      parse_model(wrap("partial G1 { initial step 1; step 2; transition t { from: 1; to: 2; when: q; } }"));
  EXPECT_EQ(first_error(r), "unknown identifier 'q'");
}

TEST(Parser, UnknownKeywordIsAnError) {
  ParseResult r = parse_model(wrap("partial G1 { initial stap 1; }"));
  EXPECT_FALSE(r.ok());
  EXPECT_NE(first_error(r).find("'stap'"), std::string::npos) << first_error(r);
}

TEST(Parser, MacroStepIdsStartWithM) {
  ParseResult r = parse_model(wrap("partial G1 { initial step 1; macro step K1; }"));
  EXPECT_EQ(first_error(r), "macro step ids must start with 'M' ('K1')");
}

TEST(Parser, ComparisonsDoNotChain) {
  ParseResult r = parse_model(
      wrap("partial G1 { initial step 1; step 2; transition t { from: 1; to: 2; when: n < 1 < 2; } }"));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(first_error(r).rfind("comparisons do not chain", 0), 0u) << first_error(r);
}

TEST(Parser, DiagnosticsCarryPositions) {
  ParseResult r = parse_model("grafcet \"t\" {\n  partial G1 {\n    initial step 1;\n    step 1;\n  }\n}\n", "x.gft");
  ASSERT_FALSE(r.ok());
  const Diagnostic& d = r.diagnostics.front();
  EXPECT_EQ(d.span.file, "x.gft");
  EXPECT_EQ(d.span.line, 4);
  EXPECT_GE(d.span.column, 5);
  EXPECT_EQ(format_diagnostic(d).rfind("x.gft:4:", 0), 0u) << format_diagnostic(d);
}

TEST(Parser, SpansAreOrdered) {
  ParseResult r = parse_model(minimal);
  ASSERT_TRUE(r.ok());
  for (const auto& s : r.model->partials[0].steps) {
    const SourceSpan& sp = s.origin.span;
    EXPECT_TRUE(sp.line < sp.end_line || (sp.line == sp.end_line && sp.column <= sp.end_column));
  }
}

TEST(Parser, CommentsAndLineEndingsDoNotMatter) {
  std::string unix_text = "# header\ngrafcet \"t\" {\n  var input a: bool; # trailing\n"
                          "  partial G1 { initial step 1; step 2;\n"
                          "    transition t1 { from: 1; to: 2; when: rising(a); } }\n}\n";
  std::string dos_text;
  for (char c : unix_text) {
    if (c == '\n') dos_text += '\r';
    dos_text += c;
  }
  ParseResult a = parse_model(unix_text);
  ParseResult b = parse_model(dos_text);
  ParseResult c = parse_model(minimal);
  ASSERT_TRUE(a.ok()) << first_error(a);
  ASSERT_TRUE(b.ok()) << first_error(b);
  EXPECT_EQ(*a.model, *b.model);
  EXPECT_EQ(*a.model, *c.model);
}

TEST(Parser, ParsingIsPure) {
  const std::string bad = wrap("partial G1 { initial step 1; step 1; step 2 { do O1 if rising(a); }; }");
  ParseResult a = parse_model(bad);
  ParseResult b = parse_model(bad);
  EXPECT_EQ(a.diagnostics, b.diagnostics);
  EXPECT_GE(a.diagnostics.size(), 1u);
}

TEST(Parser, MissingFileBecomesDiagnostic) {
  ParseResult r = parse_model_file("/nonexistent/model.gft");
  EXPECT_FALSE(r.ok());
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].severity, Severity::error);
}

TEST(Parser, Keywords) {
  EXPECT_TRUE(is_keyword("partial"));
  EXPECT_TRUE(is_keyword("AND"));
  EXPECT_FALSE(is_keyword("G1"));
}

}  // namespace
}  // namespace grafcet

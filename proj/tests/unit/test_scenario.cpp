#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "grafcet/scenario.hpp"

namespace grafcet {
namespace {

Scenario parse(const std::string& text) {
  ScenarioParseResult r = parse_scenario(text);
  if (!r.ok()) throw std::runtime_error(format_diagnostic(r.diagnostics.front()));
  return *r.scenario;
}

TEST(ScenarioParser, ThreeSteps) {
  Scenario s = parse("init; set a=true; expect situation G1{2};");
  ASSERT_EQ(s.steps.size(), 3u);
  EXPECT_EQ(s.steps[0].kind, ScenarioStep::Kind::init);
  EXPECT_EQ(s.steps[1].kind, ScenarioStep::Kind::set);
  EXPECT_EQ(s.steps[1].assignments, (std::vector<std::pair<std::string, Value>>{{"a", 1}}));
  EXPECT_EQ(s.steps[2].kind, ScenarioStep::Kind::expect_situation);
  EXPECT_EQ(s.steps[2].situation, (std::vector<PartialSituation>{{"G1", {"2"}}}));
}

TEST(ScenarioParser, ExpectError) {
  Scenario s = parse("init;\nexpect error unstable_cycle;\n");
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_EQ(s.steps[1].kind, ScenarioStep::Kind::expect_error);
  EXPECT_EQ(s.steps[1].error, RunErrorKind::unstable_cycle);
}

TEST(ScenarioParser, OtherForms) {
  Scenario s = parse("# comment\ninit;\nset a=true, b=false;\nexpect var n=-3;\nexpect outputs O=true;\n"
                     "expect situation G1{} G2{21,22};\n");
  ASSERT_EQ(s.steps.size(), 5u);
  EXPECT_EQ(s.steps[1].assignments.size(), 2u);
  EXPECT_EQ(s.steps[2].kind, ScenarioStep::Kind::expect_var);
  EXPECT_EQ(s.steps[2].assignments[0].second, -3);
  EXPECT_EQ(s.steps[3].kind, ScenarioStep::Kind::expect_outputs);
  EXPECT_EQ(s.steps[4].situation, (std::vector<PartialSituation>{{"G1", {}}, {"G2", {"21", "22"}}}));
  EXPECT_EQ(s.steps[2].span.line, 4);
}

TEST(ScenarioParser, MustStartWithInit) {
  ScenarioParseResult r = parse_scenario("set a=true;");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].message, "scenario must start with 'init;'");
}

TEST(ScenarioParser, UnknownExpectation) {
  ScenarioParseResult r = parse_scenario("init; expect colour red;");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].message, "unknown expectation kind 'colour'");
}

TEST(ScenarioParser, UnknownErrorKind) {
  EXPECT_FALSE(parse_scenario("init; expect error UnstableCycle;").ok());
}

TEST(ScenarioRunner, EventScenarioPasses) {
  ScenarioResult r = run_scenario(testing::compile_fixture("m_ev"), parse("init; set a=true; expect situation G1{2};"));
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(r.runs.size(), 2u);
}

TEST(ScenarioRunner, ExpectedErrorPasses) {
  ScenarioResult r = run_scenario(testing::compile_fixture("m_div"), parse("init; expect error unstable_cycle;"));
  EXPECT_TRUE(r.passed);
}

TEST(ScenarioRunner, FailureListsExpectedAndActual) {
  ScenarioResult r = run_scenario(testing::compile_fixture("m_toggle"), parse("init; expect situation G1{2};"));
  EXPECT_FALSE(r.passed);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].step, 2);
  EXPECT_EQ(r.failures[0].expected, "G1{2}");
  EXPECT_EQ(r.failures[0].actual, "G1{1}");
}

TEST(ScenarioRunner, ExpectationsAreCollected) {
  ScenarioResult r = run_scenario(testing::compile_fixture("m_toggle"),
                                  parse("init; expect situation G1{2}; expect outputs on=true; set a=true; "
                                        "expect situation G1{2};"));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.runs.size(), 2u);
}

TEST(ScenarioRunner, UnexpectedErrorStops) {
  ScenarioResult r = run_scenario(testing::compile_fixture("m_div"), parse("init; expect situation G1{1};"));
  EXPECT_FALSE(r.passed);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].actual.find("unstable_cycle"), std::string::npos) << r.failures[0].actual;
}

TEST(ScenarioRunner, UnknownInputFails) {
  ScenarioResult r = run_scenario(testing::compile_fixture("m_toggle"), parse("init; set zz=true;"));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.failures.size(), 1u);
}

TEST(ScenarioRunner, FixtureScenariosPass) {
  for (const auto& name : testing::runnable_fixtures()) {
    auto path = testing::fixture_path(name);
    path.replace_extension(".gsc");
    if (!std::filesystem::exists(path)) continue;
    ScenarioParseResult s = parse_scenario_file(path);
    ASSERT_TRUE(s.ok()) << path;
    Policy policy;
    policy.max_evolutions = 1000;
    ScenarioResult r = run_scenario(testing::compile_fixture(name), *s.scenario, policy);
    EXPECT_TRUE(r.passed) << name << ": " << (r.failures.empty() ? "" : r.failures[0].expected + " / " + r.failures[0].actual);
  }
  ScenarioParseResult two = parse_scenario_file(testing::fixture_path("m_fo").replace_extension("").string() +
                                                "_two_phase.gsc");
  ASSERT_TRUE(two.ok());
  EXPECT_TRUE(run_scenario(testing::compile_fixture("m_fo"), *two.scenario, Policy{ForcingEvaluation::two_phase}).passed);
}

TEST(Compare, ForcedPartialDivergesAtRunTwo) {
  ScenarioParseResult s = parse_scenario_file(testing::fixture_path("m_fo").replace_extension(".gsc"));
  ASSERT_TRUE(s.ok());
  PolicyComparison c = compare_policies(testing::compile_fixture("m_fo"), *s.scenario);
  EXPECT_FALSE(c.equivalent);
  EXPECT_EQ(c.run, 2);
  EXPECT_EQ(c.evolution, 1);
  EXPECT_NE(c.preemptive.find("G2{21}"), std::string::npos) << c.preemptive;
  EXPECT_NE(c.two_phase.find("G2{22}"), std::string::npos) << c.two_phase;
  EXPECT_EQ(format_comparison(c).rfind("divergence at run 2, evolution 1\n", 0), 0u) << format_comparison(c);
}

TEST(Compare, NoForcingIsEquivalent) {
  PolicyComparison c = compare_policies(testing::compile_fixture("m_rw"),
                                        parse("init; set a=true; set a=false; set a=true;"));
  EXPECT_TRUE(c.equivalent);
  EXPECT_EQ(format_comparison(c), "equivalent\n");
}

TEST(Compare, TransientOwnerDiffersOnlyInOrdering) {
  PolicyComparison c = compare_policies(testing::compile_fixture("m_transient_fo"),
                                        parse("init; set a=true; expect situation G1{3} G2{22};"));
  if (!c.equivalent) {
    EXPECT_EQ(c.run, 2);
    ScenarioResult pre = run_scenario(testing::compile_fixture("m_transient_fo"),
                                      parse("init; set a=true; expect situation G1{3} G2{22};"));
    ScenarioResult two = run_scenario(testing::compile_fixture("m_transient_fo"),
                                      parse("init; set a=true; expect situation G1{3} G2{22};"),
                                      Policy{ForcingEvaluation::two_phase});
    EXPECT_TRUE(pre.passed);
    EXPECT_TRUE(two.passed);
  }
}

}  // namespace
}  // namespace grafcet

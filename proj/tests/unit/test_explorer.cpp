#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "fixtures.hpp"
#include "grafcet/explorer.hpp"

namespace grafcet {
namespace {

using testing::compile_fixture;

ExploreOptions with_depth(int depth, ForcingEvaluation policy = ForcingEvaluation::preemptive) {
  ExploreOptions o;
  o.depth = depth;
  o.policy.forcing = policy;
  o.policy.max_evolutions = 500;
  return o;
}

std::set<std::string> node_situations(const StableStateGraph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes) out.insert(format_situation(n.situation));
  return out;
}

TEST(Explorer, ToggleModelHasTwoNodesThreeEdges) {
  StableStateGraph g = explore(compile_fixture("m_toggle"), with_depth(3));
  EXPECT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.root, 0);
  EXPECT_EQ(g.edges[0].source, -1);
  EXPECT_EQ(node_situations(g), (std::set<std::string>{"G1{1}", "G1{2}"}));
}

TEST(Explorer, DepthZeroIsOnlyTheInitialNode) {
  StableStateGraph g = explore(compile_fixture("m_shift"), with_depth(0));
  ASSERT_EQ(g.nodes.size(), 1u);
  EXPECT_EQ(format_situation(g.nodes[0].situation), "G1{1,3}");
  EXPECT_EQ(g.nodes[0].level, 0);
}

TEST(Explorer, EdgesCarryTheExactChangeSet) {
  auto model = compile_fixture("m_conflict");
  ExploreOptions o = with_depth(2);
  o.multi = 2;
  StableStateGraph g = explore(model, o);
  bool saw_pair = false;
  for (const auto& e : g.edges) {
    if (e.source < 0) continue;
    EXPECT_FALSE(e.changes.empty());
    EXPECT_LE(e.changes.size(), 2u);
    saw_pair = saw_pair || e.changes.size() == 2;
    for (const auto& [var, value] : e.changes) {
      for (const auto& in : g.nodes[e.source].inputs) {
        if (in.name == var) {
          EXPECT_NE(in.value, value);
        }
      }
    }
    if (e.target >= 0) {
      for (const auto& [var, value] : e.changes) {
        for (const auto& in : g.nodes[e.target].inputs) {
          if (in.name == var) {
            EXPECT_EQ(in.value, value);
          }
        }
      }
    }
  }
  EXPECT_TRUE(saw_pair);
  EXPECT_EQ(format_changes(*model, {{"a", 1}, {"b", 0}}), "a=true, b=false");
}

TEST(Explorer, PoliciesDifferAtTheForcingDivergence) {
  auto model = compile_fixture("m_fo");
  auto pre = node_situations(explore(model, with_depth(3)));
  auto two = node_situations(explore(model, with_depth(3, ForcingEvaluation::two_phase)));
  EXPECT_NE(pre, two);
  EXPECT_TRUE(pre.count("G1{12} G2{21}"));
  EXPECT_FALSE(pre.count("G1{12} G2{22}"));
  EXPECT_TRUE(two.count("G1{12} G2{22}"));
  EXPECT_FALSE(two.count("G1{12} G2{21}"));
}

TEST(Explorer, DivergentInitializationIsAnAnomaly) {
  auto model = compile_fixture("m_div");
  StableStateGraph g = explore(model, with_depth(2));
  EXPECT_EQ(g.root, -1);
  EXPECT_TRUE(g.nodes.empty());
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].error, RunErrorKind::unstable_cycle);
  auto anomalies = find_anomalies(*model, g);
  auto it = std::find_if(anomalies.begin(), anomalies.end(),
                         [](const Anomaly& a) { return a.kind == Anomaly::Kind::error_edge; });
  ASSERT_NE(it, anomalies.end());
  EXPECT_EQ(it->subject, "unstable_cycle");
  EXPECT_EQ(it->count, 1);
}

TEST(Explorer, ConflictFreeModelHasOnlyDeadTransitionsAtMost) {
  auto model = compile_fixture("m_toggle");
  for (const auto& a : find_anomalies(*model, explore(model, with_depth(3)))) {
    EXPECT_EQ(a.kind, Anomaly::Kind::dead_transition) << a.subject;
  }
}

TEST(Explorer, SimultaneousOwnersReportForcingConflict) {
  auto model = compile_fixture("m_conflict");
  StableStateGraph g = explore(model, with_depth(3));
  auto anomalies = find_anomalies(*model, g);
  auto it = std::find_if(anomalies.begin(), anomalies.end(),
                         [](const Anomaly& a) { return a.kind == Anomaly::Kind::error_edge; });
  ASSERT_NE(it, anomalies.end());
  EXPECT_EQ(it->subject, "forcing_conflict");
  EXPECT_GE(it->count, 1);
}

TEST(Explorer, UnreachableStepsAndDeadTransitions) {
  auto model = compile_fixture("m_ev");
  auto anomalies = find_anomalies(*model, explore(model, with_depth(4)));
  EXPECT_NE(std::find(anomalies.begin(), anomalies.end(),
                      Anomaly{Anomaly::Kind::unreachable_step, "32", 1, ""}),
            anomalies.end());
  bool probe_dead = std::any_of(anomalies.begin(), anomalies.end(), [](const Anomaly& a) {
    return a.kind == Anomaly::Kind::dead_transition && a.subject == "probe";
  });
  EXPECT_TRUE(probe_dead);
}

TEST(Explorer, ThreadCountDoesNotChangeTheGraph) {
  for (const char* name : {"m_conflict", "m_fo", "m_r5e", "m_shift"}) {
    auto model = compile_fixture(name);
    ExploreOptions one = with_depth(4);
    one.multi = 2;
    ExploreOptions many = one;
    many.threads = 4;
    StableStateGraph a = explore(model, one);
    StableStateGraph b = explore(model, many);
    EXPECT_EQ(a.nodes.size(), b.nodes.size()) << name;
    EXPECT_EQ(a.edges.size(), b.edges.size()) << name;
    EXPECT_EQ(to_dot(*model, a), to_dot(*model, b)) << name;
  }
}

TEST(Explorer, DeeperExplorationIsASuperset) {
  for (const auto& name : testing::runnable_fixtures()) {
    auto model = compile_fixture(name);
    auto shallow = node_situations(explore(model, with_depth(2)));
    auto deep = node_situations(explore(model, with_depth(3)));
    EXPECT_TRUE(std::includes(deep.begin(), deep.end(), shallow.begin(), shallow.end())) << name;
  }
}

TEST(Explorer, EdgesReplayOnAFreshInterpreter) {
  for (const char* name : {"m_r5e", "m_conflict", "m_enc"}) {
    auto model = compile_fixture(name);
    StableStateGraph g = explore(model, with_depth(3));
    for (const auto& e : g.edges) {
      if (e.source < 0) continue;
      Interpreter it(model, with_depth(3).policy);
      it.restore(g.nodes[e.source].state);
      RunResult r = it.apply_input_event(e.changes);
      if (e.target < 0) {
        ASSERT_TRUE(is_error(r)) << name;
        EXPECT_EQ(std::get<RunError>(r).kind, *e.error);
      } else {
        ASSERT_FALSE(is_error(r)) << name;
        EXPECT_EQ(it.situation(), g.nodes[e.target].situation) << name;
      }
    }
  }
}

TEST(Explorer, SummaryAndDot) {
  auto model = compile_fixture("m_toggle");
  StableStateGraph g = explore(model, with_depth(3));
  auto summary = nlohmann::json::parse(summary_json(g, find_anomalies(*model, g)));
  EXPECT_EQ(summary["nodes"], 2);
  EXPECT_EQ(summary["edges"], 3);
  EXPECT_EQ(summary["errors"], 0);
  std::string dot = to_dot(*model, g);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("G1{2}"), std::string::npos);
  EXPECT_NE(dot.find("a=true"), std::string::npos);
}

}  // namespace
}  // namespace grafcet

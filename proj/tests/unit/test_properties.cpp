#include <gtest/gtest.h>

#include <algorithm>
#include <optional>

#include "fixtures.hpp"
#include "generator.hpp"
#include "grafcet/analyzer.hpp"
#include "grafcet/dsl.hpp"
#include "grafcet/oracle.hpp"
#include "grafcet/trace.hpp"

namespace grafcet {
namespace {

constexpr std::uint32_t seeds = 150;

std::optional<GrafcetModel> random_model(std::uint32_t seed, const testing::GeneratorOptions& options = {}) {
  ParseResult parsed = parse_model(testing::random_model_source(seed, options));
  if (!parsed.ok()) return std::nullopt;
  AnalysisResult analysis = analyze(*parsed.model);
  if (!analysis.ok()) return std::nullopt;
  return analysis.model;
}

TEST(Generator, SameSeedSameText) {
  EXPECT_EQ(testing::random_model_source(7), testing::random_model_source(7));
  EXPECT_NE(testing::random_model_source(7), testing::random_model_source(8));
}

TEST(Generator, MostModelsAreWellFormed) {
  int ok = 0;
  for (std::uint32_t s = 0; s < seeds; ++s) ok += random_model(s) ? 1 : 0;
  EXPECT_GE(ok, static_cast<int>(seeds) * 3 / 4);
}

TEST(Property, PrintParseRoundTrip) {
  for (std::uint32_t s = 0; s < seeds; ++s) {
    ParseResult parsed = parse_model(testing::random_model_source(s));
    if (!parsed.ok()) continue;
    std::string printed = print_model(*parsed.model);
    ParseResult again = parse_model(printed);
    ASSERT_TRUE(again.ok()) << "seed " << s << "\n" << printed;
    EXPECT_EQ(*again.model, *parsed.model) << "seed " << s;
    EXPECT_EQ(print_model(*again.model), printed) << "seed " << s;
  }
}

TEST(Property, DepthIncreasesAlongHierarchyEdges) {
  for (std::uint32_t s = 0; s < seeds; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    HierarchyGraph h = compute_hierarchy(*m);
    for (const auto& e : h.edges) {
      EXPECT_LT(h.depth.at(e.superior), h.depth.at(e.inferior)) << "seed " << s;
    }
    EXPECT_EQ(h.depth.size(), m->partials.size());
  }
}

TEST(Property, AnalysisIsIdempotent) {
  for (std::uint32_t s = 0; s < 40; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    EXPECT_EQ(expand_macros(*m), *m) << "seed " << s;
  }
}

Policy small(ForcingEvaluation f) { return Policy{f, 40}; }

TEST(Property, EngineAgreesWithOracleOnRandomModels) {
  int compared = 0;
  for (std::uint32_t s = 0; s < seeds; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    auto compiled = compile(*m);
    auto sequences = testing::toggle_sequences(*m, 3);
    for (auto f : {ForcingEvaluation::preemptive, ForcingEvaluation::two_phase}) {
      for (const auto& seq : sequences) {
        ASSERT_EQ(engine_run(compiled, seq, small(f)), oracle_run(*m, seq, small(f)))
            << "seed " << s << " policy " << to_string(f) << "\n"
            << testing::random_model_source(s);
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(Property, TransitionOrderDoesNotMatter) {
  for (std::uint32_t s = 0; s < seeds; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    GrafcetModel reversed = *m;
    for (auto& pg : reversed.partials) std::reverse(pg.transitions.begin(), pg.transitions.end());
    auto a = compile(*m);
    auto b = compile(reversed);
    for (const auto& seq : testing::toggle_sequences(*m, 2)) {
      EXPECT_EQ(engine_run(a, seq, small(ForcingEvaluation::preemptive)),
                engine_run(b, seq, small(ForcingEvaluation::preemptive)))
          << "seed " << s;
    }
  }
}

std::vector<RunResult> drive(const std::shared_ptr<const CompiledModel>& model, const std::vector<InputChanges>& seq,
                             Policy policy) {
  Interpreter it(model, policy);
  std::vector<RunResult> runs;
  runs.push_back(it.initialize());
  for (const auto& ev : seq) {
    if (is_error(runs.back())) break;
    runs.push_back(it.apply_input_event(ev));
  }
  return runs;
}

TEST(Property, RunsAreDeterministic) {
  for (std::uint32_t s = 0; s < 60; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    auto compiled = compile(*m);
    for (const auto& seq : testing::toggle_sequences(*m, 2)) {
      EXPECT_EQ(to_jsonl(drive(compiled, seq, small(ForcingEvaluation::two_phase))),
                to_jsonl(drive(compiled, seq, small(ForcingEvaluation::two_phase))))
          << "seed " << s;
    }
  }
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

TEST(Property, RecordInvariants) {
  for (std::uint32_t s = 0; s < seeds; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    auto compiled = compile(*m);
    for (const auto& seq : testing::toggle_sequences(*m, 2)) {
      for (auto f : {ForcingEvaluation::preemptive, ForcingEvaluation::two_phase}) {
        for (const auto& run : drive(compiled, seq, small(f))) {
          const auto& recs = evolutions_of(run);
          ASSERT_FALSE(recs.empty()) << "seed " << s;
          if (!is_error(run)) {
            EXPECT_TRUE(recs.back().stable) << "seed " << s;
          }
          for (std::size_t i = 0; i + 1 < recs.size(); ++i) EXPECT_FALSE(recs[i].stable) << "seed " << s;
          for (const auto& rec : recs) {
            for (const auto& x : rec.activated) {
              EXPECT_FALSE(contains(rec.deactivated, x)) << "seed " << s;
              EXPECT_FALSE(contains(rec.rule_five, x)) << "seed " << s;
            }
            for (const auto& x : rec.deactivated) EXPECT_FALSE(contains(rec.rule_five, x)) << "seed " << s;
          }
        }
      }
    }
  }
}

TEST(Property, PreemptivelyForcedPartialsDoNotClear) {
  for (std::uint32_t s = 0; s < seeds; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    auto compiled = compile(*m);
    for (const auto& seq : testing::toggle_sequences(*m, 2)) {
      for (const auto& run : drive(compiled, seq, small(ForcingEvaluation::preemptive))) {
        for (const auto& rec : evolutions_of(run)) {
          for (const auto& f : rec.forcings) {
            const CompiledPartial& pg = compiled->partials[compiled->find_partial(f.target)];
            for (int t : pg.transitions) {
              EXPECT_FALSE(contains(rec.cleared, compiled->transitions[t].id)) << "seed " << s;
            }
          }
        }
      }
    }
  }
}

TEST(Property, ExplorerIndependentOfThreads) {
  for (std::uint32_t s = 0; s < 40; ++s) {
    auto m = random_model(s);
    if (!m) continue;
    auto compiled = compile(*m);
    ExploreOptions one;
    one.depth = 3;
    one.multi = 2;
    one.policy = small(ForcingEvaluation::preemptive);
    ExploreOptions many = one;
    many.threads = 3;
    EXPECT_EQ(to_dot(*compiled, explore(compiled, one)), to_dot(*compiled, explore(compiled, many)))
        << "seed " << s;
  }
}

}  // namespace
}  // namespace grafcet

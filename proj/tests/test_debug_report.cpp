#include <gtest/gtest.h>

#include <random>

#include "iroplan/service.hpp"
#include "support.hpp"

namespace iroplan {
namespace {

struct Case {
  KnowledgeBase kb;
  PlanningProblem problem;

  DebugReport run() const {
    SearchOptions o;
    o.strategy = Strategy::astar_uniform;
    return generate_debug_report(kb, problem, plan(kb, problem, o));
  }
};

Case swap(const char* goal) {
  Case c;
  c.kb.actions["move"] = fixtures::stock_move();
  c.problem = problem_from_world(fixtures::load_bundled_scene("task3.json"), "p", parse_atoms(goal));
  return c;
}

void expect_only(const DebugReport& r, HintCategory category, std::string_view message) {
  ASSERT_EQ(r.hints.size(), 1u) << Json(r).dump();
  EXPECT_EQ(r.hints[0].category, category);
  EXPECT_EQ(r.hints[0].message, message);
  EXPECT_FALSE(r.hints[0].subjects.empty());
}

TEST(DebugReport, SolvedGivesEmptyReport) {
  EXPECT_TRUE(swap("on(base1,P2) on(base2,P1)").run().empty());
}

TEST(DebugReport, EffectsWhenNoActionAddsGoal) {
  const DebugReport r = swap("thin(base1)").run();
  expect_only(r, HintCategory::effects, "make sure the action effects can achieve the goal states");
  EXPECT_EQ(r.hints[0].subjects, std::vector<std::string>{"thin(base1)"});
}

// Task 4: a BASE-only move cannot put a CUBE anywhere.
TEST(DebugReport, ParametersForBaseOnlyMove) {
  Case c;
  ActionModel m = fixtures::stock_move();
  m.params[0].type = "base";
  m.params[1].type = "position";
  m.params[2].type = "position";
  c.kb.actions["move"] = m;
  c.problem = problem_from_world(fixtures::load_bundled_scene("task4.json"), "task4",
                                 parse_atoms("on(cube1,base1)"));
  const DebugReport r = c.run();
  expect_only(r, HintCategory::parameters, hints::kParameters);
  EXPECT_NE(std::find(r.hints[0].subjects.begin(), r.hints[0].subjects.end(), "on(cube1,base1)"),
            r.hints[0].subjects.end());
}

TEST(DebugReport, ParametersForActionWithoutInstances) {
  Case c = swap("on(base1,base2)");
  ActionModel m = fixtures::stock_move();
  m.params[0].type = "roof";
  c.kb.actions["move"] = m;
  const DebugReport r = c.run();
  expect_only(r, HintCategory::parameters, hints::kParameters);
  EXPECT_EQ(r.hints[0].subjects.front(), "move");
}

TEST(DebugReport, GoalContradiction) {
  Case c;
  c.kb.actions["move"] = fixtures::stock_move();
  c.problem = problem_from_world(fixtures::load_bundled_scene("table1.json"), "p",
                                 parse_atoms("on(c,A) clear(A)"));
  const DebugReport r = c.run();
  expect_only(r, HintCategory::goal, hints::kGoal);
  EXPECT_EQ(r.hints[0].subjects, std::vector<std::string>{"on(c,A) / clear(A)"});
}

TEST(DebugReport, InitialStateMissingObject) {
  Case c = swap("on(ghost,P3)");
  c.problem.objects.push_back({"ghost", "cube"});
  const DebugReport r = c.run();
  expect_only(r, HintCategory::initial_state,
              "an object is not mentioned in the initial states at all");
  EXPECT_EQ(r.hints[0].subjects, std::vector<std::string>{"ghost"});
}

TEST(DebugReport, PreconditionsNeverSatisfiable) {
  Case c = swap("on(base1,P3)");
  ActionModel m = fixtures::stock_move();
  m.pre.insert(parse_atom("thin(?o)"));
  c.kb.actions["move"] = m;
  const DebugReport r = c.run();
  expect_only(r, HintCategory::preconditions, hints::kPreconditions);
  EXPECT_EQ(r.hints[0].subjects.front(), "move");
}

TEST(DebugReport, CategoriesAreFromTheTaxonomy) {
  for (auto c : {HintCategory::parameters, HintCategory::preconditions, HintCategory::effects,
                 HintCategory::initial_state, HintCategory::goal})
    EXPECT_FALSE(to_string(c).empty());
  const Json j = swap("thin(base1)").run();
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.at("hints")[0].at("category"), "effects");
}

// Every failed attempt with a non-empty goal carries at least one hint.
TEST(DebugReportProperty, FailuresAlwaysExplained) {
  std::mt19937 rng(77);
  int failures = 0;
  for (int i = 0; i < 300; ++i) {
    const auto rp = fixtures::random_problem(rng);
    const PlanOutcome out = plan(rp.kb, rp.problem);
    const DebugReport r = generate_debug_report(rp.kb, rp.problem, out);
    if (out.solved()) {
      EXPECT_TRUE(r.empty());
    } else {
      ++failures;
      EXPECT_FALSE(r.empty()) << i;
      for (std::size_t k = 1; k < r.hints.size(); ++k)
        EXPECT_NE(r.hints[k].category, r.hints[k - 1].category);
    }
  }
  EXPECT_GT(failures, 10);
}

}  // namespace
}  // namespace iroplan

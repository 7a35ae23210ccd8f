#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "iroplan/planner.hpp"
#include "iroplan/scenario.hpp"
#include "support.hpp"

namespace iroplan {
namespace {

struct Fixture {
  KnowledgeBase kb;
  PlanningProblem problem;
};

Fixture swap_bases() {
  Fixture f;
  f.kb.actions["move"] = fixtures::stock_move();
  World w = fixtures::load_bundled_scene("task3.json");
  f.problem = problem_from_world(w, "swap", parse_atoms("on(base1,P2) on(base2,P1)"));
  return f;
}

Fixture hanoi(int n) {
  Fixture f;
  f.kb.actions["move"] = hanoi_move();
  f.problem = problem_from_world(load_scene(hanoi_scene(n)), "hanoi", hanoi_goal(n));
  return f;
}

SearchOptions with(Strategy s) {
  SearchOptions o;
  o.strategy = s;
  return o;
}

TEST(Ground, RespectsTypesAndInjectivity) {
  KnowledgeBase kb;
  ActionModel m = fixtures::stock_move();
  m.params[0].type = "cube";
  kb.actions["move"] = m;
  const std::vector<TypedObject> objects{
      {"A", "position"}, {"B", "position"}, {"c", "cube"}, {"r", "roof"}};
  const auto g = ground(kb, objects);
  // ?o = c; ?from, ?to distinct elements other than c: 3 * 2.
  EXPECT_EQ(g.size(), 6u);
  for (const auto& a : g) {
    EXPECT_EQ(a.args[0], "c");
    EXPECT_NE(a.args[1], a.args[2]);
    EXPECT_NE(a.args[1], "c");
  }
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_EQ(g[0].label(), "move(c,A,B)");
}

TEST(Ground, ObjectSatisfiesSupertypeParameter) {
  KnowledgeBase kb;
  kb.actions["move"] = fixtures::stock_move();
  const auto g = ground(
      kb, std::vector<TypedObject>{{"A", "position"}, {"B", "position"}, {"c", "cube"}});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].label(), "move(c,A,B)");
  EXPECT_EQ(g[1].label(), "move(c,B,A)");
}

TEST(Instantiate, Errors) {
  const Fixture f = swap_bases();
  EXPECT_THROW(instantiate(f.kb, f.problem.objects, {"jump", {"base1"}}), Error);
  EXPECT_THROW(instantiate(f.kb, f.problem.objects, {"move", {"base1", "P1"}}), Error);
  EXPECT_THROW(instantiate(f.kb, f.problem.objects, {"move", {"ghost", "P1", "P2"}}), Error);
  EXPECT_THROW(instantiate(f.kb, f.problem.objects, {"move", {"P1", "P2", "P3"}}), Error);
  const GroundAction a = instantiate(f.kb, f.problem.objects, {"move", {"base1", "P1", "P3"}});
  EXPECT_EQ(a.pre, parse_atoms("on(base1,P1) clear(base1) clear(P3) stackable(base1,P3)"));
}

TEST(RelaxedPlan, ZeroIffGoalHolds) {
  const Fixture f = swap_bases();
  const auto actions = ground(f.kb, f.problem.objects);
  EXPECT_EQ(relaxed_plan_length(f.problem.init, f.problem.init, actions), 0u);
  EXPECT_GT(*relaxed_plan_length(f.problem.init, f.problem.goal, actions), 0u);
  EXPECT_EQ(relaxed_plan_length(f.problem.init, parse_atoms("flat(P1)"), actions), std::nullopt);
}

TEST(RelaxedPlan, ValidOnDeleteRelaxation) {
  std::mt19937 rng(4);
  for (int i = 0; i < 300; ++i) {
    auto rp = fixtures::random_problem(rng);
    const auto actions = ground(rp.kb, rp.problem.objects);
    auto rplan = relaxed_plan(rp.problem.init, rp.problem.goal, actions);
    if (!rplan) continue;
    WorldState s = rp.problem.init;
    for (std::size_t idx : *rplan) {
      ASSERT_TRUE(is_subset(actions[idx].pre, s));
      s = set_union(s, actions[idx].eff_add);
    }
    ASSERT_TRUE(is_subset(rp.problem.goal, s));
  }
}

TEST(Plan, SwapNeedsThreeMoves) {
  const Fixture f = swap_bases();
  for (Strategy s : {Strategy::greedy_ff, Strategy::astar_uniform, Strategy::bfs_oracle}) {
    const PlanOutcome out = plan(f.kb, f.problem, with(s));
    ASSERT_TRUE(out.solved()) << to_string(s);
    EXPECT_TRUE(validate_plan(f.kb, f.problem, *out.plan).valid);
    if (s != Strategy::greedy_ff) {
      EXPECT_EQ(out.plan->size(), 3u);
    }
  }
}

TEST(Plan, GoalAlreadyTrueGivesEmptyPlan) {
  Fixture f = swap_bases();
  f.problem.goal = parse_atoms("on(base1,P1)");
  const PlanOutcome out = plan(f.kb, f.problem);
  ASSERT_TRUE(out.solved());
  EXPECT_EQ(out.plan->size(), 0u);
}

TEST(Plan, InconsistentGoal) {
  Fixture f = swap_bases();
  f.problem.goal = parse_atoms("on(base1,P3) clear(P3)");
  const PlanOutcome out = plan(f.kb, f.problem);
  ASSERT_FALSE(out.solved());
  EXPECT_EQ(out.failure->reason, NoPlanReason::goal_inconsistent);
  EXPECT_EQ(out.failure->contradictions.size(), 1u);
}

TEST(Plan, Exhausted) {
  Fixture f = swap_bases();
  f.problem.goal = parse_atoms("on(base1,base2)");
  f.problem.init.erase(parse_atom("stackable(base1,base2)"));
  const PlanOutcome out = plan(f.kb, f.problem, with(Strategy::astar_uniform));
  ASSERT_FALSE(out.solved());
  EXPECT_EQ(out.failure->reason, NoPlanReason::exhausted);
}

TEST(Plan, NodeBudget) {
  Fixture f = hanoi(6);
  SearchOptions o = with(Strategy::bfs_oracle);
  o.node_budget = 10;
  const PlanOutcome out = plan(f.kb, f.problem, o);
  ASSERT_FALSE(out.solved());
  EXPECT_EQ(out.failure->reason, NoPlanReason::budget_exceeded);
  EXPECT_LE(out.failure->stats.expanded, 10u);
}

TEST(Plan, TimeBudget) {
  Fixture f = hanoi(10);
  SearchOptions o = with(Strategy::bfs_oracle);
  o.time_budget = std::chrono::milliseconds(1);
  const PlanOutcome out = plan(f.kb, f.problem, o);
  ASSERT_FALSE(out.solved());
  EXPECT_EQ(out.failure->reason, NoPlanReason::budget_exceeded);
}

TEST(Plan, Cancellation) {
  Fixture f = hanoi(10);
  std::stop_source stop;
  SearchOptions o = with(Strategy::bfs_oracle);
  o.time_budget = std::chrono::seconds(60);
  o.cancel = stop.get_token();
  stop.request_stop();
  const PlanOutcome out = plan(f.kb, f.problem, o);
  ASSERT_FALSE(out.solved());
  EXPECT_EQ(out.failure->reason, NoPlanReason::cancelled);
}

TEST(Plan, UnknownTypeInProblemThrows) {
  Fixture f = swap_bases();
  f.problem.objects.push_back({"x", "disk"});
  EXPECT_THROW(plan(f.kb, f.problem), Error);
}

TEST(Plan, DeterministicTieBreaking) {
  const Fixture f = swap_bases();
  for (Strategy s : {Strategy::greedy_ff, Strategy::astar_uniform, Strategy::bfs_oracle}) {
    const auto a = plan(f.kb, f.problem, with(s));
    const auto b = plan(f.kb, f.problem, with(s));
    EXPECT_EQ(to_steps(*a.plan), to_steps(*b.plan));
  }
  // Lexicographically first optimal plan.
  const auto out = plan(f.kb, f.problem, with(Strategy::astar_uniform));
  EXPECT_EQ(out.plan->steps[0].label(), "move(base1,P1,P3)");
}

TEST(Hanoi, ThreeDisksOptimal) {
  const Fixture f = hanoi(3);
  const PlanOutcome out = plan(f.kb, f.problem, with(Strategy::astar_uniform));
  ASSERT_TRUE(out.solved());
  EXPECT_EQ(out.plan->size(), 7u);
  EXPECT_TRUE(validate_plan(f.kb, f.problem, *out.plan).valid);
}

TEST(Hanoi, FourDisksBfsAgrees) {
  const Fixture f = hanoi(4);
  EXPECT_EQ(plan(f.kb, f.problem, with(Strategy::bfs_oracle)).plan->size(), 15u);
  EXPECT_EQ(plan(f.kb, f.problem, with(Strategy::astar_uniform)).plan->size(), 15u);
}

TEST(Validate, ReportsFirstBrokenStep) {
  const Fixture f = swap_bases();
  const std::vector<PlanStep> bad{{"move", {"base1", "P1", "P3"}}, {"move", {"base1", "P1", "P2"}}};
  const PlanValidation v = validate_plan(f.kb, f.problem, bad);
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.failed_step, 1u);
  EXPECT_TRUE(v.missing.contains(parse_atom("on(base1,P1)")));

  const std::vector<PlanStep> short_plan{{"move", {"base1", "P1", "P3"}}};
  const PlanValidation w = validate_plan(f.kb, f.problem, short_plan);
  EXPECT_FALSE(w.valid);
  EXPECT_FALSE(w.failed_step.has_value());
  EXPECT_FALSE(w.missing.empty());

  const std::vector<PlanStep> unknown{{"fly", {"base1"}}};
  EXPECT_FALSE(validate_plan(f.kb, f.problem, unknown).valid);
}

// Property: every returned plan validates, and A* matches BFS length.
TEST(SoundnessProperty, RandomSmallProblems) {
  std::mt19937 rng(12345);
  int solved = 0;
  for (int i = 0; i < 250; ++i) {
    const auto rp = fixtures::random_problem(rng);
    const auto bfs = plan(rp.kb, rp.problem, with(Strategy::bfs_oracle));
    for (Strategy s : {Strategy::greedy_ff, Strategy::astar_uniform}) {
      const auto out = plan(rp.kb, rp.problem, with(s));
      if (out.plan) {
        ASSERT_TRUE(validate_plan(rp.kb, rp.problem, *out.plan).valid) << i;
        ASSERT_TRUE(bfs.solved()) << i;
      }
      if (s == Strategy::astar_uniform) {
        ASSERT_EQ(out.solved(), bfs.solved()) << i;
        if (out.plan) {
          ASSERT_EQ(out.plan->size(), bfs.plan->size()) << i;
        }
      }
    }
    solved += bfs.solved();
  }
  EXPECT_GT(solved, 50);
}

}  // namespace
}  // namespace iroplan

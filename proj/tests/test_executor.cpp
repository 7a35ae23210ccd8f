#include <gtest/gtest.h>

#include <random>

#include "iroplan/executor.hpp"
#include "iroplan/scenario.hpp"
#include "support.hpp"

namespace iroplan {
namespace {

struct PlanFixture {
  KnowledgeBase kb;
  World world;
  PlanningProblem problem;
  Plan plan;
};

PlanFixture swap_bases() {
  PlanFixture s;
  s.kb.actions["move"] = fixtures::stock_move();
  s.world = fixtures::load_bundled_scene("task3.json");
  s.problem = problem_from_world(s.world, "swap", parse_atoms("on(base1,P2) on(base2,P1)"));
  SearchOptions o;
  o.strategy = Strategy::astar_uniform;
  s.plan = *iroplan::plan(s.kb, s.problem, o).plan;
  return s;
}

TEST(Execute, SwapReachesGoalInWorldAndBelief) {
  const PlanFixture s = swap_bases();
  const MentalModel mm = make_mental_model(detect_landmarks(s.world));
  const ExecutionResult r = execute_plan(s.kb, s.world, s.plan, mm);
  ASSERT_TRUE(r.trace.succeeded()) << r.trace.failure->message;
  EXPECT_EQ(r.trace.steps.size(), 3u);
  const WorldState after = perceive_state(r.world, detect_landmarks(r.world));
  EXPECT_TRUE(is_subset(s.problem.goal, after));
  EXPECT_TRUE(same_placement(r.belief, detect_landmarks(r.world)));
}

TEST(Execute, KeyframesAreRelativeToBelievedPoses) {
  const PlanFixture s = swap_bases();
  const MentalModel mm = make_mental_model(detect_landmarks(s.world));
  const GroundAction& first = s.plan.steps[0];
  const auto kfs = bind_keyframes(s.kb.action("move"), first, mm);
  ASSERT_EQ(kfs.size(), 4u);
  const Landmark& obj = mm.find(first.args[0])->landmark;
  const Landmark& dest = mm.find(first.args[2])->landmark;
  EXPECT_TRUE(approx_equal(kfs[0].pose.position, obj.pose + Vec3{0, 0, 0.10}));
  EXPECT_TRUE(approx_equal(kfs[2].pose.position, dest.pose + Vec3{0, 0, 0.10}));
  EXPECT_EQ(kfs[0].landmark, first.args[0]);
  EXPECT_EQ(kfs[1].gripper, Gripper::closed);
}

TEST(Execute, RobotFrameKeyframeKeepsOffset) {
  KnowledgeBase kb;
  ActionModel m = fixtures::stock_move();
  m.keyframes.push_back({Gripper::open, std::nullopt, {{0.3, 0.1, 0.4}, {0, 1, 0}}});
  kb.actions["move"] = m;
  World w = fixtures::load_bundled_scene("task3.json");
  const GroundAction ga = instantiate(kb, problem_from_world(w, "p", {}).objects,
                                      {"move", {"base1", "P1", "P3"}});
  const auto kfs = bind_keyframes(m, ga, make_mental_model(detect_landmarks(w)));
  EXPECT_EQ(kfs.back().landmark, std::nullopt);
  EXPECT_EQ(kfs.back().pose.position, (Vec3{0.3, 0.1, 0.4}));
}

TEST(Execute, KeyframeOnUnknownLandmark) {
  const PlanFixture s = swap_bases();
  MentalModel mm = make_mental_model(detect_landmarks(s.world));
  mm.beliefs.erase("P3");
  try {
    bind_keyframes(s.kb.action("move"), s.plan.steps[0], mm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownLandmark);
  }
}

// Prefix property: a failure at step i leaves a trace of exactly i steps and
// the world after step i-1.
TEST(Execute, FailureTraceIsPrefix) {
  PlanFixture s = swap_bases();
  World blocked = s.world;
  // Occupy the parking position chosen by the plan after planning.
  const std::string parking = s.plan.steps[0].args[2];
  SceneSpec spec = load_scene_file(fixtures::scene_path("task3.json"));
  spec.objects.push_back({"cube9", {0.05, 0.05, 0.05}, std::nullopt, parking});
  blocked = load_scene(spec);
  const ExecutionResult r =
      execute_plan(s.kb, blocked, s.plan, make_mental_model(detect_landmarks(blocked)));
  ASSERT_FALSE(r.trace.succeeded());
  EXPECT_EQ(r.trace.failure->step, 0u);
  EXPECT_EQ(r.trace.failure->cause, ErrorCode::PhysicallyBlocked);
  EXPECT_EQ(r.trace.steps.size(), 0u);
  EXPECT_EQ(r.world, blocked);
}

TEST(ExecuteProperty, PrefixOnRandomTruncations) {
  PlanFixture s = swap_bases();
  const MentalModel mm = make_mental_model(detect_landmarks(s.world));
  // Drop each step in turn: execution stops where the plan breaks.
  for (std::size_t skip = 0; skip < s.plan.size(); ++skip) {
    Plan broken = s.plan;
    broken.steps.erase(broken.steps.begin() + static_cast<long>(skip));
    const ExecutionResult r = execute_plan(s.kb, s.world, broken, mm);
    if (r.trace.failure) {
      EXPECT_EQ(r.trace.steps.size(), r.trace.failure->step);
      for (std::size_t i = 0; i < r.trace.steps.size(); ++i)
        EXPECT_EQ(r.trace.steps[i].action, broken.steps[i]);
    } else {
      EXPECT_EQ(r.trace.steps.size(), broken.size());
    }
  }
}

TEST(Execute, UnknownActionFailsFirstStep) {
  PlanFixture s = swap_bases();
  s.plan.steps[1].schema = "teleport";
  const ExecutionResult r =
      execute_plan(s.kb, s.world, s.plan, make_mental_model(detect_landmarks(s.world)));
  ASSERT_FALSE(r.trace.succeeded());
  EXPECT_EQ(r.trace.failure->step, 1u);
  EXPECT_EQ(r.trace.failure->cause, ErrorCode::UnknownAction);
  EXPECT_EQ(r.trace.steps.size(), 1u);
}

TEST(Execute, StepCallbackSeesEveryStep) {
  const PlanFixture s = swap_bases();
  std::vector<std::size_t> seen;
  execute_plan(s.kb, s.world, s.plan, make_mental_model(detect_landmarks(s.world)),
               [&](std::size_t i, const StepTrace&) { seen.push_back(i); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(MentalModel, PlaceholdersForUndetectedLandmarks) {
  World w = fixtures::load_bundled_scene("occlusion.json");
  MentalModel mm = make_mental_model(detect_landmarks(w));
  EXPECT_EQ(mm.find("base1"), nullptr);
  GroundAction ga{"move", {"cube1", "base1", "P2"}, {}, parse_atoms("on(cube1,P2) clear(base1)"),
                  parse_atoms("on(cube1,base1) clear(P2)")};
  const auto flags = update_mental_model(mm, ga);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_NE(flags[0].find("base1"), std::string::npos);
  ASSERT_NE(mm.find("base1"), nullptr);
  EXPECT_TRUE(mm.find("base1")->placeholder);
  EXPECT_EQ(mm.find("cube1")->landmark.support, "P2");
}

TEST(MentalModel, BelievedWorldHidesUndetected) {
  World w = fixtures::load_bundled_scene("occlusion.json");
  const MentalModel mm = make_mental_model(detect_landmarks(w));
  const World b = believed_world(w, mm);
  EXPECT_EQ(b.find("base1"), nullptr);
  EXPECT_EQ(b.at("cube1").support, std::nullopt);
  EXPECT_NE(b.find("roof1"), nullptr);
}

// With occlusion, plans touching only visible objects still run.
TEST(MentalModel, OcclusionWorkaround) {
  KnowledgeBase kb;
  kb.actions["move"] = fixtures::stock_move();
  World w = fixtures::load_bundled_scene("occlusion.json");
  const MentalModel mm = make_mental_model(detect_landmarks(w));
  const PlanningProblem p =
      problem_from_belief(w, mm, "occl", parse_atoms("on(roof1,cube1)"));
  EXPECT_EQ(p.find_object("base1"), nullptr);
  const PlanOutcome out = plan(kb, p);
  ASSERT_TRUE(out.solved());
  const ExecutionResult r = execute_plan(kb, w, *out.plan, mm);
  ASSERT_TRUE(r.trace.succeeded()) << r.trace.failure->message;
  const WorldState truth = perceive_state(r.world, [&] {
    LandmarkSet all;
    for (const auto& [_, l] : r.world.landmarks()) all.push_back(l);
    return all;
  }());
  EXPECT_TRUE(truth.contains(parse_atom("on(roof1,cube1)")));
  EXPECT_TRUE(truth.contains(parse_atom("on(cube1,base1)")));
}

// Coherence: on random executable plans, the believed placement after every
// step matches what detection reports in an unoccluded world.
TEST(ExecuteProperty, BeliefTracksWorldWithoutOcclusion) {
  std::mt19937 rng(21);
  KnowledgeBase kb;
  kb.actions["move"] = fixtures::stock_move();
  for (const char* scene : {"task8.json", "task5.json", "hanoi3.json"}) {
    World w = fixtures::load_bundled_scene(scene);
    MentalModel mm = make_mental_model(detect_landmarks(w));
    for (int step = 0; step < 20; ++step) {
      PlanningProblem p = problem_from_world(w, "r", {});
      std::vector<GroundAction> applicable;
      for (auto& g : ground(kb, p.objects))
        if (is_subset(g.pre, p.init)) applicable.push_back(g);
      if (applicable.empty()) break;
      Plan one;
      one.steps.push_back(
          applicable[std::uniform_int_distribution<std::size_t>(0, applicable.size() - 1)(rng)]);
      const ExecutionResult r = execute_plan(kb, w, one, mm);
      ASSERT_TRUE(r.trace.succeeded()) << r.trace.failure->message;
      ASSERT_TRUE(same_placement(r.belief, detect_landmarks(r.world), 1e-9));
      w = r.world;
      mm = r.belief;
    }
  }
}

}  // namespace
}  // namespace iroplan

#include <gtest/gtest.h>

#include <random>

#include "iroplan/json_io.hpp"
#include "iroplan/knowledge.hpp"
#include "support.hpp"

namespace iroplan {
namespace {

AtomSet atoms(const char* text) { return parse_atoms(text); }

TEST(Atom, ParsesBothNotations) {
  EXPECT_EQ(parse_atom("on(c,A)"), (Atom{"on", {"c", "A"}}));
  EXPECT_EQ(parse_atom("(on c A)"), (Atom{"on", {"c", "A"}}));
  EXPECT_EQ(parse_atom(" clear( B ) "), (Atom{"clear", {"B"}}));
  EXPECT_EQ(to_string(parse_atom("on(?o,?A)")), "on(?o,?A)");
  EXPECT_THROW(parse_atom("on(c,A"), Error);
  EXPECT_THROW(parse_atom(""), Error);
}

TEST(Atom, RelationalFactsSortFirst) {
  const AtomSet s = atoms("clear(B) on(c,A) flat(c)");
  EXPECT_EQ(s.begin()->predicate, "on");
}

TEST(TypeHierarchy, StandardTree) {
  const TypeHierarchy h = TypeHierarchy::standard();
  EXPECT_TRUE(h.is_subtype("cube", "object"));
  EXPECT_TRUE(h.is_subtype("cube", "element"));
  EXPECT_TRUE(h.is_subtype("position", "element"));
  EXPECT_FALSE(h.is_subtype("position", "object"));
  EXPECT_FALSE(h.is_subtype("object", "cube"));
  EXPECT_TRUE(h.is_subtype("roof", "roof"));
  EXPECT_EQ(h.parent("base"), "object");
  EXPECT_EQ(h.parent("element"), std::nullopt);
}

TEST(TypeHierarchy, RejectsUnknownParentAndClash) {
  TypeHierarchy h = TypeHierarchy::standard();
  try {
    h.add("disk", "plate");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownType);
  }
  try {
    h.add("cube", "position");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NameClash);
  }
  h.add("disk", "object");
  EXPECT_TRUE(h.is_subtype("disk", "element"));
}

TEST(Classify, StandardRules) {
  const auto rules = standard_type_rules();
  EXPECT_EQ(classify_object({0.12, 0.12, 0.03}, rules).type, "base");
  EXPECT_EQ(classify_object({0.05, 0.05, 0.05}, rules).type, "cube");
  EXPECT_EQ(classify_object({0.02, 0.08, 0.09}, rules).type, "roof");
  const Classification odd = classify_object({1, 1, 1}, rules);
  EXPECT_EQ(odd.type, "object");
  EXPECT_TRUE(odd.unary.empty());
}

// Reference example: cube c from A to B on table1.
TEST(Inference, CubeFromAToB) {
  World w = fixtures::load_bundled_scene("table1.json");
  Demonstration d = record_demonstration(w, fixtures::cube_a_to_b());
  const InferredConditions inf = infer_conditions(d.before, d.after);
  EXPECT_EQ(inf.pre, atoms("on(c,A) clear(B)"));
  EXPECT_EQ(inf.eff_add, atoms("on(c,B) clear(A)"));
  EXPECT_EQ(inf.eff_del, atoms("on(c,A) clear(B)"));
}

TEST(Inference, IdenticalStatesGiveEmptyConditions) {
  const WorldState s = atoms("on(c,A) clear(c) clear(B)");
  const InferredConditions inf = infer_conditions(s, s);
  EXPECT_TRUE(inf.pre.empty());
  EXPECT_TRUE(inf.eff_add.empty());
  EXPECT_TRUE(inf.eff_del.empty());
}

// Property: pre = eff_del, and (O1 \ eff_del) U eff_add = O2.
TEST(InferenceProperty, Algebra) {
  std::mt19937 rng(1);
  const std::vector<std::string> constants{"a", "b", "c", "d", "e"};
  for (int i = 0; i < 2000; ++i) {
    const WorldState o1 = fixtures::random_state(rng, constants);
    const WorldState o2 = fixtures::random_state(rng, constants);
    const InferredConditions inf = infer_conditions(o1, o2);
    ASSERT_EQ(inf.pre, inf.eff_del);
    ASSERT_EQ(set_union(set_difference(o1, inf.eff_del), inf.eff_add), o2);
    ASSERT_TRUE(set_intersection(inf.eff_add, inf.eff_del).empty());
  }
}

// Property: lifting with an injective binding and grounding back with the
// inverse substitution is the identity.
TEST(InferenceProperty, LiftGroundRoundTrip) {
  std::mt19937 rng(2);
  const std::vector<std::string> constants{"a", "b", "c", "d"};
  const TypeHierarchy h = TypeHierarchy::standard();
  for (int i = 0; i < 2000; ++i) {
    const InferredConditions inf = infer_conditions(fixtures::random_state(rng, constants),
                                                    fixtures::random_state(rng, constants));
    Bindings b;
    std::map<std::string, std::string> inverse;
    for (const auto& c : constants) {
      b[c] = TypedVariable{"?" + c, "element"};
      inverse["?" + c] = c;
    }
    const ActionModel m = lift_action("x", inf, {}, b, h);
    ASSERT_EQ(ground_atoms(m.pre, inverse), inf.pre);
    ASSERT_EQ(ground_atoms(m.eff_add, inverse), inf.eff_add);
    ASSERT_EQ(ground_atoms(m.eff_del, inverse), inf.eff_del);
    for (const auto& p : m.params) ASSERT_TRUE(inverse.contains(p.name));
  }
}

ActionModel lifted_fig2() {
  World w = fixtures::load_bundled_scene("table1.json");
  Demonstration d = record_demonstration(w, fixtures::cube_a_to_b());
  Bindings b{{"c", {"?o", "cube"}}, {"A", {"?A", "position"}}, {"B", {"?B", "position"}}};
  return lift_action("move", infer_conditions(d.before, d.after), d.keyframes, b,
                     TypeHierarchy::standard());
}

TEST(Lift, ParametersInFirstOccurrenceOrder) {
  const ActionModel m = lifted_fig2();
  ASSERT_EQ(m.params.size(), 3u);
  EXPECT_EQ(m.params[0], (TypedVariable{"?o", "cube"}));
  EXPECT_EQ(m.params[1], (TypedVariable{"?A", "position"}));
  EXPECT_EQ(m.params[2], (TypedVariable{"?B", "position"}));
  EXPECT_EQ(m.pre, atoms("on(?o,?A) clear(?B)"));
  EXPECT_EQ(m.keyframes[0].relative_to, "?o");
  EXPECT_EQ(m.keyframes[3].relative_to, "?B");
}

TEST(Lift, UnboundConstantThrows) {
  World w = fixtures::load_bundled_scene("table1.json");
  Demonstration d = record_demonstration(w, fixtures::cube_a_to_b());
  Bindings b{{"c", {"?o", "cube"}}, {"A", {"?A", "position"}}};
  try {
    lift_action("move", infer_conditions(d.before, d.after), d.keyframes, b,
                TypeHierarchy::standard());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundConstant);
  }
}

TEST(Lift, UnknownTypeThrows) {
  Bindings b{{"c", {"?o", "disk"}}};
  EXPECT_THROW(lift_action("m", {}, {}, b, TypeHierarchy::standard()), Error);
}

TEST(Edit, AddPreconditionClearO) {
  const TypeHierarchy h = TypeHierarchy::standard();
  ActionModel m = edit_action(lifted_fig2(), edit::AddPrecondition{parse_atom("clear(?o)"), {}}, h);
  EXPECT_TRUE(m.pre.contains(parse_atom("clear(?o)")));
  EXPECT_FALSE(has_errors(validate_action_model(m, h)));
}

TEST(Edit, NewVariableNeedsDeclaration) {
  const TypeHierarchy h = TypeHierarchy::standard();
  try {
    edit_action(lifted_fig2(), edit::AddPrecondition{parse_atom("clear(?z)"), {}}, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownVariable);
  }
  ActionModel m = edit_action(lifted_fig2(),
                              edit::AddPrecondition{parse_atom("clear(?z)"), {{"?z", "element"}}}, h);
  EXPECT_EQ(m.params.back(), (TypedVariable{"?z", "element"}));
}

TEST(Edit, RemoveMissingConditionFails) {
  const TypeHierarchy h = TypeHierarchy::standard();
  try {
    edit_action(lifted_fig2(), edit::RemovePrecondition{parse_atom("flat(?o)")}, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownCondition);
  }
}

TEST(Edit, OppositePolarityIsContradiction) {
  const TypeHierarchy h = TypeHierarchy::standard();
  try {
    edit_action(lifted_fig2(), edit::AddEffect{parse_atom("on(?o,?B)"), Polarity::del, {}}, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EffectContradiction);
  }
}

TEST(Edit, RemovingLastUseDropsParameter) {
  const TypeHierarchy h = TypeHierarchy::standard();
  ActionModel m = lifted_fig2();
  m = edit_action(m, edit::RemoveEffect{parse_atom("clear(?A)"), Polarity::add}, h);
  m = edit_action(m, edit::RemovePrecondition{parse_atom("on(?o,?A)")}, h);
  m = edit_action(m, edit::RemoveEffect{parse_atom("on(?o,?A)"), Polarity::del}, h);
  EXPECT_EQ(m.params.size(), 2u);
  EXPECT_EQ(m.find_param("?A"), nullptr);
}

TEST(Edit, RetypeAndRename) {
  const TypeHierarchy h = TypeHierarchy::standard();
  ActionModel m = edit_action(lifted_fig2(), edit::RetypeParam{"?B", "element"}, h);
  EXPECT_EQ(m.find_param("?B")->type, "element");
  EXPECT_THROW(edit_action(m, edit::RetypeParam{"?B", "plate"}, h), Error);
  EXPECT_THROW(edit_action(m, edit::RetypeParam{"?Q", "element"}, h), Error);
  EXPECT_EQ(edit_action(m, edit::Rename{"place"}, h).name, "place");
  EXPECT_THROW(edit_action(m, edit::Rename{""}, h), Error);
}

TEST(Edit, CloneKeepsSourceAndRejectsClash) {
  KnowledgeBase kb;
  kb.actions["move"] = lifted_fig2();
  KnowledgeBase out = clone_action(kb, "move", "move2");
  EXPECT_EQ(out.actions.size(), 2u);
  EXPECT_EQ(out.action("move2").pre, out.action("move").pre);
  EXPECT_EQ(out.action("move2").name, "move2");
  EXPECT_THROW(clone_action(out, "move", "move2"), Error);
  try {
    clone_action(kb, "nope", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAction);
  }
}

TEST(Diagnostics, MovedObjectNotClearWarning) {
  const auto d = validate_action_model(lifted_fig2(), TypeHierarchy::standard());
  EXPECT_FALSE(has_errors(d));
  EXPECT_TRUE(std::any_of(d.begin(), d.end(), [](const Diagnostic& x) {
    return x.code == "moved_object_not_clear";
  }));
}

TEST(Diagnostics, ErrorsForBrokenModels) {
  ActionModel m = lifted_fig2();
  m.pre.insert(parse_atom("clear(c)"));
  m.params.push_back({"?o", "cube"});
  m.eff_add.insert(parse_atom("on(?o,?A)"));
  KnowledgeBase kb;
  m.pre.insert(parse_atom("glued(?o)"));
  const auto d = validate_in_kb(m, kb);
  std::set<std::string> codes;
  for (const auto& x : d) codes.insert(x.code);
  for (const char* c : {"constant_in_condition", "duplicate_param", "effect_contradiction",
                        "unknown_predicate"})
    EXPECT_TRUE(codes.contains(c)) << c;
}

TEST(GoalConsistency, OnAndClearContradict) {
  const auto c = check_goal_consistency(atoms("on(c,A) clear(A)"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].first, parse_atom("on(c,A)"));
  EXPECT_EQ(c[0].second, parse_atom("clear(A)"));
  EXPECT_EQ(check_goal_consistency(atoms("on(c,A) on(c,B)")).size(), 1u);
  EXPECT_TRUE(check_goal_consistency(atoms("on(c,A) clear(B)")).empty());
}

// Property: widening a parameter type never removes ground instances.
TEST(TypeProperty, WideningIsMonotone) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto rp = fixtures::random_problem(rng);
    const ActionModel& m = rp.kb.actions.at("move");
    for (const auto& p : m.params) {
      auto parent = rp.kb.hierarchy.parent(p.type);
      if (!parent) continue;
      KnowledgeBase wider = rp.kb;
      wider.actions["move"] =
          edit_action(m, edit::RetypeParam{p.name, *parent}, rp.kb.hierarchy);
      const auto narrow = ground(rp.kb, rp.problem.objects);
      const auto wide = ground(wider, rp.problem.objects);
      for (const auto& g : narrow) {
        if (g.schema != "move") continue;
        EXPECT_TRUE(std::find_if(wide.begin(), wide.end(), [&](const GroundAction& x) {
                      return x.schema == g.schema && x.args == g.args;
                    }) != wide.end());
      }
    }
  }
}

TEST(Json, ActionModelRoundTrip) {
  const ActionModel m = lifted_fig2();
  const Json j = m;
  EXPECT_EQ(j.get<ActionModel>(), m);
  KnowledgeBase kb;
  kb.actions["move"] = m;
  EXPECT_EQ(Json(kb).get<KnowledgeBase>(), kb);
}

TEST(Json, EditsRoundTrip) {
  const std::vector<ActionEdit> edits{
      edit::AddPrecondition{parse_atom("clear(?o)"), {{"?z", "element"}}},
      edit::RemovePrecondition{parse_atom("clear(?B)")},
      edit::AddEffect{parse_atom("flat(?o)"), Polarity::del, {}},
      edit::RemoveEffect{parse_atom("clear(?A)"), Polarity::add},
      edit::RetypeParam{"?o", "object"},
      edit::Rename{"place"}};
  for (const auto& e : edits) {
    const Json j = action_edit_to_json(e);
    EXPECT_EQ(action_edit_to_json(action_edit_from_json(j)), j);
  }
  EXPECT_THROW(action_edit_from_json(Json{{"op", "explode"}}), std::exception);
}

}  // namespace
}  // namespace iroplan

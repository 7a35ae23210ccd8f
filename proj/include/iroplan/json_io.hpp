#pragma once

// JSON wire formats shared by scene files, project files, the REST service
// and the CLI reports. Every top-level payload carries `schema_version`.

#include "json.hpp"

#include "iroplan/executor.hpp"
#include "iroplan/knowledge.hpp"
#include "iroplan/planner.hpp"
#include "iroplan/sim_world.hpp"

namespace iroplan {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

void to_json(Json& j, const Vec3& v);
void from_json(const Json& j, Vec3& v);
void to_json(Json& j, const Pose& p);
void from_json(const Json& j, Pose& p);
void to_json(Json& j, const BoundingBox& b);
void from_json(const Json& j, BoundingBox& b);
void to_json(Json& j, const Atom& a);
void from_json(const Json& j, Atom& a);
void to_json(Json& j, const TypedVariable& v);
void from_json(const Json& j, TypedVariable& v);
void to_json(Json& j, const Keyframe& k);
void from_json(const Json& j, Keyframe& k);
void to_json(Json& j, const ActionModel& m);
void from_json(const Json& j, ActionModel& m);
void to_json(Json& j, const TypeHierarchy& h);
void from_json(const Json& j, TypeHierarchy& h);
void to_json(Json& j, const PredicateSignature& p);
void from_json(const Json& j, PredicateSignature& p);
void to_json(Json& j, const KnowledgeBase& kb);
void from_json(const Json& j, KnowledgeBase& kb);
void to_json(Json& j, const TypeRule& r);
void from_json(const Json& j, TypeRule& r);
void to_json(Json& j, const Landmark& l);
void to_json(Json& j, const TypedObject& o);
void from_json(const Json& j, TypedObject& o);
void to_json(Json& j, const PlanningProblem& p);
void from_json(const Json& j, PlanningProblem& p);
void to_json(Json& j, const GroundAction& g);
void to_json(Json& j, const PlanStep& s);
void from_json(const Json& j, PlanStep& s);
void to_json(Json& j, const SearchStats& s);
void to_json(Json& j, const Plan& p);
void to_json(Json& j, const PlanValidation& v);
void to_json(Json& j, const Diagnostic& d);
void to_json(Json& j, const Contradiction& c);
void to_json(Json& j, const BoundKeyframe& k);
void to_json(Json& j, const StepTrace& s);
void to_json(Json& j, const ExecutionTrace& t);
void to_json(Json& j, const MentalModel& m);

/// Scene file format: positions[], objects[] (pose or `on`), config.
SceneSpec scene_from_json(const Json& j);
Json scene_to_json(const SceneSpec& spec);

/// Full snapshot including gripper states; reloads to an equal World.
Json world_to_json(const World& world);
World world_from_json(const Json& j);

DemoScript demo_script_from_json(const Json& j);
Json demo_script_to_json(const DemoScript& script);

ActionEdit action_edit_from_json(const Json& j);
Json action_edit_to_json(const ActionEdit& e);

}  // namespace iroplan

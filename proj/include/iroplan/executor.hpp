#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iroplan/errors.hpp"
#include "iroplan/knowledge.hpp"
#include "iroplan/planner.hpp"
#include "iroplan/sim_world.hpp"

namespace iroplan {

/// What the robot believes about one landmark. Placeholders stand in for
/// landmarks that were never detected but show up in action effects.
struct Belief {
  Landmark landmark;
  bool placeholder = false;

  friend bool operator==(const Belief&, const Belief&) = default;
};

/// Landmark placement as believed by the robot: detected once, then updated
/// only through action effects.
struct MentalModel {
  std::map<std::string, Belief> beliefs;

  const Belief* find(std::string_view id) const;
  friend bool operator==(const MentalModel&, const MentalModel&) = default;
};

MentalModel make_mental_model(const LandmarkSet& landmarks);

/// True iff both describe the same landmarks with the same supports and
/// poses (within `tolerance`), ignoring placeholders.
bool same_placement(const MentalModel& belief, const LandmarkSet& detected,
                    double tolerance = 1e-9);

struct BoundKeyframe {
  Gripper gripper = Gripper::open;
  std::optional<std::string> landmark;  // nullopt: robot frame
  Pose pose;                            // absolute, table frame

  friend bool operator==(const BoundKeyframe&, const BoundKeyframe&) = default;
};

/// Absolute poses for each keyframe of `model` under `action`'s bindings,
/// using believed landmark locations. Throws UnknownLandmark.
std::vector<BoundKeyframe> bind_keyframes(const ActionModel& model,
                                          const GroundAction& action,
                                          const MentalModel& mm);

struct LandmarkChange {
  std::string id;
  std::optional<Landmark> before;
  std::optional<Landmark> after;
};

struct StepTrace {
  GroundAction action;
  std::vector<BoundKeyframe> keyframes;
  std::vector<LandmarkChange> world_diff;
  std::vector<LandmarkChange> belief_diff;
  std::vector<std::string> flags;  // e.g. effects on undetected landmarks
};

struct ExecutionFailure {
  std::size_t step = 0;
  ErrorCode cause = ErrorCode::ExecutionFailed;
  std::string message;
};

struct ExecutionTrace {
  std::vector<StepTrace> steps;
  std::optional<ExecutionFailure> failure;

  bool succeeded() const { return !failure.has_value(); }
};

struct ExecutionResult {
  ExecutionTrace trace;
  World world;
  MentalModel belief;
};

/// Placements implied by an action's effects: one per added on(o, e).
std::vector<Placement> placements_of(const GroundAction& action, Arm arm);

/// Applies the action's effects to the belief. Returns the flags raised for
/// undetected landmarks.
std::vector<std::string> update_mental_model(MentalModel& mm,
                                             const GroundAction& action);

/// The world as the robot believes it: real landmarks restricted to the
/// non-placeholder beliefs, placed where the belief says. Supports on
/// unbelieved landmarks are dropped.
World believed_world(const World& world, const MentalModel& mm);

using StepCallback = std::function<void(std::size_t, const StepTrace&)>;

/// Executes step by step: bind keyframes, move objects in the simulated
/// world, update the belief. Stops at the first failure; the trace is always a
/// prefix of the plan.
ExecutionResult execute_plan(const KnowledgeBase& kb, const World& world,
                             const Plan& plan, const MentalModel& mm,
                             const StepCallback& on_step = {});

}  // namespace iroplan

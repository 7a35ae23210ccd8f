#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iroplan/atom.hpp"
#include "iroplan/geometry.hpp"
#include "iroplan/knowledge.hpp"

namespace iroplan {

enum class LandmarkKind { position, object };

/// A predefined table position or a perceived object. Positions have zero
/// extent and no support.
struct Landmark {
  std::string id;
  LandmarkKind kind = LandmarkKind::position;
  Vec3 pose;
  BoundingBox bbox;
  std::optional<std::string> support;

  bool is_object() const { return kind == LandmarkKind::object; }
  /// z of the surface something placed on this landmark rests on.
  double top() const { return pose.z + (is_object() ? bbox.height / 2 : 0.0); }

  friend bool operator==(const Landmark&, const Landmark&) = default;
};

/// How `stackable(o, e)` is generated for an object surface `e`.
enum class StackingRule {
  flat_top,           // e is flat
  smaller_footprint,  // e is flat and o's footprint area is strictly smaller
};

struct GridPosition {
  std::string name;
  Vec3 pose;

  friend bool operator==(const GridPosition&, const GridPosition&) = default;
};

struct SceneConfig {
  std::vector<GridPosition> grid;
  double proximity_threshold = 0.05;
  bool occlude_stacked = false;
  std::vector<TypeRule> type_rules = standard_type_rules();
  StackingRule stacking = StackingRule::flat_top;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// An object as declared in a scene file: either at an explicit pose (its
/// support is the position within the proximity threshold) or `on` another
/// landmark.
struct ObjectPlacement {
  std::string id;
  BoundingBox bbox;
  std::optional<Vec3> pose;
  std::optional<std::string> on;
};

struct SceneSpec {
  SceneConfig config;
  std::vector<ObjectPlacement> objects;
};

using LandmarkSet = std::vector<Landmark>;

/// Immutable snapshot of the simulated tabletop. Operations return new
/// snapshots.
class World {
 public:
  World() = default;

  const SceneConfig& config() const { return config_; }
  const std::map<std::string, Landmark>& landmarks() const {
    return landmarks_;
  }
  const std::map<Arm, Gripper>& grippers() const { return grippers_; }

  const Landmark* find(std::string_view id) const;
  const Landmark& at(std::string_view id) const;  // throws UnknownLandmark

  /// The object resting on `id`, if any.
  const Landmark* occupant(std::string_view id) const;
  bool is_top_of_stack(std::string_view id) const {
    return occupant(id) == nullptr;
  }

  /// Landmark type: "position" or the bounding-box classification.
  std::string type_of(const Landmark& landmark) const;
  Classification classify(const Landmark& landmark) const;

  friend bool operator==(const World&, const World&) = default;

 private:
  friend World load_scene(const SceneSpec& spec);
  friend class WorldEditor;

  SceneConfig config_;
  std::map<std::string, Landmark> landmarks_;
  std::map<Arm, Gripper> grippers_{{Arm::claw, Gripper::open},
                                   {Arm::suction, Gripper::open}};
};

/// Scratch access used by the simulator operations; not part of the public
/// contract beyond this header.
class WorldEditor {
 public:
  explicit WorldEditor(World world) : world_(std::move(world)) {}
  Landmark& landmark(std::string_view id);
  void set_gripper(Arm arm, Gripper state) { world_.grippers_[arm] = state; }
  void erase(std::string_view id);
  World release() && { return std::move(world_); }

 private:
  World world_;
};

/// Throws DuplicateName, OverlappingObjects or InvalidScene.
World load_scene(const SceneSpec& spec);

SceneSpec load_scene_file(const std::filesystem::path& path);
SceneSpec parse_scene_json(std::string_view text);

/// All positions plus all objects; with occlude_stacked, objects that have
/// another object on top are omitted. Sorted by id.
LandmarkSet detect_landmarks(const World& world);

WorldState perceive_state(const World& world, const LandmarkSet& visible);

/// Moving one object onto a destination surface.
struct Placement {
  std::string object;
  std::string destination;
  std::optional<Arm> arm;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Throws NotGraspable (object under another object), PhysicallyBlocked
/// (destination occupied), UnknownLandmark.
World apply_action_in_world(const World& world, const Placement& step);

/// Pose an object takes when resting on `support`.
Vec3 resting_pose(const Landmark& support, const BoundingBox& object_box);

namespace demo {
struct Grasp {
  std::string object;
  Arm arm = Arm::suction;
};
struct ReleaseAt {
  std::string landmark;
};
/// relative_to == nullopt records the keyframe in the robot base frame.
struct SaveKeyframe {
  std::optional<std::string> relative_to;
  Pose offset;
};
}  // namespace demo

using DemoStep = std::variant<demo::Grasp, demo::ReleaseAt, demo::SaveKeyframe>;
using DemoScript = std::vector<DemoStep>;

struct Demonstration {
  KeyframeSeq keyframes;  // ground: relative_to holds landmark ids
  WorldState before;
  WorldState after;
  World world;
  std::optional<Arm> arm;
};

/// Throws InvalidScript for malformed scripts; placement errors propagate.
Demonstration record_demonstration(const World& world,
                                   const DemoScript& script);

}  // namespace iroplan

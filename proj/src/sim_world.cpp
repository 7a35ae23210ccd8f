#include "iroplan/sim_world.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "iroplan/errors.hpp"

namespace iroplan {

const Landmark* World::find(std::string_view id) const {
  auto it = landmarks_.find(std::string(id));
  return it == landmarks_.end() ? nullptr : &it->second;
}

const Landmark& World::at(std::string_view id) const {
  const Landmark* lm = find(id);
  if (!lm)
    throw Error(ErrorCode::UnknownLandmark,
                "no landmark '" + std::string(id) + "' in the world");
  return *lm;
}

const Landmark* World::occupant(std::string_view id) const {
  for (const auto& [_, lm] : landmarks_) {
    if (lm.support && *lm.support == id) return &lm;
  }
  return nullptr;
}

Classification World::classify(const Landmark& landmark) const {
  if (!landmark.is_object()) return {std::string(types::kPosition), {}};
  return classify_object(landmark.bbox, config_.type_rules);
}

std::string World::type_of(const Landmark& landmark) const {
  return classify(landmark).type;
}

Landmark& WorldEditor::landmark(std::string_view id) {
  auto it = world_.landmarks_.find(std::string(id));
  if (it == world_.landmarks_.end())
    throw Error(ErrorCode::UnknownLandmark,
                "no landmark '" + std::string(id) + "' in the world");
  return it->second;
}

void WorldEditor::erase(std::string_view id) {
  world_.landmarks_.erase(std::string(id));
}

Vec3 resting_pose(const Landmark& support, const BoundingBox& object_box) {
  return {support.pose.x, support.pose.y,
          support.top() + object_box.height / 2};
}

namespace {

double default_threshold(const std::vector<GridPosition>& grid) {
  double pitch = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      pitch = std::min(pitch, planar_distance(grid[i].pose, grid[j].pose));
    }
  }
  return std::isfinite(pitch) && pitch > 0 ? pitch / 2 : 0.05;
}

}  // namespace

World load_scene(const SceneSpec& spec) {
  World world;
  world.config_ = spec.config;
  if (!(world.config_.proximity_threshold > 0))
    world.config_.proximity_threshold = default_threshold(spec.config.grid);

  auto& lms = world.landmarks_;
  for (const auto& p : spec.config.grid) {
    if (p.name.empty())
      throw Error(ErrorCode::InvalidScene, "position without a name");
    if (!lms.emplace(p.name, Landmark{p.name, LandmarkKind::position, p.pose,
                                      {}, std::nullopt})
             .second)
      throw Error(ErrorCode::DuplicateName,
                  "duplicate position name '" + p.name + "'");
  }

  std::set<std::string> explicit_pose;
  for (const auto& o : spec.objects) {
    if (o.pose) explicit_pose.insert(o.id);
    if (o.id.empty()) throw Error(ErrorCode::InvalidScene, "object without id");
    if (!(o.bbox.width > 0 && o.bbox.length > 0 && o.bbox.height > 0))
      throw Error(ErrorCode::InvalidScene,
                  "object '" + o.id + "' needs a strictly positive bounding box");
    if (!o.on && !o.pose)
      throw Error(ErrorCode::InvalidScene,
                  "object '" + o.id + "' needs a pose or an 'on' support");
    Landmark lm{o.id, LandmarkKind::object, o.pose.value_or(Vec3{}), o.bbox,
                o.on};
    if (!lms.emplace(o.id, lm).second)
      throw Error(ErrorCode::DuplicateName, "duplicate landmark id '" + o.id + "'");
  }

  // Objects placed by pose rest on the nearest position within threshold.
  const double d = world.config_.proximity_threshold;
  for (auto& [id, lm] : lms) {
    if (!lm.is_object()) continue;
    if (lm.support) {
      if (*lm.support == id || !lms.contains(*lm.support))
        throw Error(ErrorCode::InvalidScene,
                    "object '" + id + "' rests on unknown landmark '" +
                        *lm.support + "'");
      continue;
    }
    const GridPosition* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : world.config_.grid) {
      double dist = planar_distance(lm.pose, p.pose);
      if (dist < best) {
        best = dist;
        nearest = &p;
      }
    }
    if (!nearest || best > d)
      throw Error(ErrorCode::InvalidScene,
                  "object '" + id + "' is not within " + std::to_string(d) +
                      " m of any position");
    lm.support = nearest->name;
  }

  // One object per surface.
  std::map<std::string, std::string> on_top;
  for (const auto& [id, lm] : lms) {
    if (!lm.support) continue;
    auto [it, inserted] = on_top.emplace(*lm.support, id);
    if (!inserted)
      throw Error(ErrorCode::OverlappingObjects,
                  "objects '" + it->second + "' and '" + id +
                      "' both rest on '" + *lm.support + "'");
  }

  // Resolve poses bottom-up; this also rejects support cycles.
  std::set<std::string> placed;
  for (const auto& [id, lm] : lms) {
    if (!lm.is_object()) placed.insert(id);
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto& [id, lm] : lms) {
      if (placed.contains(id) || !placed.contains(*lm.support)) continue;
      const Landmark& support = lms.at(*lm.support);
      Vec3 rest = resting_pose(support, lm.bbox);
      if (support.is_object() || !explicit_pose.contains(id)) {
        lm.pose = rest;
      } else {
        lm.pose.z = rest.z;
      }
      placed.insert(id);
      progress = true;
    }
  }
  if (placed.size() != lms.size())
    throw Error(ErrorCode::InvalidScene,
                "support chain does not terminate at a position");
  return world;
}

LandmarkSet detect_landmarks(const World& world) {
  LandmarkSet out;
  for (const auto& [id, lm] : world.landmarks()) {
    if (lm.is_object() && world.config().occlude_stacked &&
        world.occupant(id) != nullptr)
      continue;
    out.push_back(lm);
  }
  return out;
}

WorldState perceive_state(const World& world, const LandmarkSet& visible) {
  std::set<std::string> seen;
  for (const auto& lm : visible) seen.insert(lm.id);

  WorldState state;
  const double d = world.config().proximity_threshold;
  for (const auto& lm : visible) {
    const Landmark* actual = world.find(lm.id);
    if (!actual) continue;
    if (!world.occupant(lm.id)) state.insert({"clear", {lm.id}});
    if (!actual->is_object()) continue;

    const auto cls = world.classify(*actual);
    for (const auto& pred : cls.unary) state.insert({pred, {lm.id}});

    if (actual->support && seen.contains(*actual->support)) {
      const Landmark& support = world.at(*actual->support);
      if (support.is_object() ||
          planar_distance(actual->pose, support.pose) <= d)
        state.insert({"on", {lm.id, support.id}});
    }

    for (const auto& other : visible) {
      if (other.id == lm.id) continue;
      const Landmark* surface = world.find(other.id);
      if (!surface) continue;
      bool stackable = !surface->is_object();
      if (!stackable) {
        const auto scls = world.classify(*surface);
        stackable = std::find(scls.unary.begin(), scls.unary.end(), "flat") !=
                    scls.unary.end();
        if (stackable && world.config().stacking == StackingRule::smaller_footprint)
          stackable = actual->bbox.width * actual->bbox.length <
                      surface->bbox.width * surface->bbox.length;
      }
      if (stackable) state.insert({"stackable", {lm.id, other.id}});
    }
  }
  return state;
}

World apply_action_in_world(const World& world, const Placement& step) {
  const Landmark& object = world.at(step.object);
  const Landmark& dest = world.at(step.destination);
  if (!object.is_object())
    throw Error(ErrorCode::NotGraspable,
                "'" + step.object + "' is a table position");
  if (const Landmark* above = world.occupant(step.object))
    throw Error(ErrorCode::NotGraspable,
                "'" + step.object + "' is under '" + above->id + "'");
  if (step.object == step.destination)
    throw Error(ErrorCode::PhysicallyBlocked,
                "cannot place '" + step.object + "' on itself");
  if (const Landmark* occ = world.occupant(step.destination);
      occ && occ->id != step.object)
    throw Error(ErrorCode::PhysicallyBlocked,
                "'" + step.destination + "' is occupied by '" + occ->id + "'");

  WorldEditor editor(world);
  Landmark& moved = editor.landmark(step.object);
  moved.support = step.destination;
  moved.pose = resting_pose(dest, moved.bbox);
  if (step.arm) editor.set_gripper(*step.arm, Gripper::open);
  return std::move(editor).release();
}

Demonstration record_demonstration(const World& world,
                                   const DemoScript& script) {
  Demonstration out;
  out.before = perceive_state(world, detect_landmarks(world));

  World current = world;
  std::optional<std::string> held;
  Arm active_arm = Arm::suction;

  for (std::size_t i = 0; i < script.size(); ++i) {
    const auto where = "step " + std::to_string(i) + ": ";
    std::visit(
        [&](const auto& step) {
          using T = std::decay_t<decltype(step)>;
          if constexpr (std::is_same_v<T, demo::Grasp>) {
            if (held)
              throw Error(ErrorCode::InvalidScript,
                          where + "already holding '" + *held + "'");
            const Landmark& obj = current.at(step.object);
            if (!obj.is_object())
              throw Error(ErrorCode::NotGraspable,
                          where + "'" + step.object + "' is a table position");
            if (const Landmark* above = current.occupant(step.object))
              throw Error(ErrorCode::NotGraspable,
                          where + "'" + step.object + "' is under '" +
                              above->id + "'");
            held = step.object;
            active_arm = step.arm;
            if (!out.arm) out.arm = step.arm;
            WorldEditor editor(current);
            editor.set_gripper(step.arm, Gripper::closed);
            current = std::move(editor).release();
          } else if constexpr (std::is_same_v<T, demo::ReleaseAt>) {
            if (!held)
              throw Error(ErrorCode::InvalidScript,
                          where + "release-at without a preceding grasp");
            current = apply_action_in_world(
                current, Placement{*held, step.landmark, active_arm});
            held.reset();
          } else if constexpr (std::is_same_v<T, demo::SaveKeyframe>) {
            if (step.relative_to && !current.find(*step.relative_to))
              throw Error(ErrorCode::InvalidScript,
                          where + "keyframe relative to unknown landmark '" +
                              *step.relative_to + "'");
            Gripper g = held ? Gripper::closed : Gripper::open;
            out.keyframes.push_back({g, step.relative_to, step.offset});
          }
        },
        script[i]);
  }
  if (held)
    throw Error(ErrorCode::InvalidScript,
                "script ends while still holding '" + *held + "'");

  out.after = perceive_state(current, detect_landmarks(current));
  out.world = std::move(current);
  return out;
}

}  // namespace iroplan

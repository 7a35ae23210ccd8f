#include "iroplan/executor.hpp"

#include <set>

namespace iroplan {

namespace {

Landmark placeholder_landmark(const std::string& id) {
  Landmark lm;
  lm.id = id;
  lm.kind = LandmarkKind::object;
  return lm;
}

template <typename Map, typename Get>
std::vector<LandmarkChange> diff(const Map& before, const Map& after, Get get) {
  std::set<std::string> ids;
  for (const auto& [id, _] : before) ids.insert(id);
  for (const auto& [id, _] : after) ids.insert(id);
  std::vector<LandmarkChange> out;
  for (const auto& id : ids) {
    auto b = before.find(id);
    auto a = after.find(id);
    std::optional<Landmark> lb, la;
    if (b != before.end()) lb = get(b->second);
    if (a != after.end()) la = get(a->second);
    if (lb != la) out.push_back({id, lb, la});
  }
  return out;
}

}  // namespace

const Belief* MentalModel::find(std::string_view id) const {
  auto it = beliefs.find(std::string(id));
  return it == beliefs.end() ? nullptr : &it->second;
}

MentalModel make_mental_model(const LandmarkSet& landmarks) {
  MentalModel mm;
  for (const auto& lm : landmarks) mm.beliefs[lm.id] = Belief{lm, false};
  return mm;
}

bool same_placement(const MentalModel& belief, const LandmarkSet& detected,
                    double tolerance) {
  std::size_t real = 0;
  for (const auto& [_, b] : belief.beliefs) real += b.placeholder ? 0 : 1;
  if (real != detected.size()) return false;
  for (const auto& lm : detected) {
    const Belief* b = belief.find(lm.id);
    if (!b || b->placeholder) return false;
    if (b->landmark.support != lm.support) return false;
    if (!approx_equal(b->landmark.pose, lm.pose, tolerance)) return false;
  }
  return true;
}

std::vector<BoundKeyframe> bind_keyframes(const ActionModel& model,
                                          const GroundAction& action,
                                          const MentalModel& mm) {
  std::vector<BoundKeyframe> out;
  for (const auto& kf : model.keyframes) {
    BoundKeyframe bound{kf.gripper, std::nullopt, kf.offset};
    if (kf.relative_to) {
      std::string id = *kf.relative_to;
      if (is_variable(id)) {
        auto idx = model.param_index(id);
        if (!idx || *idx >= action.args.size())
          throw Error(ErrorCode::UnknownVariable,
                      model.name + ": keyframe frame " + id +
                          " is not a parameter");
        id = action.args[*idx];
      }
      const Belief* b = mm.find(id);
      if (!b)
        throw Error(ErrorCode::UnknownLandmark,
                    "keyframe refers to unknown landmark '" + id + "'");
      bound.landmark = id;
      bound.pose = compose(b->landmark.pose, kf.offset);
    }
    out.push_back(std::move(bound));
  }
  return out;
}

std::vector<Placement> placements_of(const GroundAction& action, Arm arm) {
  std::vector<Placement> out;
  for (const auto& a : action.eff_add) {
    if (a.predicate == "on" && a.args.size() == 2)
      out.push_back({a.args[0], a.args[1], arm});
  }
  return out;
}

std::vector<std::string> update_mental_model(MentalModel& mm,
                                             const GroundAction& action) {
  std::vector<std::string> flags;
  auto ensure = [&](const std::string& id) -> Belief& {
    auto it = mm.beliefs.find(id);
    if (it == mm.beliefs.end()) {
      flags.push_back("effect mentions undetected landmark '" + id +
                      "'; added placeholder");
      it = mm.beliefs.emplace(id, Belief{placeholder_landmark(id), true}).first;
    }
    return it->second;
  };

  for (const AtomSet* set : {&action.eff_add, &action.eff_del}) {
    for (const auto& a : *set) {
      for (const auto& arg : a.args) ensure(arg);
    }
  }

  std::set<std::string> moved;
  for (const auto& a : action.eff_add) {
    if (a.predicate != "on" || a.args.size() != 2) continue;
    const Landmark support = ensure(a.args[1]).landmark;
    Belief& obj = ensure(a.args[0]);
    obj.landmark.support = support.id;
    obj.landmark.pose = resting_pose(support, obj.landmark.bbox);
    moved.insert(a.args[0]);
  }
  for (const auto& a : action.eff_del) {
    if (a.predicate != "on" || a.args.size() != 2 || moved.contains(a.args[0]))
      continue;
    auto it = mm.beliefs.find(a.args[0]);
    if (it != mm.beliefs.end() && it->second.landmark.support == a.args[1])
      it->second.landmark.support.reset();
  }
  return flags;
}

World believed_world(const World& world, const MentalModel& mm) {
  WorldEditor editor(world);
  for (const auto& [id, _] : world.landmarks()) {
    const Belief* b = mm.find(id);
    if (!b || b->placeholder) editor.erase(id);
  }
  for (const auto& [id, b] : mm.beliefs) {
    if (b.placeholder || !world.find(id)) continue;
    Landmark& lm = editor.landmark(id);
    lm = b.landmark;
    if (lm.support && !mm.find(*lm.support)) lm.support.reset();
  }
  return std::move(editor).release();
}

ExecutionResult execute_plan(const KnowledgeBase& kb, const World& world,
                             const Plan& plan, const MentalModel& mm,
                             const StepCallback& on_step) {
  ExecutionResult result{{}, world, mm};
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& ga = plan.steps[i];
    StepTrace trace;
    trace.action = ga;
    try {
      const ActionModel& model = kb.action(ga.schema);
      trace.keyframes = bind_keyframes(model, ga, result.belief);

      World next = result.world;
      for (const auto& p : placements_of(ga, model.arm))
        next = apply_action_in_world(next, p);
      trace.world_diff = diff(result.world.landmarks(), next.landmarks(),
                              [](const Landmark& l) { return l; });

      MentalModel belief = result.belief;
      trace.flags = update_mental_model(belief, ga);
      trace.belief_diff = diff(result.belief.beliefs, belief.beliefs,
                               [](const Belief& b) { return b.landmark; });

      result.world = std::move(next);
      result.belief = std::move(belief);
    } catch (const Error& e) {
      result.trace.failure = ExecutionFailure{i, e.code(), e.what()};
      return result;
    }
    if (on_step) on_step(i, trace);
    result.trace.steps.push_back(std::move(trace));
  }
  return result;
}

}  // namespace iroplan

#include "iroplan/json_io.hpp"

#include <fstream>
#include <sstream>

#include "iroplan/errors.hpp"

namespace iroplan {

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorCode::BadRequest, msg);
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object with '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string_view to_string(StackingRule r) {
  return r == StackingRule::flat_top ? "flat_top" : "smaller_footprint";
}

StackingRule parse_stacking(const std::string& s) {
  if (s == "flat_top") return StackingRule::flat_top;
  if (s == "smaller_footprint") return StackingRule::smaller_footprint;
  bad("unknown stacking rule '" + s + "'");
}

}  // namespace

void to_json(Json& j, const Vec3& v) { j = Json::array({v.x, v.y, v.z}); }

void from_json(const Json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) bad("expected [x, y, z]");
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(Json& j, const Pose& p) {
  j = Json{{"position", p.position}, {"rpy", p.rpy}};
}

void from_json(const Json& j, Pose& p) {
  if (j.is_array()) {
    p = {j.get<Vec3>(), {}};
    return;
  }
  p.position = require(j, "position").get<Vec3>();
  p.rpy = get_or<Vec3>(j, "rpy", Vec3{});
}

void to_json(Json& j, const BoundingBox& b) {
  j = Json::array({b.width, b.length, b.height});
}

void from_json(const Json& j, BoundingBox& b) {
  if (!j.is_array() || j.size() != 3) bad("expected [width, length, height]");
  b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(Json& j, const Atom& a) { j = to_string(a); }

void from_json(const Json& j, Atom& a) {
  if (!j.is_string()) bad("expected an atom string such as \"on(c,A)\"");
  a = parse_atom(j.get<std::string>());
}

void to_json(Json& j, const TypedVariable& v) {
  j = Json{{"name", v.name}, {"type", v.type}};
}

void from_json(const Json& j, TypedVariable& v) {
  v.name = require(j, "name").get<std::string>();
  v.type = require(j, "type").get<std::string>();
}

void to_json(Json& j, const Keyframe& k) {
  j = Json{{"gripper", to_string(k.gripper)},
           {"relative_to", k.relative_to ? Json(*k.relative_to) : Json()},
           {"offset", k.offset}};
}

void from_json(const Json& j, Keyframe& k) {
  k.gripper = parse_gripper(require(j, "gripper").get<std::string>());
  auto rel = j.find("relative_to");
  if (rel != j.end() && !rel->is_null()) {
    k.relative_to = rel->get<std::string>();
  } else {
    k.relative_to.reset();
  }
  k.offset = get_or<Pose>(j, "offset", Pose{});
}

void to_json(Json& j, const ActionModel& m) {
  j = Json{{"name", m.name},
           {"arm", to_string(m.arm)},
           {"params", m.params},
           {"pre", m.pre},
           {"eff_add", m.eff_add},
           {"eff_del", m.eff_del},
           {"keyframes", m.keyframes}};
}

void from_json(const Json& j, ActionModel& m) {
  m.name = require(j, "name").get<std::string>();
  m.arm = parse_arm(get_or<std::string>(j, "arm", "suction"));
  m.params = get_or<std::vector<TypedVariable>>(j, "params", {});
  m.pre = get_or<AtomSet>(j, "pre", {});
  m.eff_add = get_or<AtomSet>(j, "eff_add", {});
  m.eff_del = get_or<AtomSet>(j, "eff_del", {});
  m.keyframes = get_or<KeyframeSeq>(j, "keyframes", {});
}

void to_json(Json& j, const TypeHierarchy& h) {
  j = Json::array();
  for (const auto& t : h.types()) {
    auto p = h.parent(t);
    j.push_back(Json{{"name", t}, {"parent", p ? Json(*p) : Json()}});
  }
}

void from_json(const Json& j, TypeHierarchy& h) {
  h = TypeHierarchy{};
  for (const auto& e : j) {
    h.add(require(e, "name").get<std::string>(),
          get_or<std::string>(e, "parent", ""));
  }
}

void to_json(Json& j, const PredicateSignature& p) {
  j = Json{{"name", p.name}, {"params", p.params}};
}

void from_json(const Json& j, PredicateSignature& p) {
  p.name = require(j, "name").get<std::string>();
  p.params = get_or<std::vector<TypedVariable>>(j, "params", {});
}

void to_json(Json& j, const KnowledgeBase& kb) {
  Json actions = Json::array();
  for (const auto& [_, m] : kb.actions) actions.push_back(m);
  j = Json{{"types", kb.hierarchy},
           {"predicates", kb.predicates},
           {"actions", actions}};
}

void from_json(const Json& j, KnowledgeBase& kb) {
  kb = KnowledgeBase{};
  if (j.contains("types")) kb.hierarchy = j.at("types").get<TypeHierarchy>();
  if (j.contains("predicates"))
    kb.predicates = j.at("predicates").get<std::vector<PredicateSignature>>();
  kb.actions.clear();
  for (const auto& a : get_or<Json>(j, "actions", Json::array())) {
    auto m = a.get<ActionModel>();
    if (!kb.actions.emplace(m.name, m).second)
      throw Error(ErrorCode::NameClash, "duplicate action '" + m.name + "'");
  }
}

void to_json(Json& j, const TypeRule& r) {
  j = Json{{"type", r.type}, {"min", r.min}, {"max", r.max}, {"unary", r.unary}};
}

void from_json(const Json& j, TypeRule& r) {
  r.type = require(j, "type").get<std::string>();
  r.min = require(j, "min").get<BoundingBox>();
  r.max = require(j, "max").get<BoundingBox>();
  r.unary = get_or<std::vector<std::string>>(j, "unary", {});
}

void to_json(Json& j, const Landmark& l) {
  j = Json{{"id", l.id},
           {"kind", l.is_object() ? "object" : "position"},
           {"pose", l.pose}};
  if (l.is_object()) {
    j["bbox"] = l.bbox;
    j["on"] = l.support ? Json(*l.support) : Json();
  }
}

void to_json(Json& j, const TypedObject& o) {
  j = Json{{"name", o.name}, {"type", o.type}};
}

void from_json(const Json& j, TypedObject& o) {
  o.name = require(j, "name").get<std::string>();
  o.type = require(j, "type").get<std::string>();
}

void to_json(Json& j, const PlanningProblem& p) {
  j = Json{{"name", p.name},
           {"objects", p.objects},
           {"init", p.init},
           {"goal", p.goal}};
}

void from_json(const Json& j, PlanningProblem& p) {
  p.name = require(j, "name").get<std::string>();
  p.objects = get_or<std::vector<TypedObject>>(j, "objects", {});
  p.init = get_or<AtomSet>(j, "init", {});
  p.goal = get_or<AtomSet>(j, "goal", {});
}

void to_json(Json& j, const GroundAction& g) {
  j = Json{{"action", g.schema}, {"args", g.args}, {"label", g.label()}};
}

void to_json(Json& j, const PlanStep& s) {
  j = Json{{"action", s.schema}, {"args", s.args}};
}

void from_json(const Json& j, PlanStep& s) {
  s.schema = require(j, "action").get<std::string>();
  s.args = get_or<std::vector<std::string>>(j, "args", {});
}

void to_json(Json& j, const SearchStats& s) {
  j = Json{{"expanded", s.expanded},
           {"generated", s.generated},
           {"ground_actions", s.ground_actions},
           {"runtime_us", s.runtime.count()}};
}

void to_json(Json& j, const Plan& p) {
  j = Json{{"length", p.size()}, {"steps", p.steps}, {"stats", p.stats}};
}

void to_json(Json& j, const PlanValidation& v) {
  j = Json{{"valid", v.valid}};
  if (!v.valid) {
    j["failed_step"] = v.failed_step ? Json(*v.failed_step) : Json();
    j["missing"] = v.missing;
    j["reason"] = v.reason;
  }
}

void to_json(Json& j, const Diagnostic& d) {
  j = Json{{"severity", to_string(d.severity)},
           {"code", d.code},
           {"message", d.message}};
}

void to_json(Json& j, const Contradiction& c) {
  j = Json{{"first", c.first}, {"second", c.second}, {"message", c.message}};
}

void to_json(Json& j, const BoundKeyframe& k) {
  j = Json{{"gripper", to_string(k.gripper)},
           {"landmark", k.landmark ? Json(*k.landmark) : Json()},
           {"pose", k.pose}};
}

namespace {
Json changes_to_json(const std::vector<LandmarkChange>& changes) {
  Json out = Json::array();
  for (const auto& c : changes) {
    out.push_back(Json{{"id", c.id},
                       {"before", c.before ? Json(*c.before) : Json()},
                       {"after", c.after ? Json(*c.after) : Json()}});
  }
  return out;
}
}  // namespace

void to_json(Json& j, const StepTrace& s) {
  j = Json{{"action", s.action},
           {"keyframes", s.keyframes},
           {"world_diff", changes_to_json(s.world_diff)},
           {"belief_diff", changes_to_json(s.belief_diff)},
           {"flags", s.flags}};
}

void to_json(Json& j, const ExecutionTrace& t) {
  j = Json{{"succeeded", t.succeeded()}, {"steps", t.steps}};
  if (t.failure) {
    j["failure"] = Json{{"step", t.failure->step},
                        {"cause", to_string(t.failure->cause)},
                        {"message", t.failure->message}};
  }
}

void to_json(Json& j, const MentalModel& m) {
  j = Json::array();
  for (const auto& [_, b] : m.beliefs) {
    Json e = b.landmark;
    e["placeholder"] = b.placeholder;
    j.push_back(std::move(e));
  }
}

// ---------------------------------------------------------------------------
// Scenes and worlds

SceneSpec scene_from_json(const Json& j) {
  if (!j.is_object()) bad("scene must be a JSON object");
  SceneSpec spec;
  for (const auto& p : get_or<Json>(j, "positions", Json::array())) {
    spec.config.grid.push_back({require(p, "name").get<std::string>(),
                                require(p, "pose").get<Vec3>()});
  }
  const Json config = get_or<Json>(j, "config", Json::object());
  spec.config.proximity_threshold =
      get_or<double>(config, "proximity_threshold", 0.0);
  spec.config.occlude_stacked = get_or<bool>(config, "occlude_stacked", false);
  spec.config.stacking =
      parse_stacking(get_or<std::string>(config, "stacking", "flat_top"));
  if (config.contains("type_rules"))
    spec.config.type_rules = config.at("type_rules").get<std::vector<TypeRule>>();

  for (const auto& o : get_or<Json>(j, "objects", Json::array())) {
    ObjectPlacement placement;
    placement.id = require(o, "id").get<std::string>();
    placement.bbox = require(o, "bbox").get<BoundingBox>();
    if (o.contains("pose") && !o.at("pose").is_null())
      placement.pose = o.at("pose").get<Vec3>();
    if (o.contains("on") && !o.at("on").is_null())
      placement.on = o.at("on").get<std::string>();
    spec.objects.push_back(std::move(placement));
  }
  return spec;
}

Json scene_to_json(const SceneSpec& spec) {
  Json positions = Json::array();
  for (const auto& p : spec.config.grid)
    positions.push_back(Json{{"name", p.name}, {"pose", p.pose}});
  Json objects = Json::array();
  for (const auto& o : spec.objects) {
    Json e{{"id", o.id}, {"bbox", o.bbox}};
    if (o.pose) e["pose"] = *o.pose;
    if (o.on) e["on"] = *o.on;
    objects.push_back(std::move(e));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"positions", positions},
              {"objects", objects},
              {"config",
               {{"proximity_threshold", spec.config.proximity_threshold},
                {"occlude_stacked", spec.config.occlude_stacked},
                {"stacking", to_string(spec.config.stacking)},
                {"type_rules", spec.config.type_rules}}}};
}

SceneSpec parse_scene_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidScene, std::string("scene JSON: ") + e.what());
  }
  try {
    return scene_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidScene, std::string("scene JSON: ") + e.what());
  }
}

SceneSpec load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidScene, "cannot open scene file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_json(ss.str());
}

Json world_to_json(const World& world) {
  SceneSpec spec;
  spec.config = world.config();
  for (const auto& [id, lm] : world.landmarks()) {
    if (!lm.is_object()) continue;
    spec.objects.push_back({id, lm.bbox, lm.pose, lm.support});
  }
  Json j = scene_to_json(spec);
  Json grippers = Json::object();
  for (const auto& [arm, state] : world.grippers())
    grippers[std::string(to_string(arm))] = to_string(state);
  j["grippers"] = grippers;
  return j;
}

World world_from_json(const Json& j) {
  World world = load_scene(scene_from_json(j));
  if (j.contains("grippers")) {
    WorldEditor editor(world);
    for (const auto& [arm, state] : j.at("grippers").items())
      editor.set_gripper(parse_arm(arm), parse_gripper(state.get<std::string>()));
    world = std::move(editor).release();
  }
  return world;
}

// ---------------------------------------------------------------------------
// Demo scripts and edits

DemoScript demo_script_from_json(const Json& j) {
  if (!j.is_array()) bad("demonstration script must be an array of steps");
  DemoScript script;
  for (const auto& s : j) {
    const auto op = require(s, "op").get<std::string>();
    if (op == "grasp") {
      script.push_back(demo::Grasp{require(s, "object").get<std::string>(),
                                   parse_arm(get_or<std::string>(s, "arm", "suction"))});
    } else if (op == "release_at") {
      script.push_back(demo::ReleaseAt{require(s, "landmark").get<std::string>()});
    } else if (op == "keyframe") {
      demo::SaveKeyframe k;
      if (s.contains("relative_to") && !s.at("relative_to").is_null())
        k.relative_to = s.at("relative_to").get<std::string>();
      k.offset = get_or<Pose>(s, "offset", Pose{});
      script.push_back(std::move(k));
    } else {
      bad("unknown demonstration step '" + op + "'");
    }
  }
  return script;
}

Json demo_script_to_json(const DemoScript& script) {
  Json out = Json::array();
  for (const auto& step : script) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, demo::Grasp>) {
            out.push_back(Json{{"op", "grasp"},
                               {"object", s.object},
                               {"arm", to_string(s.arm)}});
          } else if constexpr (std::is_same_v<T, demo::ReleaseAt>) {
            out.push_back(Json{{"op", "release_at"}, {"landmark", s.landmark}});
          } else {
            out.push_back(Json{{"op", "keyframe"},
                               {"relative_to", s.relative_to ? Json(*s.relative_to) : Json()},
                               {"offset", s.offset}});
          }
        },
        step);
  }
  return out;
}

ActionEdit action_edit_from_json(const Json& j) {
  const auto op = require(j, "op").get<std::string>();
  auto polarity = [&] {
    auto p = get_or<std::string>(j, "polarity", "add");
    if (p == "add") return Polarity::add;
    if (p == "del" || p == "delete") return Polarity::del;
    bad("unknown polarity '" + p + "'");
  };
  auto declare = get_or<std::map<std::string, std::string>>(j, "declare", {});
  if (op == "add_pre")
    return edit::AddPrecondition{require(j, "atom").get<Atom>(), declare};
  if (op == "remove_pre")
    return edit::RemovePrecondition{require(j, "atom").get<Atom>()};
  if (op == "add_eff")
    return edit::AddEffect{require(j, "atom").get<Atom>(), polarity(), declare};
  if (op == "remove_eff")
    return edit::RemoveEffect{require(j, "atom").get<Atom>(), polarity()};
  if (op == "retype_param")
    return edit::RetypeParam{require(j, "variable").get<std::string>(),
                             require(j, "type").get<std::string>()};
  if (op == "rename") return edit::Rename{require(j, "name").get<std::string>()};
  bad("unknown edit op '" + op + "'");
}

Json action_edit_to_json(const ActionEdit& e) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        auto pol = [](Polarity p) { return p == Polarity::add ? "add" : "del"; };
        if constexpr (std::is_same_v<T, edit::AddPrecondition>) {
          return Json{{"op", "add_pre"}, {"atom", v.atom}, {"declare", v.declare}};
        } else if constexpr (std::is_same_v<T, edit::RemovePrecondition>) {
          return Json{{"op", "remove_pre"}, {"atom", v.atom}};
        } else if constexpr (std::is_same_v<T, edit::AddEffect>) {
          return Json{{"op", "add_eff"},
                      {"atom", v.atom},
                      {"polarity", pol(v.polarity)},
                      {"declare", v.declare}};
        } else if constexpr (std::is_same_v<T, edit::RemoveEffect>) {
          return Json{{"op", "remove_eff"},
                      {"atom", v.atom},
                      {"polarity", pol(v.polarity)}};
        } else if constexpr (std::is_same_v<T, edit::RetypeParam>) {
          return Json{{"op", "retype_param"}, {"variable", v.variable}, {"type", v.type}};
        } else {
          return Json{{"op", "rename"}, {"name", v.name}};
        }
      },
      e);
}

}  // namespace iroplan

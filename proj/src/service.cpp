#include <sstream>

#include "iroplan/pddl.hpp"
#include "iroplan/service.hpp"

namespace iroplan {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '/')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownResource:
    case ErrorCode::UnknownAction:
    case ErrorCode::UnknownLandmark:
      return 404;
    case ErrorCode::VersionConflict:
      return 409;
    default:
      return 400;
  }
}

Response error_response(int status, std::string_view code, const std::string& msg) {
  return {status, Json{{"schema_version", kSchemaVersion},
                       {"error", code},
                       {"message", msg}}};
}

Response ok(Json body, int status = 200) {
  Json out{{"schema_version", kSchemaVersion}};
  for (auto& [k, v] : body.items()) out[k] = v;
  return {status, std::move(out)};
}

bool is_mutation(const std::string& method) {
  return method == "POST" || method == "PUT" || method == "DELETE";
}

const Json& body_or_empty(const Request& r) {
  static const Json empty = Json::object();
  return r.body.is_object() ? r.body : empty;
}

std::string required_string(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string() || it->get<std::string>().empty())
    throw Error(ErrorCode::BadRequest, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

SearchOptions search_options(const Json& body, SearchOptions base) {
  if (body.contains("strategy"))
    base.strategy = parse_strategy(body.at("strategy").get<std::string>());
  if (body.contains("node_budget"))
    base.node_budget = body.at("node_budget").get<std::size_t>();
  if (body.contains("time_budget_secs"))
    base.time_budget = std::chrono::milliseconds(
        static_cast<long long>(body.at("time_budget_secs").get<double>() * 1000));
  return base;
}

Json world_view(const World& world) {
  const LandmarkSet visible = detect_landmarks(world);
  return Json{{"world", world_to_json(world)},
              {"landmarks", visible},
              {"state", perceive_state(world, visible)}};
}

Json action_view(const ActionModel& m, const KnowledgeBase& kb) {
  return Json{{"action", m}, {"diagnostics", validate_in_kb(m, kb)}};
}

PlanningProblem problem_from_body(Session& s, const Json& body,
                                  const std::string& name) {
  AtomSet goal = body.value("goal", AtomSet{});
  if (body.contains("objects") || body.contains("init")) {
    PlanningProblem p;
    p.name = name;
    p.objects = body.value("objects", std::vector<TypedObject>{});
    p.init = body.value("init", AtomSet{});
    p.goal = std::move(goal);
    return p;
  }
  return s.make_problem(name, std::move(goal),
                        body.value("source", "world") == "belief");
}

Json solve_body(const SolveResult& r) {
  Json out;
  if (r.outcome.plan) {
    out["plan"] = *r.outcome.plan;
    if (r.validation) out["validation"] = *r.validation;
  } else {
    const auto& f = *r.outcome.failure;
    out["error"] = "NoPlanFound";
    out["reason"] = to_string(f.reason);
    out["message"] = f.detail;
    out["contradictions"] = f.contradictions;
    out["stats"] = f.stats;
    out["debug_report"] = r.report;
  }
  return out;
}

}  // namespace

void to_json(Json& j, const Request& r) {
  j = Json{{"method", r.method},
           {"path", r.path},
           {"query", r.query},
           {"body", r.body}};
  if (r.if_match) j["if_match"] = *r.if_match;
}

void from_json(const Json& j, Request& r) {
  r.method = j.at("method").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.query = j.value("query", std::map<std::string, std::string>{});
  r.body = j.value("body", Json());
  if (j.contains("if_match")) r.if_match = j.at("if_match").get<std::uint64_t>();
}

Service::Service(SessionOptions defaults) : defaults_(std::move(defaults)) {}

std::shared_ptr<Session> Service::session(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end())
    throw Error(ErrorCode::UnknownResource, "no session '" + id + "'");
  return it->second;
}

std::vector<Request> Service::log(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = logs_.find(session_id);
  if (it == logs_.end())
    throw Error(ErrorCode::UnknownResource, "no session '" + session_id + "'");
  return it->second;
}

Response Service::handle(const Request& request) {
  Response response;
  try {
    response = dispatch(request);
  } catch (const Error& e) {
    response = error_response(status_of(e.code()), to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    response = error_response(400, to_string(ErrorCode::BadRequest), e.what());
  } catch (const std::exception& e) {
    response = error_response(500, "InternalError", e.what());
  }

  // A failed solve still replaces the stored plan, so it is logged too.
  const bool applied =
      (response.status >= 200 && response.status < 300) || response.status == 422;
  if (is_mutation(request.method) && applied) {
    const auto parts = split_path(request.path);
    std::string sid;
    if (parts.size() == 1 && parts[0] == "sessions") {
      sid = response.body.value("id", "");
    } else if (parts.size() >= 2 && parts[0] == "sessions") {
      sid = parts[1];
    } else if (request.query.contains("session")) {
      sid = request.query.at("session");
    }
    const bool cancel = !parts.empty() && parts.back() == "cancel";
    if (!sid.empty() && !cancel) {
      std::unique_lock lock(mutex_);
      logs_[sid].push_back(request);
    }
  }
  return response;
}

Response Service::dispatch(const Request& req) {
  const auto p = split_path(req.path);
  const std::string& m = req.method;
  const Json& body = body_or_empty(req);
  const std::optional<std::uint64_t> expected =
      req.if_match ? req.if_match
                   : (body.contains("version")
                          ? std::optional<std::uint64_t>(body.at("version").get<std::uint64_t>())
                          : std::nullopt);

  if (p.empty()) return error_response(404, "UnknownResource", "no route");

  // Event replay without a streaming transport.
  if (p[0] == "events" && p.size() == 2 && m == "GET") {
    auto s = session(p[1]);
    std::uint64_t since = req.query.contains("since") ? std::stoull(req.query.at("since")) : 0;
    Json events = Json::array();
    for (const auto& e : s->events_since(since))
      events.push_back(Json{{"seq", e.seq}, {"type", e.type}, {"data", e.data}});
    return ok(Json{{"events", events}});
  }

  // Session-less aliases: /problems/{p}/{verb}?session=ID
  if (p[0] == "problems") {
    if (!req.query.contains("session"))
      throw Error(ErrorCode::BadRequest, "missing ?session= query parameter");
    Request forwarded = req;
    forwarded.path = "/sessions/" + req.query.at("session") + req.path;
    return dispatch(forwarded);
  }

  if (p[0] != "sessions") return error_response(404, "UnknownResource", "no route " + req.path);

  if (p.size() == 1) {
    if (m != "POST") return error_response(405, "BadRequest", "method not allowed");
    SessionOptions options = defaults_;
    options.condition_inference =
        body.value("condition_inference", options.condition_inference);
    options.search = search_options(body, options.search);
    World world;
    if (body.contains("scene")) world = load_scene(scene_from_json(body.at("scene")));
    std::string id;
    {
      std::unique_lock lock(mutex_);
      id = body.value("id", "");
      if (id.empty()) {
        do {
          id = "s" + std::to_string(next_id_++);
        } while (sessions_.contains(id));
      } else if (sessions_.contains(id)) {
        throw Error(ErrorCode::NameClash, "session '" + id + "' already exists");
      }
    }
    auto s = std::make_shared<Session>(id, std::move(world), options);
    if (body.contains("project")) s->load_project(body.at("project"));
    {
      std::unique_lock lock(mutex_);
      sessions_[id] = s;
      logs_[id];
    }
    return ok(Json{{"id", id},
                   {"version", s->version()},
                   {"condition_inference", s->condition_inference()}},
              201);
  }

  auto s = session(p[1]);
  if (is_mutation(m) && !(p.size() == 5 && p[4] == "cancel")) s->check_version(expected);
  auto with_version = [&](Json j) {
    j["version"] = s->version();
    return j;
  };

  if (p.size() == 2) {
    if (m == "GET") {
      Json actions = Json::array();
      for (const auto& [name, _] : s->knowledge().actions) actions.push_back(name);
      Json problems = Json::array();
      for (const auto& [name, _] : s->problems()) problems.push_back(name);
      return ok(with_version(Json{{"id", s->id()},
                                  {"condition_inference", s->condition_inference()},
                                  {"busy", s->busy()},
                                  {"actions", actions},
                                  {"problems", problems}}));
    }
    if (m == "DELETE") {
      std::unique_lock lock(mutex_);
      sessions_.erase(p[1]);
      return ok(Json{{"deleted", p[1]}});
    }
  }

  const std::string& what = p[2];
  if (p.size() == 3) {
    if (what == "world") {
      if (m == "GET") return ok(with_version(world_view(s->world())));
      if (m == "PUT") {
        const Json& scene = body.contains("scene") ? body.at("scene") : body;
        World world = scene.contains("grippers") ? world_from_json(scene)
                                                 : load_scene(scene_from_json(scene));
        s->set_world(std::move(world));
        return ok(with_version(world_view(s->world())));
      }
    }
    if (what == "detect" && m == "POST") {
      const LandmarkSet detected = s->detect();
      const World world = s->world();
      return ok(with_version(Json{{"landmarks", detected},
                                  {"state", perceive_state(world, detected)},
                                  {"mental_model", s->mental_model()}}));
    }
    if (what == "settings" && m == "PUT") {
      if (body.contains("condition_inference"))
        s->set_condition_inference(body.at("condition_inference").get<bool>());
      return ok(with_version(Json{{"condition_inference", s->condition_inference()}}));
    }
    if (what == "demonstrations" && m == "POST") {
      const std::string name = required_string(body, "name");
      DemoScript script = demo_script_from_json(body.value("script", Json::array()));
      std::optional<Bindings> bindings;
      if (body.contains("bindings")) {
        Bindings b;
        for (const auto& [id, v] : body.at("bindings").items())
          b[id] = v.get<TypedVariable>();
        bindings = std::move(b);
      }
      auto r = s->demonstrate(name, script, bindings);
      return ok(with_version(Json{{"action", r.action},
                                  {"diagnostics", r.diagnostics},
                                  {"before", r.before},
                                  {"after", r.after},
                                  {"condition_inference", s->condition_inference()}}),
                201);
    }
    if (what == "actions") {
      if (m == "GET") {
        const KnowledgeBase kb = s->knowledge();
        Json actions = Json::array();
        for (const auto& [_, a] : kb.actions) actions.push_back(action_view(a, kb));
        return ok(with_version(Json{{"actions", actions}}));
      }
      if (m == "POST") {
        const Json& model = body.contains("action") ? body.at("action") : body;
        ActionModel a = s->add_action(model.get<ActionModel>());
        return ok(with_version(action_view(a, s->knowledge())), 201);
      }
    }
    if (what == "problems") {
      if (m == "GET") {
        Json problems = Json::array();
        for (const auto& [_, pr] : s->problems()) problems.push_back(pr);
        return ok(with_version(Json{{"problems", problems}}));
      }
      if (m == "POST") {
        const std::string name = required_string(body, "name");
        auto existing = s->problems();
        if (existing.contains(name))
          throw Error(ErrorCode::NameClash, "problem '" + name + "' already exists");
        auto pr = s->put_problem(problem_from_body(*s, body, name));
        return ok(with_version(Json{{"problem", pr},
                                    {"contradictions", check_goal_consistency(pr.goal)}}),
                  201);
      }
    }
    if (what == "debug-report" && m == "GET")
      return ok(with_version(Json{{"debug_report", s->debug_report()}}));
    if (what == "project") {
      if (m == "GET") return ok(with_version(Json{{"project", s->project()}}));
      if (m == "POST" || m == "PUT") {
        s->load_project(body.contains("project") ? body.at("project") : body);
        return ok(with_version(Json{{"project", s->project()}}));
      }
    }
    if (what == "log" && m == "GET") {
      Json requests = Json::array();
      for (const auto& r : log(s->id())) requests.push_back(r);
      return ok(Json{{"requests", requests}});
    }
    if (what == "trace" && m == "GET") {
      auto trace = s->last_trace();
      if (!trace) throw Error(ErrorCode::UnknownResource, "nothing executed yet");
      return ok(with_version(Json{{"trace", *trace}}));
    }
  }

  if (p.size() == 4 && what == "export" && p[3] == "pddl" && m == "GET") {
    const KnowledgeBase kb = s->knowledge();
    Json problems = Json::object();
    for (const auto& [name, pr] : s->problems()) {
      if (req.query.contains("problem") && req.query.at("problem") != name) continue;
      problems[name] = pddl::emit_problem(pr);
    }
    return ok(with_version(Json{{"domain", pddl::emit_domain(kb)}, {"problems", problems}}));
  }

  if (p.size() >= 4 && what == "actions") {
    const std::string& name = p[3];
    if (p.size() == 4) {
      if (m == "GET") {
        const KnowledgeBase kb = s->knowledge();
        return ok(with_version(action_view(kb.action(name), kb)));
      }
      if (m == "PUT") {
        ActionModel a;
        if (body.contains("edits")) {
          std::vector<ActionEdit> ops;
          for (const auto& e : body.at("edits")) ops.push_back(action_edit_from_json(e));
          a = s->edit(name, ops);
        } else {
          const Json& model = body.contains("action") ? body.at("action") : body;
          a = s->replace_action(name, model.get<ActionModel>());
        }
        return ok(with_version(action_view(a, s->knowledge())));
      }
      if (m == "DELETE") {
        s->remove_action(name);
        return ok(with_version(Json{{"deleted", name}}));
      }
    }
    if (p.size() == 5 && p[4] == "clone" && m == "POST") {
      ActionModel a = s->clone(name, required_string(body, "name"));
      return ok(with_version(action_view(a, s->knowledge())), 201);
    }
  }

  if (p.size() >= 4 && what == "problems") {
    const std::string& name = p[3];
    if (p.size() == 4) {
      if (m == "GET") {
        auto pr = s->problem(name);
        return ok(with_version(Json{{"problem", pr},
                                    {"contradictions", check_goal_consistency(pr.goal)}}));
      }
      if (m == "PUT") {
        PlanningProblem pr = s->problem(name);
        if (body.contains("objects") || body.contains("init") || body.contains("refresh")) {
          pr = problem_from_body(*s, body, name);
        } else if (body.contains("goal")) {
          pr.goal = body.at("goal").get<AtomSet>();
        }
        pr = s->put_problem(pr);
        return ok(with_version(Json{{"problem", pr},
                                    {"contradictions", check_goal_consistency(pr.goal)}}));
      }
      if (m == "DELETE") {
        s->remove_problem(name);
        return ok(with_version(Json{{"deleted", name}}));
      }
    }
    if (p.size() == 5) {
      const std::string& verb = p[4];
      if (verb == "solve" && m == "POST") {
        const KnowledgeBase kb = s->knowledge();
        std::optional<SearchOptions> options;
        if (body.contains("strategy") || body.contains("node_budget") ||
            body.contains("time_budget_secs"))
          options = search_options(body, SearchOptions{});
        if (body.value("async", false)) {
          if (!s->solve_async(name, options))
            throw Error(ErrorCode::VersionConflict, "a planner run is already active");
          return ok(with_version(Json{{"status", "started"}, {"problem", name}}), 202);
        }
        SolveResult r = s->solve(name, options);
        return ok(with_version(solve_body(r)), r.outcome.solved() ? 200 : 422);
      }
      if (verb == "plan" && m == "GET") {
        auto plan = s->last_plan(name);
        if (!plan) throw Error(ErrorCode::UnknownResource, "no plan for '" + name + "'");
        return ok(with_version(Json{{"plan", *plan}}));
      }
      if (verb == "execute" && m == "POST") {
        ExecutionResult r = s->execute(name);
        return ok(with_version(Json{{"trace", r.trace},
                                    {"world", world_to_json(r.world)},
                                    {"mental_model", r.belief}}));
      }
      if (verb == "cancel" && m == "POST")
        return ok(with_version(Json{{"cancelled", s->cancel()}}));
    }
  }

  return error_response(404, "UnknownResource", "no route " + m + " " + req.path);
}

std::string replay(Service& service, const std::vector<Request>& log) {
  std::string old_id;
  std::string new_id;
  for (const auto& original : log) {
    Request r = original;
    auto parts = split_path(r.path);
    if (parts.size() == 1 && parts[0] == "sessions" && r.method == "POST") {
      if (r.body.is_object()) r.body.erase("id");
      Response created = service.handle(r);
      if (created.status != 201)
        throw Error(ErrorCode::BadRequest, "replay: session creation failed");
      new_id = created.body.at("id").get<std::string>();
      continue;
    }
    if (new_id.empty())
      throw Error(ErrorCode::BadRequest, "replay: log does not start with POST /sessions");
    if (parts.size() >= 2 && parts[0] == "sessions") {
      old_id = parts[1];
      parts[1] = new_id;
      r.path.clear();
      for (const auto& part : parts) r.path += "/" + part;
    }
    if (r.query.contains("session")) r.query["session"] = new_id;
    service.handle(r);
    service.session(new_id)->wait();
  }
  return new_id;
}

}  // namespace iroplan

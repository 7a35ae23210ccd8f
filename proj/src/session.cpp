#include <set>

#include "iroplan/service.hpp"

namespace iroplan {

namespace {

Error unknown(const std::string& what) {
  return Error(ErrorCode::UnknownResource, what);
}

/// Object/constant checks only; action diagnostics are reported at solve
/// time so problems can be defined while actions are still being edited.
void validate_problem_shape(const KnowledgeBase& kb, const PlanningProblem& p) {
  KnowledgeBase types_only;
  types_only.hierarchy = kb.hierarchy;
  types_only.predicates = kb.predicates;
  validate_problem(types_only, p);
}

}  // namespace

PlanningProblem problem_from_world(const World& world, std::string name,
                                   AtomSet goal) {
  PlanningProblem p;
  p.name = std::move(name);
  const LandmarkSet visible = detect_landmarks(world);
  for (const auto& lm : visible) p.objects.push_back({lm.id, world.type_of(lm)});
  p.init = perceive_state(world, visible);
  p.goal = std::move(goal);
  return p;
}

PlanningProblem problem_from_belief(const World& world, const MentalModel& mm,
                                    std::string name, AtomSet goal) {
  const World believed = believed_world(world, mm);
  LandmarkSet all;
  for (const auto& [_, lm] : believed.landmarks()) all.push_back(lm);
  PlanningProblem p;
  p.name = std::move(name);
  for (const auto& lm : all) p.objects.push_back({lm.id, believed.type_of(lm)});
  p.init = perceive_state(believed, all);
  p.goal = std::move(goal);
  return p;
}

Bindings default_bindings(const World& world, const InferredConditions& inferred,
                          const KeyframeSeq& keyframes) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::set<std::string> moved;
  auto note = [&](const std::string& id) {
    if (!is_variable(id) && seen.insert(id).second) order.push_back(id);
  };
  for (const AtomSet* set : {&inferred.pre, &inferred.eff_add, &inferred.eff_del}) {
    for (const auto& a : *set) {
      for (const auto& arg : a.args) note(arg);
      if (a.predicate == "on" && !a.args.empty()) moved.insert(a.args[0]);
    }
  }
  for (const auto& k : keyframes) {
    if (k.relative_to) note(*k.relative_to);
  }

  Bindings out;
  std::set<std::string> used;
  auto fresh = [&](std::string base) {
    std::string name = base;
    for (int i = 2; used.contains(name); ++i) name = base + std::to_string(i);
    used.insert(name);
    return name;
  };
  // Moved objects take ?o first so that other ids cannot claim it.
  for (const auto& id : order) {
    if (!moved.contains(id)) continue;
    const Landmark* lm = world.find(id);
    if (!lm) continue;
    out[id] = {fresh("?o"), world.type_of(*lm)};
  }
  for (const auto& id : order) {
    if (out.contains(id)) continue;
    const Landmark* lm = world.find(id);
    if (!lm) continue;
    out[id] = {fresh("?" + id), world.type_of(*lm)};
  }
  return out;
}

Session::Session(std::string id, World world, SessionOptions options)
    : id_(std::move(id)), world_(std::move(world)), options_(std::move(options)) {}

Session::~Session() {
  cancel();
  std::lock_guard worker_lock(solve_mutex_);
  if (worker_.joinable()) worker_.join();
}

std::uint64_t Session::version() const {
  std::lock_guard lock(mutex_);
  return version_;
}

void Session::check_version(std::optional<std::uint64_t> expected) const {
  if (!expected) return;
  std::lock_guard lock(mutex_);
  if (*expected != version_)
    throw Error(ErrorCode::VersionConflict,
                "session is at version " + std::to_string(version_) +
                    ", request expected " + std::to_string(*expected));
}

void Session::bump() { ++version_; }

void Session::emit(std::string type, Json data) {
  {
    std::lock_guard lock(events_mutex_);
    events_.push_back({events_.size() + 1, std::move(type), std::move(data)});
  }
  events_cv_.notify_all();
}

World Session::world() const {
  std::lock_guard lock(mutex_);
  return world_;
}

void Session::set_world(World world) {
  std::lock_guard lock(mutex_);
  world_ = std::move(world);
  belief_.reset();
  bump();
  emit("world.updated", Json{{"version", version_}});
}

LandmarkSet Session::detect() {
  std::lock_guard lock(mutex_);
  LandmarkSet detected = detect_landmarks(world_);
  belief_ = make_mental_model(detected);
  bump();
  return detected;
}

PlanningProblem Session::make_problem(std::string name, AtomSet goal,
                                      bool from_belief) {
  std::lock_guard lock(mutex_);
  if (!from_belief) return problem_from_world(world_, std::move(name), std::move(goal));
  if (!belief_) belief_ = make_mental_model(detect_landmarks(world_));
  return problem_from_belief(world_, *belief_, std::move(name), std::move(goal));
}

MentalModel Session::mental_model() const {
  std::lock_guard lock(mutex_);
  return belief_.value_or(MentalModel{});
}

bool Session::condition_inference() const {
  std::lock_guard lock(mutex_);
  return options_.condition_inference;
}

void Session::set_condition_inference(bool on) {
  std::lock_guard lock(mutex_);
  options_.condition_inference = on;
  bump();
}

KnowledgeBase Session::knowledge() const {
  std::lock_guard lock(mutex_);
  return kb_;
}

DemonstrationResult Session::demonstrate(const std::string& name,
                                         const DemoScript& script,
                                         std::optional<Bindings> bindings) {
  std::lock_guard lock(mutex_);
  if (name.empty()) throw Error(ErrorCode::BadRequest, "action name is empty");
  if (kb_.actions.contains(name))
    throw Error(ErrorCode::NameClash, "action '" + name + "' already exists");

  Demonstration demo = record_demonstration(world_, script);
  InferredConditions inferred;
  if (options_.condition_inference)
    inferred = infer_conditions(demo.before, demo.after);
  Bindings b = default_bindings(world_, inferred, demo.keyframes);
  if (bindings) {
    for (const auto& [id, v] : *bindings) b[id] = v;
  }
  ActionModel model = lift_action(name, inferred, demo.keyframes, b,
                                  kb_.hierarchy, demo.arm.value_or(Arm::suction));

  kb_.actions[name] = model;
  world_ = std::move(demo.world);
  belief_.reset();
  bump();
  emit("action.created", Json{{"name", name}, {"version", version_}});
  return {model, validate_in_kb(model, kb_), std::move(demo.before),
          std::move(demo.after)};
}

ActionModel Session::add_action(ActionModel model) {
  std::lock_guard lock(mutex_);
  if (model.name.empty()) throw Error(ErrorCode::BadRequest, "action name is empty");
  if (kb_.actions.contains(model.name))
    throw Error(ErrorCode::NameClash, "action '" + model.name + "' already exists");
  for (const auto& d : validate_in_kb(model, kb_)) {
    if (d.severity == Severity::error)
      throw Error(ErrorCode::InvalidModel, model.name + ": " + d.message);
  }
  kb_.actions[model.name] = model;
  bump();
  emit("action.created", Json{{"name", model.name}, {"version", version_}});
  return model;
}

ActionModel Session::edit(const std::string& name,
                          const std::vector<ActionEdit>& ops) {
  std::lock_guard lock(mutex_);
  ActionModel model = kb_.action(name);
  for (const auto& op : ops) model = edit_action(model, op, kb_.hierarchy);
  if (model.name != name && kb_.actions.contains(model.name))
    throw Error(ErrorCode::NameClash, "action '" + model.name + "' already exists");
  kb_.actions.erase(name);
  kb_.actions[model.name] = model;
  bump();
  emit("action.updated", Json{{"name", model.name}, {"version", version_}});
  return model;
}

ActionModel Session::replace_action(const std::string& name, ActionModel model) {
  std::lock_guard lock(mutex_);
  kb_.action(name);
  if (model.name.empty()) model.name = name;
  if (model.name != name && kb_.actions.contains(model.name))
    throw Error(ErrorCode::NameClash, "action '" + model.name + "' already exists");
  for (const auto& d : validate_in_kb(model, kb_)) {
    if (d.severity == Severity::error)
      throw Error(ErrorCode::InvalidModel, model.name + ": " + d.message);
  }
  kb_.actions.erase(name);
  kb_.actions[model.name] = model;
  bump();
  emit("action.updated", Json{{"name", model.name}, {"version", version_}});
  return model;
}

void Session::remove_action(const std::string& name) {
  std::lock_guard lock(mutex_);
  kb_.action(name);
  kb_.actions.erase(name);
  bump();
  emit("action.deleted", Json{{"name", name}, {"version", version_}});
}

ActionModel Session::clone(const std::string& name, const std::string& new_name) {
  std::lock_guard lock(mutex_);
  kb_ = clone_action(kb_, name, new_name);
  bump();
  emit("action.created", Json{{"name", new_name}, {"version", version_}});
  return kb_.action(new_name);
}

std::map<std::string, PlanningProblem> Session::problems() const {
  std::lock_guard lock(mutex_);
  return problems_;
}

PlanningProblem Session::problem(const std::string& name) const {
  std::lock_guard lock(mutex_);
  auto it = problems_.find(name);
  if (it == problems_.end()) throw unknown("no problem '" + name + "'");
  return it->second;
}

PlanningProblem Session::put_problem(PlanningProblem problem) {
  std::lock_guard lock(mutex_);
  if (problem.name.empty()) throw Error(ErrorCode::BadRequest, "problem name is empty");
  validate_problem_shape(kb_, problem);
  plans_.erase(problem.name);
  problems_[problem.name] = problem;
  bump();
  emit("problem.updated", Json{{"name", problem.name}, {"version", version_}});
  return problem;
}

void Session::remove_problem(const std::string& name) {
  std::lock_guard lock(mutex_);
  if (!problems_.erase(name)) throw unknown("no problem '" + name + "'");
  plans_.erase(name);
  bump();
  emit("problem.deleted", Json{{"name", name}, {"version", version_}});
}

namespace {

/// Runs the planner outside the session lock.
SolveResult run_solver(const KnowledgeBase& kb, const PlanningProblem& problem,
                       const SearchOptions& options) {
  SolveResult r;
  r.outcome = plan(kb, problem, options);
  if (r.outcome.plan) r.validation = validate_plan(kb, problem, *r.outcome.plan);
  r.report = generate_debug_report(kb, problem, r.outcome);
  return r;
}

}  // namespace

SolveResult Session::solve(const std::string& name,
                           std::optional<SearchOptions> options) {
  std::stop_source source;
  {
    std::lock_guard lock(mutex_);
    if (running_)
      throw Error(ErrorCode::VersionConflict, "a planner run is already active");
    if (!problems_.contains(name)) throw unknown("no problem '" + name + "'");
    running_ = source;
  }
  return run_solve(name, std::move(options), source);
}

SolveResult Session::run_solve(const std::string& name,
                               std::optional<SearchOptions> options,
                               std::stop_source source) {
  KnowledgeBase kb;
  PlanningProblem problem;
  SearchOptions opts;
  {
    std::lock_guard lock(mutex_);
    auto it = problems_.find(name);
    if (it == problems_.end()) {
      running_.reset();
      throw unknown("no problem '" + name + "'");
    }
    kb = kb_;
    problem = it->second;
    opts = options.value_or(options_.search);
  }
  std::optional<std::stop_callback<std::function<void()>>> forward;
  if (opts.cancel.stop_possible())
    forward.emplace(opts.cancel, std::function<void()>([source]() mutable {
                      source.request_stop();
                    }));
  opts.cancel = source.get_token();
  opts.on_progress = [this, name](std::size_t expanded) {
    emit("planner.progress", Json{{"problem", name}, {"expanded", expanded}});
  };
  emit("planner.started",
       Json{{"problem", name}, {"strategy", to_string(opts.strategy)}});

  SolveResult result;
  try {
    result = run_solver(kb, problem, opts);
  } catch (...) {
    std::lock_guard lock(mutex_);
    running_.reset();
    throw;
  }

  Json done{{"problem", name}, {"solved", result.outcome.solved()}};
  {
    std::lock_guard lock(mutex_);
    running_.reset();
    if (result.outcome.plan) {
      plans_[name] = *result.outcome.plan;
      done["length"] = result.outcome.plan->size();
    } else {
      plans_.erase(name);
      done["reason"] = to_string(result.outcome.failure->reason);
    }
    report_ = result.report;
    bump();
    done["version"] = version_;
  }
  emit("planner.done", std::move(done));
  return result;
}

bool Session::solve_async(const std::string& name,
                          std::optional<SearchOptions> options) {
  std::lock_guard worker_lock(solve_mutex_);
  std::stop_source source;
  {
    std::lock_guard lock(mutex_);
    if (running_) return false;
    if (!problems_.contains(name)) throw unknown("no problem '" + name + "'");
    running_ = source;
  }
  if (worker_.joinable()) worker_.join();
  worker_ = std::jthread([this, name, options, source]() {
    try {
      run_solve(name, options, source);
    } catch (const std::exception& e) {
      emit("planner.error", Json{{"problem", name}, {"message", e.what()}});
    }
  });
  return true;
}

Plan Session::adopt_plan(const std::string& name, const std::vector<PlanStep>& steps) {
  std::lock_guard lock(mutex_);
  auto it = problems_.find(name);
  if (it == problems_.end()) throw unknown("no problem '" + name + "'");
  PlanValidation v = validate_plan(kb_, it->second, steps);
  if (!v.valid)
    throw Error(ErrorCode::InvalidModel, "plan for '" + name + "' is invalid: " + v.reason);
  Plan plan;
  for (const auto& s : steps) plan.steps.push_back(instantiate(kb_, it->second.objects, s));
  plans_[name] = plan;
  report_ = {};
  bump();
  emit("planner.done", Json{{"problem", name}, {"solved", true},
                            {"length", plan.size()}, {"version", version_}});
  return plan;
}

bool Session::cancel() {
  std::lock_guard lock(mutex_);
  if (!running_) return false;
  running_->request_stop();
  return true;
}

void Session::wait() {
  std::lock_guard worker_lock(solve_mutex_);
  if (worker_.joinable()) worker_.join();
}

bool Session::busy() const {
  std::lock_guard lock(mutex_);
  return running_.has_value();
}

std::optional<Plan> Session::last_plan(const std::string& problem) const {
  std::lock_guard lock(mutex_);
  auto it = plans_.find(problem);
  if (it == plans_.end()) return std::nullopt;
  return it->second;
}

DebugReport Session::debug_report() const {
  std::lock_guard lock(mutex_);
  return report_;
}

ExecutionResult Session::execute(const std::string& problem) {
  std::lock_guard lock(mutex_);
  auto it = plans_.find(problem);
  if (it == plans_.end())
    throw unknown("no plan for problem '" + problem + "'; solve it first");
  if (!belief_) belief_ = make_mental_model(detect_landmarks(world_));

  ExecutionResult result = execute_plan(
      kb_, world_, it->second, *belief_,
      [this, &problem](std::size_t i, const StepTrace& step) {
        Json j = step;
        emit("execution.step",
             Json{{"problem", problem}, {"index", i}, {"step", std::move(j)}});
      });
  world_ = result.world;
  belief_ = result.belief;
  trace_ = result.trace;
  bump();
  emit("execution.done", Json{{"problem", problem},
                              {"succeeded", result.trace.succeeded()},
                              {"version", version_}});
  return result;
}

std::optional<ExecutionTrace> Session::last_trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

Json Session::project() const {
  std::lock_guard lock(mutex_);
  Json problems = Json::array();
  for (const auto& [_, p] : problems_) problems.push_back(p);
  Json plans = Json::object();
  for (const auto& [name, p] : plans_) plans[name] = to_steps(p);
  return Json{{"schema_version", kSchemaVersion},
              {"condition_inference", options_.condition_inference},
              {"world", world_to_json(world_)},
              {"knowledge", kb_},
              {"problems", problems},
              {"plans", plans}};
}

void Session::load_project(const Json& project) {
  if (!project.is_object())
    throw Error(ErrorCode::BadRequest, "project must be a JSON object");
  const int version = project.value("schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw Error(ErrorCode::BadRequest,
                "unsupported project schema_version " + std::to_string(version));

  World world = project.contains("world") ? world_from_json(project.at("world"))
                                          : World{};
  KnowledgeBase kb = project.contains("knowledge")
                         ? project.at("knowledge").get<KnowledgeBase>()
                         : KnowledgeBase{};
  std::map<std::string, PlanningProblem> problems;
  for (const auto& p : project.value("problems", Json::array())) {
    auto problem = p.get<PlanningProblem>();
    validate_problem_shape(kb, problem);
    problems[problem.name] = std::move(problem);
  }
  std::map<std::string, Plan> plans;
  const Json saved_plans = project.value("plans", Json::object());
  for (const auto& [name, steps] : saved_plans.items()) {
    auto it = problems.find(name);
    if (it == problems.end()) continue;
    Plan plan;
    for (const auto& s : steps)
      plan.steps.push_back(instantiate(kb, it->second.objects, s.get<PlanStep>()));
    plans[name] = std::move(plan);
  }

  std::lock_guard lock(mutex_);
  world_ = std::move(world);
  kb_ = std::move(kb);
  problems_ = std::move(problems);
  plans_ = std::move(plans);
  options_.condition_inference =
      project.value("condition_inference", options_.condition_inference);
  belief_.reset();
  report_ = {};
  trace_.reset();
  bump();
  emit("project.loaded", Json{{"version", version_}});
}

std::vector<Event> Session::events_since(std::uint64_t seq) const {
  std::lock_guard lock(events_mutex_);
  if (seq >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(seq), events_.end()};
}

std::vector<Event> Session::wait_events(std::uint64_t seq,
                                        std::chrono::milliseconds timeout) const {
  std::unique_lock lock(events_mutex_);
  events_cv_.wait_for(lock, timeout, [&] { return events_.size() > seq; });
  if (seq >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(seq), events_.end()};
}

}  // namespace iroplan

#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "iroplan/executor.hpp"
#include "iroplan/json_io.hpp"
#include "iroplan/knowledge.hpp"
#include "iroplan/planner.hpp"
#include "iroplan/sim_world.hpp"

namespace iroplan {

// ---------------------------------------------------------------------------
// Debug report

enum class HintCategory { parameters, preconditions, effects, initial_state, goal };
std::string_view to_string(HintCategory c);

struct DebugHint {
  HintCategory category;
  std::string message;
  std::vector<std::string> subjects;  // action names or atoms

  friend bool operator==(const DebugHint&, const DebugHint&) = default;
};

struct DebugReport {
  std::vector<DebugHint> hints;

  bool empty() const { return hints.empty(); }
  bool has(HintCategory c) const;
};

namespace hints {
inline constexpr std::string_view kEffects =
    "make sure the action effects can achieve the goal states";
inline constexpr std::string_view kParameters =
    "make sure the action parameter types match the objects in the problem";
inline constexpr std::string_view kGoal =
    "the goal contains contradicting states (e.g. `object is on A' and `A is "
    "clear')";
inline constexpr std::string_view kInitialState =
    "an object is not mentioned in the initial states at all";
inline constexpr std::string_view kPreconditions =
    "make sure the action preconditions can be satisfied from the initial "
    "states";
}  // namespace hints

/// Rule checks over a failed attempt; an empty report when `outcome` solved.
/// Every failure with a non-empty goal yields at least one hint.
DebugReport generate_debug_report(const KnowledgeBase& kb,
                                  const PlanningProblem& problem,
                                  const PlanOutcome& outcome);

void to_json(Json& j, const DebugHint& h);
void to_json(Json& j, const DebugReport& r);

// ---------------------------------------------------------------------------
// Sessions

struct SessionOptions {
  bool condition_inference = true;
  SearchOptions search;
};

/// Builds a problem from what the robot currently perceives.
PlanningProblem problem_from_world(const World& world, std::string name,
                                   AtomSet goal);

/// Builds a problem from the robot's belief instead of a fresh detection, so
/// landmarks hidden since the first detection still take part.
PlanningProblem problem_from_belief(const World& world, const MentalModel& mm,
                                    std::string name, AtomSet goal);

/// Default lifting: the moved objects become ?o, ?o2, ...; every other
/// landmark becomes ?<id>; each variable is typed by the landmark's type.
Bindings default_bindings(const World& world, const InferredConditions& inferred,
                          const KeyframeSeq& keyframes);

struct DemonstrationResult {
  ActionModel action;
  std::vector<Diagnostic> diagnostics;
  WorldState before;
  WorldState after;
};

struct SolveResult {
  PlanOutcome outcome;
  std::optional<PlanValidation> validation;
  DebugReport report;
};

/// Serialized event for the progress stream.
struct Event {
  std::uint64_t seq = 0;
  std::string type;
  Json data;
};

/// One user's workbench: world, knowledge base, problems, last results.
/// All public members are thread safe; mutations are serialized and bump the
/// version counter.
class Session {
 public:
  Session(std::string id, World world, SessionOptions options = {});
  ~Session();

  const std::string& id() const { return id_; }
  std::uint64_t version() const;

  /// Throws VersionConflict if `expected` is set and differs.
  void check_version(std::optional<std::uint64_t> expected) const;

  World world() const;
  void set_world(World world);
  LandmarkSet detect();
  MentalModel mental_model() const;
  /// Problem over the current world, or over the belief (detecting first if
  /// nothing was detected yet).
  PlanningProblem make_problem(std::string name, AtomSet goal, bool from_belief);

  bool condition_inference() const;
  void set_condition_inference(bool on);

  KnowledgeBase knowledge() const;
  DemonstrationResult demonstrate(const std::string& name,
                                  const DemoScript& script,
                                  std::optional<Bindings> overrides = {});
  ActionModel add_action(ActionModel model);
  ActionModel edit(const std::string& name, const std::vector<ActionEdit>& ops);
  ActionModel replace_action(const std::string& name, ActionModel model);
  void remove_action(const std::string& name);
  ActionModel clone(const std::string& name, const std::string& new_name);

  std::map<std::string, PlanningProblem> problems() const;
  PlanningProblem problem(const std::string& name) const;
  PlanningProblem put_problem(PlanningProblem problem);
  void remove_problem(const std::string& name);

  /// Runs the planner synchronously on the calling thread; cancellable via
  /// cancel(). Stores the plan and debug report.
  SolveResult solve(const std::string& problem, std::optional<SearchOptions> options = {});
  /// Starts solve() on a worker; returns false if one is already running.
  bool solve_async(const std::string& problem, std::optional<SearchOptions> options = {});
  /// Stores an externally produced plan after validating it.
  Plan adopt_plan(const std::string& problem, const std::vector<PlanStep>& steps);
  bool cancel();
  void wait();
  bool busy() const;

  std::optional<Plan> last_plan(const std::string& problem) const;
  DebugReport debug_report() const;
  ExecutionResult execute(const std::string& problem);
  std::optional<ExecutionTrace> last_trace() const;

  Json project() const;
  void load_project(const Json& project);

  std::vector<Event> events_since(std::uint64_t seq) const;
  /// Blocks until an event newer than `seq` exists or `timeout` expires.
  std::vector<Event> wait_events(std::uint64_t seq,
                                 std::chrono::milliseconds timeout) const;

 private:
  void bump();
  void emit(std::string type, Json data);
  SolveResult run_solve(const std::string& problem,
                        std::optional<SearchOptions> options,
                        std::stop_source source);

  const std::string id_;
  mutable std::mutex mutex_;
  std::uint64_t version_ = 0;
  World world_;
  std::optional<MentalModel> belief_;
  KnowledgeBase kb_;
  std::map<std::string, PlanningProblem> problems_;
  std::map<std::string, Plan> plans_;
  DebugReport report_;
  std::optional<ExecutionTrace> trace_;
  SessionOptions options_;

  std::optional<std::stop_source> running_;
  std::jthread worker_;
  std::mutex solve_mutex_;

  mutable std::mutex events_mutex_;
  mutable std::condition_variable events_cv_;
  std::vector<Event> events_;
};

// ---------------------------------------------------------------------------
// JSON router

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  Json body;  // null when absent
  std::optional<std::uint64_t> if_match;
};

struct Response {
  int status = 200;
  Json body;
};

/// Transport-independent REST surface. Routes (all JSON):
///   POST   /sessions
///   GET    /sessions/{id}
///   GET    /sessions/{id}/world            PUT /sessions/{id}/world
///   POST   /sessions/{id}/detect
///   PUT    /sessions/{id}/settings
///   POST   /sessions/{id}/demonstrations
///   GET    /sessions/{id}/actions          POST /sessions/{id}/actions
///   GET|PUT|DELETE /sessions/{id}/actions/{a}
///   POST   /sessions/{id}/actions/{a}/clone
///   GET    /sessions/{id}/problems         POST /sessions/{id}/problems
///   GET|PUT|DELETE /sessions/{id}/problems/{p}
///   POST   /sessions/{id}/problems/{p}/solve|execute|cancel
///   GET    /sessions/{id}/problems/{p}/plan
///   POST   /problems/{p}/solve|execute?session={id}
///   GET    /sessions/{id}/debug-report
///   GET    /sessions/{id}/export/pddl
///   GET    /sessions/{id}/project          POST /sessions/{id}/project
///   GET    /sessions/{id}/log
///   GET    /events/{id}?since=N
class Service {
 public:
  explicit Service(SessionOptions defaults = {});

  Response handle(const Request& request);

  std::shared_ptr<Session> session(const std::string& id) const;

  /// Successful mutating requests in arrival order, for replay.
  std::vector<Request> log(const std::string& session_id) const;

 private:
  Response dispatch(const Request& request);

  SessionOptions defaults_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::vector<Request>> logs_;
  std::uint64_t next_id_ = 1;
};

/// Replays a recorded log into a fresh service; returns the new session id.
std::string replay(Service& service, const std::vector<Request>& log);

void to_json(Json& j, const Request& r);
void from_json(const Json& j, Request& r);

/// Blocking HTTP front end over Service (server-sent events on /events/{id}).
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds and serves on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iroplan

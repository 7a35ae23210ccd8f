#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iroplan/json_io.hpp"
#include "iroplan/service.hpp"

namespace iroplan {

struct ScenarioOptions {
  SearchOptions search;
  bool occlude_stacked = false;
  bool condition_inference = true;
  /// Command template for an external planner; empty = built-in planner.
  std::string external_planner;
  /// Loaded before the first command.
  std::optional<std::filesystem::path> scene;
};

struct TaskReport {
  std::string task;
  std::string problem;
  bool solved = false;
  std::size_t plan_length = 0;
  std::vector<std::string> plan;
  std::size_t expanded = 0;
  double wall_ms = 0.0;
};

struct ScenarioReport {
  std::string scenario;
  bool passed = true;
  std::string failure;
  std::vector<TaskReport> tasks;
  std::vector<std::string> actions;
  double wall_ms = 0.0;
};

void to_json(Json& j, const TaskReport& t);
void to_json(Json& j, const ScenarioReport& r);

/// Line-oriented command language over an in-process Session. Commands:
///   scene PATH | include PATH | inference on|off | strategy NAME
///   demonstrate NAME ... end   (grasp OBJ [ARM], release LM,
///                               keyframe LM|robot X Y Z [R P Y],
///                               bind ID ?VAR TYPE)
///   edit NAME add-pre ATOM [?v=type..] | remove-pre ATOM
///             | add-eff ATOM [add|del] | remove-eff ATOM [add|del]
///             | retype ?VAR TYPE | rename NEW
///   clone NAME NEW | delete-action NAME
///   problem NAME [from-belief] ATOM... | goal NAME ATOM...
///   task LABEL | detect
///   solve NAME [expect-length N] [expect-fail] [expect-hint CATEGORY]
///              [expect-action SCHEMA] [strategy NAME]
///   execute NAME [expect-fail]
///   assert-state [!]ATOM... | assert-detected [!]ID... | assert-actions N
///   assert-pre ACTION ATOM
///   state | actions | show ACTION | plan NAME | debug
///   export DIR | import DOMAIN.pddl | save FILE | load FILE
/// Paths resolve against the directory of the file being run.
class Interpreter {
 public:
  Interpreter(ScenarioOptions options, std::ostream& out);
  ~Interpreter();

  /// Executes one line (or buffers it inside a demonstrate block). Throws
  /// Error on failure; assertion failures use ErrorCode::InvalidScript.
  void feed(const std::string& line, const std::filesystem::path& base_dir);
  void run_file(const std::filesystem::path& path);
  bool in_block() const;

  Session& session() { return *session_; }
  const ScenarioReport& report() const { return report_; }
  ScenarioReport& report() { return report_; }

 private:
  void command(const std::vector<std::string>& words,
               const std::filesystem::path& base_dir);
  void finish_demonstration();
  World load_world(const std::filesystem::path& path) const;

  ScenarioOptions options_;
  std::ostream& out_;
  std::unique_ptr<Session> session_;
  ScenarioReport report_;
  std::string task_;

  struct Block;
  std::unique_ptr<Block> block_;
  int include_depth_ = 0;
};

/// Runs a scenario file end to end; never throws for script failures (they
/// are recorded in the report).
ScenarioReport run_scenario(const std::filesystem::path& path,
                            const ScenarioOptions& options, std::ostream& log);

struct BenchCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// The Tasks 3-8 benchmark run plus its acceptance checks: every task
/// solved, exactly two taught schemas (suction move needing flat(?o), claw
/// move needing thin(?o)), Task 3 and Task 8 plans of length 3, and the whole
/// run under the time limit.
struct BenchResult {
  ScenarioReport report;
  KnowledgeBase knowledge;
  std::vector<BenchCheck> checks;

  bool passed() const;
};

BenchResult run_bench(const std::filesystem::path& script, const ScenarioOptions& options,
                      std::ostream& log, double time_limit_ms = 30'000.0);

/// Markdown table of per-task results followed by the checks.
std::string bench_markdown(const BenchResult& result);

/// n disks stacked largest-first on peg A of three pegs A, B, C.
SceneSpec hanoi_scene(int disks);
/// Disk names d1 (smallest) .. dn.
std::string hanoi_disk(int i);
/// The taught-style move used for Hanoi: object from any element onto any
/// element it is stackable on.
ActionModel hanoi_move();
/// Every disk stacked on peg C in the original order.
AtomSet hanoi_goal(int disks);

}  // namespace iroplan

#include "iroplan/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "iroplan/pddl.hpp"

namespace iroplan {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorCode::InvalidScript, msg);
}

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail("expected a number, got '" + s + "'");
  }
}

std::size_t to_size(const std::string& s) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    fail("expected a non-negative integer, got '" + s + "'");
  }
}

void need(const std::vector<std::string>& w, std::size_t n, const char* usage) {
  if (w.size() < n) fail(std::string("usage: ") + usage);
}

Polarity parse_polarity(const std::string& s) {
  if (s == "add") return Polarity::add;
  if (s == "del" || s == "delete") return Polarity::del;
  fail("polarity must be add or del, got '" + s + "'");
}

HintCategory parse_category(const std::string& s) {
  for (auto c : {HintCategory::parameters, HintCategory::preconditions,
                 HintCategory::effects, HintCategory::initial_state,
                 HintCategory::goal}) {
    if (to_string(c) == s) return c;
  }
  fail("unknown hint category '" + s + "'");
}

LandmarkSet all_landmarks(const World& world) {
  LandmarkSet out;
  for (const auto& [_, lm] : world.landmarks()) out.push_back(lm);
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path.string());
  out << text;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

void to_json(Json& j, const TaskReport& t) {
  j = Json{{"task", t.task},
           {"problem", t.problem},
           {"solved", t.solved},
           {"plan_length", t.plan_length},
           {"plan", t.plan},
           {"expanded", t.expanded},
           {"wall_ms", t.wall_ms}};
}

void to_json(Json& j, const ScenarioReport& r) {
  j = Json{{"schema_version", kSchemaVersion},
           {"scenario", r.scenario},
           {"passed", r.passed},
           {"failure", r.failure},
           {"actions", r.actions},
           {"tasks", r.tasks},
           {"wall_ms", r.wall_ms}};
}

struct Interpreter::Block {
  std::string name;
  DemoScript script;
  Bindings bindings;
};

Interpreter::Interpreter(ScenarioOptions options, std::ostream& out)
    : options_(std::move(options)), out_(out) {
  SessionOptions so;
  so.condition_inference = options_.condition_inference;
  so.search = options_.search;
  session_ = std::make_unique<Session>("scenario", World{}, so);
  if (options_.scene) session_->set_world(load_world(*options_.scene));
}

Interpreter::~Interpreter() = default;

bool Interpreter::in_block() const { return block_ != nullptr; }

World Interpreter::load_world(const fs::path& path) const {
  SceneSpec spec = load_scene_file(path);
  if (options_.occlude_stacked) spec.config.occlude_stacked = true;
  return load_scene(spec);
}

void Interpreter::run_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario " + path.string());
  if (report_.scenario.empty()) report_.scenario = path.filename().string();
  const fs::path base = path.parent_path();
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    try {
      feed(line, base);
    } catch (const Error& e) {
      throw Error(e.code(), path.filename().string() + ":" + std::to_string(number) +
                                ": " + e.what());
    }
  }
  if (block_ && include_depth_ == 0) fail(path.filename().string() + ": unterminated demonstrate block");
}

void Interpreter::feed(const std::string& raw, const fs::path& base_dir) {
  const auto words = split_words(strip_comment(raw));
  if (words.empty()) return;
  if (block_) {
    const std::string& op = words[0];
    if (op == "end") {
      finish_demonstration();
    } else if (op == "grasp") {
      need(words, 2, "grasp OBJECT [claw|suction]");
      block_->script.push_back(
          demo::Grasp{words[1], words.size() > 2 ? parse_arm(words[2]) : Arm::suction});
    } else if (op == "release") {
      need(words, 2, "release LANDMARK");
      block_->script.push_back(demo::ReleaseAt{words[1]});
    } else if (op == "keyframe") {
      need(words, 5, "keyframe LANDMARK|robot X Y Z [R P Y]");
      demo::SaveKeyframe k;
      if (words[1] != "robot") k.relative_to = words[1];
      k.offset.position = {to_double(words[2]), to_double(words[3]), to_double(words[4])};
      if (words.size() >= 8)
        k.offset.rpy = {to_double(words[5]), to_double(words[6]), to_double(words[7])};
      block_->script.push_back(std::move(k));
    } else if (op == "bind") {
      need(words, 4, "bind LANDMARK ?VAR TYPE");
      block_->bindings[words[1]] = TypedVariable{words[2], words[3]};
    } else {
      fail("unknown demonstration step '" + op + "'");
    }
    return;
  }
  command(words, base_dir);
}

void Interpreter::finish_demonstration() {
  auto block = std::move(block_);
  auto r = session_->demonstrate(block->name, block->script,
                                 block->bindings.empty()
                                     ? std::nullopt
                                     : std::optional<Bindings>(block->bindings));
  out_ << "taught " << r.action.name << "(";
  for (std::size_t i = 0; i < r.action.params.size(); ++i)
    out_ << (i ? ", " : "") << r.action.params[i].name << " - " << r.action.params[i].type;
  out_ << ")\n  pre: " << to_string(r.action.pre)
       << "\n  add: " << to_string(r.action.eff_add)
       << "\n  del: " << to_string(r.action.eff_del) << "\n";
  for (const auto& d : r.diagnostics)
    out_ << "  " << to_string(d.severity) << ": " << d.message << "\n";
}

void Interpreter::command(const std::vector<std::string>& w, const fs::path& base) {
  const std::string& op = w[0];
  Session& s = *session_;
  auto path_arg = [&](std::size_t i) { return fs::path(w[i]).is_absolute() ? fs::path(w[i]) : base / w[i]; };

  if (op == "scene") {
    need(w, 2, "scene PATH");
    s.set_world(load_world(path_arg(1)));
    out_ << "scene " << w[1] << "\n";
  } else if (op == "include") {
    need(w, 2, "include PATH");
    if (++include_depth_ > 32) fail("include nesting too deep");
    try {
      run_file(path_arg(1));
    } catch (...) {
      --include_depth_;
      throw;
    }
    --include_depth_;
  } else if (op == "inference") {
    need(w, 2, "inference on|off");
    s.set_condition_inference(w[1] == "on");
  } else if (op == "strategy") {
    need(w, 2, "strategy NAME");
    options_.search.strategy = parse_strategy(w[1]);
  } else if (op == "demonstrate") {
    need(w, 2, "demonstrate NAME");
    block_ = std::make_unique<Block>();
    block_->name = w[1];
  } else if (op == "edit") {
    need(w, 3, "edit ACTION OP ...");
    const std::string& kind = w[2];
    ActionEdit e;
    if (kind == "add-pre") {
      need(w, 4, "edit ACTION add-pre ATOM [?v=type ...]");
      edit::AddPrecondition a{parse_atom(w[3]), {}};
      for (std::size_t i = 4; i < w.size(); ++i) {
        auto eq = w[i].find('=');
        if (eq == std::string::npos) fail("expected ?var=type, got '" + w[i] + "'");
        a.declare[w[i].substr(0, eq)] = w[i].substr(eq + 1);
      }
      e = a;
    } else if (kind == "remove-pre") {
      need(w, 4, "edit ACTION remove-pre ATOM");
      e = edit::RemovePrecondition{parse_atom(w[3])};
    } else if (kind == "add-eff") {
      need(w, 4, "edit ACTION add-eff ATOM [add|del]");
      e = edit::AddEffect{parse_atom(w[3]),
                          w.size() > 4 ? parse_polarity(w[4]) : Polarity::add, {}};
    } else if (kind == "remove-eff") {
      need(w, 4, "edit ACTION remove-eff ATOM [add|del]");
      e = edit::RemoveEffect{parse_atom(w[3]),
                             w.size() > 4 ? parse_polarity(w[4]) : Polarity::add};
    } else if (kind == "retype") {
      need(w, 5, "edit ACTION retype ?VAR TYPE");
      e = edit::RetypeParam{w[3], w[4]};
    } else if (kind == "rename") {
      need(w, 4, "edit ACTION rename NEW");
      e = edit::Rename{w[3]};
    } else {
      fail("unknown edit '" + kind + "'");
    }
    ActionModel m = s.edit(w[1], {e});
    out_ << "edited " << m.name << "\n";
  } else if (op == "clone") {
    need(w, 3, "clone ACTION NEW");
    s.clone(w[1], w[2]);
    out_ << "cloned " << w[1] << " -> " << w[2] << "\n";
  } else if (op == "delete-action") {
    need(w, 2, "delete-action NAME");
    s.remove_action(w[1]);
  } else if (op == "problem") {
    need(w, 2, "problem NAME [from-belief] ATOM...");
    std::size_t first = 2;
    bool from_belief = false;
    if (w.size() > 2 && w[2] == "from-belief") {
      from_belief = true;
      first = 3;
    }
    AtomSet goal;
    for (std::size_t i = first; i < w.size(); ++i) goal.insert(parse_atom(w[i]));
    auto p = s.put_problem(s.make_problem(w[1], goal, from_belief));
    out_ << "problem " << p.name << ": goal " << to_string(p.goal) << "\n";
    for (const auto& c : check_goal_consistency(p.goal))
      out_ << "  contradiction: " << c.message << "\n";
  } else if (op == "goal") {
    need(w, 2, "goal NAME ATOM...");
    PlanningProblem p = s.problem(w[1]);
    p.goal.clear();
    for (std::size_t i = 2; i < w.size(); ++i) p.goal.insert(parse_atom(w[i]));
    s.put_problem(p);
  } else if (op == "task") {
    need(w, 2, "task LABEL");
    task_ = w[1];
    out_ << "== " << task_ << "\n";
  } else if (op == "detect") {
    const LandmarkSet detected = s.detect();
    std::vector<std::string> ids;
    for (const auto& lm : detected) ids.push_back(lm.id);
    out_ << "detected " << join(ids, " ") << "\n";
  } else if (op == "solve") {
    need(w, 2, "solve PROBLEM [expect-length N] [expect-fail] ...");
    const std::string& name = w[1];
    std::optional<std::size_t> expect_length;
    std::optional<HintCategory> expect_hint;
    std::optional<std::string> expect_action;
    bool expect_fail = false;
    SearchOptions opts = options_.search;
    for (std::size_t i = 2; i < w.size(); ++i) {
      if (w[i] == "expect-fail") {
        expect_fail = true;
      } else if (w[i] == "expect-length" && i + 1 < w.size()) {
        expect_length = to_size(w[++i]);
      } else if (w[i] == "expect-hint" && i + 1 < w.size()) {
        expect_hint = parse_category(w[++i]);
      } else if (w[i] == "expect-action" && i + 1 < w.size()) {
        expect_action = w[++i];
      } else if (w[i] == "strategy" && i + 1 < w.size()) {
        opts.strategy = parse_strategy(w[++i]);
      } else {
        fail("unknown solve option '" + w[i] + "'");
      }
    }

    TaskReport t;
    t.task = task_.empty() ? name : task_;
    t.problem = name;
    const auto t0 = Clock::now();
    DebugReport report;
    std::string reason;
    if (!options_.external_planner.empty()) {
      const auto problem = s.problem(name);
      auto ext = pddl::run_external_planner(options_.external_planner, s.knowledge(), problem);
      if (ext.exit_code == 0 && (!ext.steps.empty() || is_subset(problem.goal, problem.init))) {
        Plan plan = s.adopt_plan(name, ext.steps);
        t.solved = true;
        t.plan_length = plan.size();
        for (const auto& st : plan.steps) t.plan.push_back(st.label());
      } else {
        reason = "external planner exit code " + std::to_string(ext.exit_code);
        PlanOutcome failed{std::nullopt, NoPlanFound{NoPlanReason::exhausted, reason, {}, {}}};
        report = generate_debug_report(s.knowledge(), problem, failed);
      }
    } else {
      SolveResult r = s.solve(name, opts);
      if (r.outcome.plan) {
        t.solved = true;
        t.plan_length = r.outcome.plan->size();
        t.expanded = r.outcome.plan->stats.expanded;
        for (const auto& st : r.outcome.plan->steps) t.plan.push_back(st.label());
      } else {
        reason = std::string(to_string(r.outcome.failure->reason));
        t.expanded = r.outcome.failure->stats.expanded;
      }
      report = r.report;
    }
    t.wall_ms = ms_since(t0);
    report_.tasks.push_back(t);

    if (t.solved) {
      out_ << "solve " << name << ": " << t.plan_length << " step(s)\n";
      for (std::size_t i = 0; i < t.plan.size(); ++i) out_ << "  " << i << ": " << t.plan[i] << "\n";
    } else {
      out_ << "solve " << name << ": no plan (" << reason << ")\n";
      for (const auto& h : report.hints)
        out_ << "  hint [" << to_string(h.category) << "] " << h.message << ": "
             << join(h.subjects, ", ") << "\n";
    }

    if (expect_fail && t.solved) fail("expected " + name + " to have no plan");
    if (!expect_fail && !t.solved) fail("no plan found for " + name + " (" + reason + ")");
    if (expect_length && t.plan_length != *expect_length)
      fail("expected plan length " + std::to_string(*expect_length) + " for " + name +
           ", got " + std::to_string(t.plan_length));
    if (expect_hint && !report.has(*expect_hint))
      fail("expected a " + std::string(to_string(*expect_hint)) + " hint for " + name);
    if (expect_action &&
        std::none_of(t.plan.begin(), t.plan.end(), [&](const std::string& l) {
          return l.rfind(*expect_action + "(", 0) == 0;
        }))
      fail("expected the plan for " + name + " to use " + *expect_action);
  } else if (op == "execute") {
    need(w, 2, "execute PROBLEM [expect-fail]");
    const bool expect_fail = w.size() > 2 && w[2] == "expect-fail";
    ExecutionResult r = s.execute(w[1]);
    for (std::size_t i = 0; i < r.trace.steps.size(); ++i) {
      const auto& st = r.trace.steps[i];
      out_ << "  executed " << st.action.label() << "\n";
      for (const auto& f : st.flags) out_ << "    flag: " << f << "\n";
    }
    if (r.trace.failure) {
      out_ << "execution failed at step " << r.trace.failure->step << ": "
           << r.trace.failure->message << "\n";
      if (!expect_fail) fail("execution of " + w[1] + " failed: " + r.trace.failure->message);
    } else if (expect_fail) {
      fail("expected execution of " + w[1] + " to fail");
    }
  } else if (op == "assert-state") {
    const World world = s.world();
    const WorldState truth = perceive_state(world, all_landmarks(world));
    for (std::size_t i = 1; i < w.size(); ++i) {
      const bool negated = w[i][0] == '!';
      Atom a = parse_atom(negated ? w[i].substr(1) : w[i]);
      if (truth.contains(a) == negated)
        fail("assert-state " + w[i] + " does not hold");
    }
  } else if (op == "assert-detected") {
    const LandmarkSet detected = detect_landmarks(s.world());
    for (std::size_t i = 1; i < w.size(); ++i) {
      const bool negated = w[i][0] == '!';
      const std::string id = negated ? w[i].substr(1) : w[i];
      const bool seen = std::any_of(detected.begin(), detected.end(),
                                    [&](const Landmark& l) { return l.id == id; });
      if (seen == negated) fail("assert-detected " + w[i] + " does not hold");
    }
  } else if (op == "assert-actions") {
    need(w, 2, "assert-actions N");
    const auto n = s.knowledge().actions.size();
    if (n != to_size(w[1]))
      fail("expected " + w[1] + " actions, have " + std::to_string(n));
  } else if (op == "assert-pre") {
    need(w, 3, "assert-pre ACTION ATOM");
    if (!s.knowledge().action(w[1]).pre.contains(parse_atom(w[2])))
      fail(w[1] + " has no precondition " + w[2]);
  } else if (op == "state") {
    const World world = s.world();
    out_ << to_string(perceive_state(world, detect_landmarks(world))) << "\n";
  } else if (op == "actions") {
    for (const auto& [name, _] : s.knowledge().actions) out_ << name << "\n";
  } else if (op == "show") {
    need(w, 2, "show ACTION");
    const KnowledgeBase kb = s.knowledge();
    out_ << Json(kb.action(w[1])).dump(2) << "\n";
  } else if (op == "plan") {
    need(w, 2, "plan PROBLEM");
    auto plan = s.last_plan(w[1]);
    if (!plan) fail("no plan for " + w[1]);
    out_ << pddl::emit_plan(to_steps(*plan));
  } else if (op == "debug") {
    const DebugReport r = s.debug_report();
    if (r.empty()) out_ << "no hints\n";
    for (const auto& h : r.hints)
      out_ << "[" << to_string(h.category) << "] " << h.message << ": "
           << join(h.subjects, ", ") << "\n";
  } else if (op == "export") {
    need(w, 2, "export DIR|FILE.pddl");
    const fs::path target = path_arg(1);
    const KnowledgeBase kb = s.knowledge();
    if (target.extension() == ".pddl") {
      write_file(target, pddl::emit_domain(kb));
    } else {
      fs::create_directories(target);
      write_file(target / "domain.pddl", pddl::emit_domain(kb));
      for (const auto& [name, p] : s.problems())
        write_file(target / (name + ".pddl"), pddl::emit_problem(p));
    }
    out_ << "exported " << target.string() << "\n";
  } else if (op == "import") {
    need(w, 2, "import DOMAIN.pddl");
    auto parsed = pddl::parse_domain(read_file(path_arg(1)));
    Json project = s.project();
    project["knowledge"] = parsed.kb;
    s.load_project(project);
    out_ << "imported " << parsed.kb.actions.size() << " action(s) from domain "
         << parsed.name << "\n";
  } else if (op == "save") {
    need(w, 2, "save FILE");
    write_file(path_arg(1), s.project().dump(2) + "\n");
  } else if (op == "load") {
    need(w, 2, "load FILE");
    s.load_project(Json::parse(read_file(path_arg(1))));
  } else {
    fail("unknown command '" + op + "'");
  }
}

ScenarioReport run_scenario(const fs::path& path, const ScenarioOptions& options,
                            std::ostream& log) {
  const auto t0 = Clock::now();
  Interpreter interp(options, log);
  try {
    interp.run_file(path);
  } catch (const std::exception& e) {
    interp.report().passed = false;
    interp.report().failure = e.what();
  }
  ScenarioReport report = interp.report();
  report.scenario = path.filename().string();
  for (const auto& [name, _] : interp.session().knowledge().actions)
    report.actions.push_back(name);
  report.wall_ms = ms_since(t0);
  return report;
}

bool BenchResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BenchCheck& c) { return c.ok; });
}

namespace {

const TaskReport* last_solve(const ScenarioReport& report, const std::string& problem) {
  const TaskReport* found = nullptr;
  for (const auto& t : report.tasks)
    if (t.problem == problem) found = &t;
  return found;
}

}  // namespace

BenchResult run_bench(const fs::path& script, const ScenarioOptions& options,
                      std::ostream& log, double time_limit_ms) {
  BenchResult out;
  const auto t0 = Clock::now();
  Interpreter interp(options, log);
  try {
    interp.run_file(script);
  } catch (const std::exception& e) {
    interp.report().passed = false;
    interp.report().failure = e.what();
  }
  out.report = interp.report();
  out.report.scenario = script.filename().string();
  out.knowledge = interp.session().knowledge();
  for (const auto& [name, _] : out.knowledge.actions) out.report.actions.push_back(name);
  out.report.wall_ms = ms_since(t0);

  auto check = [&](std::string name, bool ok, std::string detail) {
    out.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  check("script", out.report.passed, out.report.failure);
  for (int i = 3; i <= 8; ++i) {
    const std::string task = "task" + std::to_string(i);
    const TaskReport* t = last_solve(out.report, task);
    check(task + " solved", t && t->solved, t ? "" : "no solve recorded");
  }
  for (const auto& [task, expected] : {std::pair{"task3", 3u}, std::pair{"task8", 3u}}) {
    const TaskReport* t = last_solve(out.report, task);
    const std::size_t got = t ? t->plan_length : 0;
    check(std::string(task) + " length " + std::to_string(expected), t && got == expected,
          "got " + std::to_string(got));
  }
  const auto& actions = out.knowledge.actions;
  check("two schemas", actions.size() == 2, std::to_string(actions.size()) + " schema(s)");
  const Atom flat{"flat", {"?o"}};
  const Atom thin{"thin", {"?o"}};
  const bool suction = std::any_of(actions.begin(), actions.end(), [&](const auto& kv) {
    return kv.second.arm == Arm::suction && kv.second.pre.contains(flat);
  });
  const bool claw = std::any_of(actions.begin(), actions.end(), [&](const auto& kv) {
    return kv.second.arm == Arm::claw && kv.second.pre.contains(thin);
  });
  check("suction move needs flat(?o)", suction, "");
  check("claw move needs thin(?o)", claw, "");
  std::ostringstream ms;
  ms.precision(1);
  ms << std::fixed << out.report.wall_ms << " ms";
  check("under time limit", out.report.wall_ms < time_limit_ms, ms.str());
  return out;
}

std::string bench_markdown(const BenchResult& result) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed;
  out << "| task | problem | solved | length | expanded | ms | plan |\n"
      << "|---|---|---|---|---|---|---|\n";
  for (const auto& t : result.report.tasks)
    out << "| " << t.task << " | " << t.problem << " | " << (t.solved ? "yes" : "no") << " | "
        << t.plan_length << " | " << t.expanded << " | " << t.wall_ms << " | "
        << join(t.plan, " ") << " |\n";
  out << "\n| check | result | detail |\n|---|---|---|\n";
  for (const auto& c : result.checks)
    out << "| " << c.name << " | " << (c.ok ? "pass" : "FAIL") << " | " << c.detail << " |\n";
  out << "\ntotal " << result.report.wall_ms << " ms, schemas: "
      << join(result.report.actions, ", ") << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Tower of Hanoi

std::string hanoi_disk(int i) { return "d" + std::to_string(i); }

SceneSpec hanoi_scene(int disks) {
  if (disks < 1 || disks > 20) throw Error(ErrorCode::InvalidScene, "disks must be in 1..20");
  SceneSpec spec;
  spec.config.grid = {{"A", {0.0, 0.0, 0.0}}, {"B", {0.3, 0.0, 0.0}}, {"C", {0.6, 0.0, 0.0}}};
  spec.config.stacking = StackingRule::smaller_footprint;
  for (int i = disks; i >= 1; --i) {
    const double w = 0.085 + 0.01 * i;
    ObjectPlacement o;
    o.id = hanoi_disk(i);
    o.bbox = {w, w, 0.02};
    o.on = i == disks ? std::string("A") : hanoi_disk(i + 1);
    spec.objects.push_back(o);
  }
  return spec;
}

ActionModel hanoi_move() {
  ActionModel m;
  m.name = "move";
  m.params = {{"?o", "object"}, {"?from", "element"}, {"?to", "element"}};
  m.pre = {Atom{"on", {"?o", "?from"}}, Atom{"clear", {"?o"}}, Atom{"clear", {"?to"}},
           Atom{"stackable", {"?o", "?to"}}};
  m.eff_add = {Atom{"on", {"?o", "?to"}}, Atom{"clear", {"?from"}}};
  m.eff_del = {Atom{"on", {"?o", "?from"}}, Atom{"clear", {"?to"}}};
  m.keyframes = {{Gripper::open, "?o", {{0, 0, 0.10}, {}}},
                 {Gripper::closed, "?o", {{0, 0, 0.0}, {}}},
                 {Gripper::closed, "?to", {{0, 0, 0.10}, {}}},
                 {Gripper::open, "?to", {{0, 0, 0.03}, {}}}};
  return m;
}

AtomSet hanoi_goal(int disks) {
  AtomSet goal{Atom{"on", {hanoi_disk(disks), "C"}}};
  for (int i = 1; i < disks; ++i) goal.insert(Atom{"on", {hanoi_disk(i), hanoi_disk(i + 1)}});
  return goal;
}

}  // namespace iroplan

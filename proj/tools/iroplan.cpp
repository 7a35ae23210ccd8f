#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "iroplan/pddl.hpp"
#include "iroplan/scenario.hpp"

namespace fs = std::filesystem;
using namespace iroplan;

namespace {

#ifndef IROPLAN_DATA_DIR
#define IROPLAN_DATA_DIR "data"
#endif

fs::path data_dir() {
  if (const char* env = std::getenv("IROPLAN_DATA_DIR")) return env;
  return IROPLAN_DATA_DIR;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadRequest, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::BadRequest, "cannot write " + path.string());
  out << text;
}

struct GlobalFlags {
  std::string scene;
  std::string strategy = "greedy_ff";
  std::size_t budget_nodes = 1'000'000;
  double budget_secs = 10.0;
  bool occlude_stacked = false;
  bool no_condition_inference = false;
  std::string json_report;

  SearchOptions search() const {
    SearchOptions s;
    s.strategy = parse_strategy(strategy);
    s.node_budget = budget_nodes;
    s.time_budget = std::chrono::milliseconds(static_cast<long long>(budget_secs * 1000.0));
    return s;
  }

  ScenarioOptions scenario() const {
    ScenarioOptions o;
    o.search = search();
    o.occlude_stacked = occlude_stacked;
    o.condition_inference = !no_condition_inference;
    if (const char* ext = std::getenv("IROPLAN_EXTERNAL_PLANNER")) o.external_planner = ext;
    if (!scene.empty()) o.scene = scene;
    return o;
  }
};

void write_report(const GlobalFlags& g, const Json& report) {
  if (!g.json_report.empty()) write_file(g.json_report, report.dump(2) + "\n");
}

int cmd_run(const GlobalFlags& g, const std::string& script) {
  ScenarioReport report = run_scenario(script, g.scenario(), std::cout);
  write_report(g, report);
  if (!report.passed) {
    std::cerr << "FAILED: " << report.failure << "\n";
    return 1;
  }
  std::cout << "passed " << report.scenario << " (" << report.tasks.size() << " solve(s))\n";
  return 0;
}

int cmd_bench(const GlobalFlags& g, const std::string& script, bool verbose) {
  std::ostringstream sink;
  BenchResult r = run_bench(script, g.scenario(), verbose ? std::cerr : sink);
  std::cout << bench_markdown(r);
  Json report = r.report;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  report["checks"] = checks;
  write_report(g, report);
  return r.passed() ? 0 : 1;
}

int cmd_hanoi(const GlobalFlags& g, int disks) {
  World world = load_scene(hanoi_scene(disks));
  KnowledgeBase kb;
  kb.actions["move"] = hanoi_move();
  PlanningProblem problem =
      problem_from_world(world, "hanoi" + std::to_string(disks), hanoi_goal(disks));
  PlanOutcome out = plan(kb, problem, g.search());
  Json report{{"schema_version", kSchemaVersion},
              {"disks", disks},
              {"strategy", g.strategy},
              {"solved", out.solved()}};
  if (!out.plan) {
    std::cout << "no plan: " << to_string(out.failure->reason) << " " << out.failure->detail << "\n";
    report["reason"] = to_string(out.failure->reason);
    write_report(g, report);
    return 1;
  }
  const PlanValidation v = validate_plan(kb, problem, *out.plan);
  std::cout << pddl::emit_plan(to_steps(*out.plan));
  std::cout << "length " << out.plan->size() << ", expanded " << out.plan->stats.expanded
            << ", " << out.plan->stats.runtime.count() / 1000.0 << " ms, "
            << (v.valid ? "valid" : "INVALID: " + v.reason) << "\n";
  report["plan"] = *out.plan;
  report["valid"] = v.valid;
  write_report(g, report);
  return v.valid ? 0 : 1;
}

int cmd_solve(const GlobalFlags& g, const std::string& domain, const std::string& problem_path) {
  auto parsed = pddl::parse_domain(read_file(domain));
  PlanningProblem problem = pddl::parse_problem(read_file(problem_path));
  PlanOutcome out = plan(parsed.kb, problem, g.search());
  if (!out.plan) {
    std::cerr << "no plan: " << to_string(out.failure->reason) << "\n";
    return 1;
  }
  std::cout << pddl::emit_plan(to_steps(*out.plan));
  return 0;
}

int cmd_export(const std::string& project_path, const std::string& out_dir) {
  Session session("export", World{});
  session.load_project(Json::parse(read_file(project_path)));
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "domain.pddl", pddl::emit_domain(session.knowledge()));
  for (const auto& [name, p] : session.problems())
    write_file(fs::path(out_dir) / (name + ".pddl"), pddl::emit_problem(p));
  std::cout << "exported " << session.knowledge().actions.size() << " action(s) and "
            << session.problems().size() << " problem(s) to " << out_dir << "\n";
  return 0;
}

int cmd_import(const std::string& domain, const std::string& problem_path,
               const std::string& plan_path) {
  auto parsed = pddl::parse_domain(read_file(domain));
  std::cout << "domain " << parsed.name << ": " << parsed.kb.actions.size() << " action(s)\n";
  for (const auto& [name, _] : parsed.kb.actions) std::cout << "  " << name << "\n";
  if (problem_path.empty()) return 0;
  PlanningProblem problem = pddl::parse_problem(read_file(problem_path));
  validate_problem(parsed.kb, problem);
  std::cout << "problem " << problem.name << ": " << problem.objects.size() << " object(s), goal "
            << to_string(problem.goal) << "\n";
  if (plan_path.empty()) return 0;
  const auto steps = pddl::parse_plan(read_file(plan_path));
  const PlanValidation v = validate_plan(parsed.kb, problem, steps);
  if (v.valid) {
    std::cout << "plan valid (" << steps.size() << " step(s))\n";
    return 0;
  }
  std::cout << "plan invalid";
  if (v.failed_step) std::cout << " at step " << *v.failed_step;
  std::cout << ": " << v.reason << "\n";
  return 1;
}

int cmd_repl(const GlobalFlags& g) {
  Interpreter interp(g.scenario(), std::cout);
  const fs::path base = fs::current_path();
  std::string line;
  std::cout << "iroplan> " << std::flush;
  while (std::getline(std::cin, line)) {
    if (line == "quit" || line == "exit") break;
    try {
      interp.feed(line, base);
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
    std::cout << (interp.in_block() ? "...> " : "iroplan> ") << std::flush;
  }
  std::cout << "\n";
  return 0;
}

std::atomic<bool> g_stop{false};

int cmd_serve(const GlobalFlags& g, const std::string& host, int port) {
  SessionOptions defaults;
  defaults.condition_inference = !g.no_condition_inference;
  defaults.search = g.search();
  Service service(defaults);
  HttpServer server(service);
  const int bound = server.start(host, port);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iroplan: teach robot actions by demonstration, then plan and execute"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--scene", g.scene, "Scene JSON loaded before the script");
  app.add_option("--strategy", g.strategy, "greedy_ff | astar_uniform | bfs_oracle")
      ->check(CLI::IsMember({"greedy_ff", "astar_uniform", "bfs_oracle"}));
  app.add_option("--budget-nodes", g.budget_nodes, "Node expansion budget");
  app.add_option("--budget-secs", g.budget_secs, "Search time budget in seconds");
  app.add_flag("--occlude-stacked", g.occlude_stacked, "Hide objects that have something on top");
  app.add_flag("--no-condition-inference", g.no_condition_inference,
               "Demonstrations record keyframes but no conditions");
  app.add_option("--json-report", g.json_report, "Write a JSON report to this path");
  app.fallthrough();

  std::string script;
  auto* run = app.add_subcommand("run", "Run a scenario script");
  run->add_option("script", script, "Scenario file")->required()->check(CLI::ExistingFile);

  std::string bench_script = (data_dir() / "scenarios" / "task8.scn").string();
  bool verbose = false;
  auto* bench = app.add_subcommand("bench", "Run the Tasks 3-8 benchmark");
  bench->add_option("--script", bench_script, "Benchmark script")->check(CLI::ExistingFile);
  bench->add_flag("-v,--verbose", verbose, "Print the scenario log to stderr");

  int disks = 3;
  auto* hanoi = app.add_subcommand("hanoi", "Solve the Tower of Hanoi");
  hanoi->add_option("disks", disks, "Number of disks")->check(CLI::Range(1, 20));

  std::string domain, problem, plan_file;
  auto* solve = app.add_subcommand("solve", "Plan for a PDDL domain and problem");
  solve->add_option("--domain", domain)->required()->check(CLI::ExistingFile);
  solve->add_option("--problem", problem)->required()->check(CLI::ExistingFile);

  std::string project, out_dir = ".";
  auto* exp = app.add_subcommand("export", "Export a saved project as PDDL files");
  exp->add_option("project", project, "Project JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--out", out_dir, "Output directory");

  auto* imp = app.add_subcommand("import", "Parse PDDL files and optionally validate a plan");
  imp->add_option("domain", domain)->required()->check(CLI::ExistingFile);
  imp->add_option("--problem", problem)->check(CLI::ExistingFile);
  imp->add_option("--plan", plan_file)->check(CLI::ExistingFile)->needs("--problem");

  auto* repl = app.add_subcommand("repl", "Interactive teach/solve loop");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Start the REST service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(g, script);
    if (*bench) return cmd_bench(g, bench_script, verbose);
    if (*hanoi) return cmd_hanoi(g, disks);
    if (*solve) return cmd_solve(g, domain, problem);
    if (*exp) return cmd_export(project, out_dir);
    if (*imp) return cmd_import(domain, problem, plan_file);
    if (*repl) return cmd_repl(g);
    if (*serve) return cmd_serve(g, host, port);
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

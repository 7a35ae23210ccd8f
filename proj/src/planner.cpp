#include "iroplan/planner.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "compiled_task.hpp"
#include "iroplan/errors.hpp"

namespace iroplan {

const TypedObject* PlanningProblem::find_object(std::string_view name) const {
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const auto& o) { return o.name == name; });
  return it == objects.end() ? nullptr : &*it;
}

std::string GroundAction::label() const {
  return to_string(Atom{schema, args});
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::greedy_ff: return "greedy_ff";
    case Strategy::astar_uniform: return "astar_uniform";
    case Strategy::bfs_oracle: return "bfs_oracle";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "greedy_ff") return Strategy::greedy_ff;
  if (text == "astar_uniform") return Strategy::astar_uniform;
  if (text == "bfs_oracle") return Strategy::bfs_oracle;
  throw Error(ErrorCode::BadRequest,
              "unknown strategy '" + std::string(text) + "'");
}

std::string_view to_string(NoPlanReason r) {
  switch (r) {
    case NoPlanReason::exhausted: return "exhausted";
    case NoPlanReason::budget_exceeded: return "budget_exceeded";
    case NoPlanReason::goal_inconsistent: return "goal_inconsistent";
    case NoPlanReason::cancelled: return "cancelled";
  }
  return "unknown";
}

WorldState progress(const WorldState& state, const AtomSet& eff_add,
                    const AtomSet& eff_del) {
  return set_union(set_difference(state, eff_del), eff_add);
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

GroundAction bind_args(const ActionModel& model,
                  const std::vector<std::string>& args) {
  std::map<std::string, std::string> sub;
  for (std::size_t i = 0; i < model.params.size(); ++i)
    sub[model.params[i].name] = args[i];
  return {model.name, args, ground_atoms(model.pre, sub),
          ground_atoms(model.eff_add, sub), ground_atoms(model.eff_del, sub)};
}

}  // namespace

std::vector<GroundAction> ground(const KnowledgeBase& kb,
                                 std::span<const TypedObject> objects) {
  std::vector<GroundAction> out;
  for (const auto& [name, model] : kb.actions) {
    std::vector<std::vector<std::string>> candidates;
    for (const auto& p : model.params) {
      std::vector<std::string> c;
      for (const auto& o : objects) {
        if (kb.hierarchy.is_subtype(o.type, p.type)) c.push_back(o.name);
      }
      std::sort(c.begin(), c.end());
      candidates.push_back(std::move(c));
    }

    std::vector<std::string> args(model.params.size());
    std::set<std::string> used;
    auto recurse = [&](auto&& self, std::size_t i) -> void {
      if (i == args.size()) {
        out.push_back(bind_args(model, args));
        return;
      }
      for (const auto& c : candidates[i]) {
        if (used.contains(c)) continue;
        used.insert(c);
        args[i] = c;
        self(self, i + 1);
        used.erase(c);
      }
    };
    recurse(recurse, 0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

GroundAction instantiate(const KnowledgeBase& kb,
                         std::span<const TypedObject> objects,
                         const PlanStep& step) {
  const ActionModel& model = kb.action(step.schema);
  if (step.args.size() != model.params.size())
    throw Error(ErrorCode::InvalidModel,
                step.schema + " expects " +
                    std::to_string(model.params.size()) + " arguments");
  for (std::size_t i = 0; i < step.args.size(); ++i) {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const auto& o) {
      return o.name == step.args[i];
    });
    if (it == objects.end())
      throw Error(ErrorCode::UndeclaredConstant,
                  "undeclared object '" + step.args[i] + "'");
    if (!kb.hierarchy.is_subtype(it->type, model.params[i].type))
      throw Error(ErrorCode::InvalidModel,
                  "'" + it->name + "' of type " + it->type +
                      " does not fit parameter " + model.params[i].name +
                      " - " + model.params[i].type);
  }
  return bind_args(model, step.args);
}

void validate_problem(const KnowledgeBase& kb, const PlanningProblem& problem) {
  std::set<std::string> names;
  for (const auto& o : problem.objects) {
    if (!names.insert(o.name).second)
      throw Error(ErrorCode::DuplicateName,
                  "object '" + o.name + "' declared twice");
    if (!kb.hierarchy.contains(o.type))
      throw Error(ErrorCode::UnknownType,
                  "object '" + o.name + "' has unknown type '" + o.type + "'");
  }
  for (const AtomSet* set : {&problem.init, &problem.goal}) {
    for (const auto& atom : *set) {
      for (const auto& arg : atom.args) {
        if (!names.contains(arg))
          throw Error(ErrorCode::UndeclaredConstant,
                      to_string(atom) + " mentions undeclared object '" + arg +
                          "'");
      }
    }
  }
  for (const auto& [name, model] : kb.actions) {
    auto diags = validate_action_model(model, kb.hierarchy);
    for (const auto& d : diags) {
      if (d.severity == Severity::error)
        throw Error(ErrorCode::InvalidModel, name + ": " + d.message);
    }
  }
}

// ---------------------------------------------------------------------------
// Search

namespace {

using detail::CompiledTask;
using detail::RelaxedPlanner;
using detail::StateBits;
using detail::StateBitsHash;
using Clock = std::chrono::steady_clock;

/// Drops actions whose preconditions can never hold: facts absent from init
/// that no action adds.
std::vector<GroundAction> prune_static(std::vector<GroundAction> actions,
                                       const WorldState& init) {
  AtomSet addable;
  for (const auto& a : actions) addable.insert(a.eff_add.begin(), a.eff_add.end());
  std::erase_if(actions, [&](const GroundAction& a) {
    return std::any_of(a.pre.begin(), a.pre.end(), [&](const Atom& p) {
      return !init.contains(p) && !addable.contains(p);
    });
  });
  return actions;
}

struct Node {
  StateBits state;
  std::uint32_t parent;
  std::uint32_t action;
  std::uint32_t depth;
};

constexpr std::uint32_t kRoot = 0xffffffffU;
constexpr std::size_t kCheckEvery = 128;

class Search {
 public:
  Search(const CompiledTask& task, const SearchOptions& options)
      : task_(task), options_(options), start_(Clock::now()) {}

  std::optional<NoPlanReason> check_limits() {
    if (stats.expanded >= options_.node_budget)
      return NoPlanReason::budget_exceeded;
    if (stats.expanded % kCheckEvery == 0) {
      if (options_.cancel.stop_requested()) return NoPlanReason::cancelled;
      if (Clock::now() - start_ > options_.time_budget)
        return NoPlanReason::budget_exceeded;
      if (options_.on_progress && stats.expanded > 0)
        options_.on_progress(stats.expanded);
    }
    return std::nullopt;
  }

  std::vector<std::uint32_t> path_to(std::uint32_t node) const {
    std::vector<std::uint32_t> out;
    for (auto n = node; nodes[n].parent != kRoot; n = nodes[n].parent)
      out.push_back(nodes[n].action);
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::uint32_t add_node(StateBits s, std::uint32_t parent, std::uint32_t action,
                         std::uint32_t depth) {
    nodes.push_back({std::move(s), parent, action, depth});
    ++stats.generated;
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }

  const CompiledTask& task_;
  const SearchOptions& options_;
  Clock::time_point start_;
  std::vector<Node> nodes;
  SearchStats stats;
};

using SearchResult = std::pair<std::optional<std::vector<std::uint32_t>>,
                               std::optional<NoPlanReason>>;

/// Best-first search with duplicate detection deferred to expansion time.
/// `priority(node)` returns nullopt for dead ends.
template <typename PriorityFn>
SearchResult best_first(Search& search, const StateBits& init,
                        PriorityFn&& priority) {
  const auto& task = search.task_;
  using Entry = std::tuple<std::size_t, std::uint64_t, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::unordered_set<StateBits, StateBitsHash> closed;
  std::uint64_t seq = 0;

  auto root = search.add_node(init, kRoot, 0, 0);
  if (auto p = priority(root)) open.emplace(*p, seq++, root);

  while (!open.empty()) {
    auto [_, __, id] = open.top();
    open.pop();
    if (closed.contains(search.nodes[id].state)) continue;
    closed.insert(search.nodes[id].state);
    if (task.satisfies_goal(search.nodes[id].state))
      return {search.path_to(id), std::nullopt};
    if (auto stop = search.check_limits()) return {std::nullopt, stop};
    ++search.stats.expanded;

    for (std::uint32_t a = 0; a < task.actions().size(); ++a) {
      if (!task.applicable(search.nodes[id].state, a)) continue;
      StateBits child = task.apply(search.nodes[id].state, a);
      if (closed.contains(child)) continue;
      auto cid = search.add_node(std::move(child), id, a,
                                 search.nodes[id].depth + 1);
      if (auto p = priority(cid)) open.emplace(*p, seq++, cid);
    }
  }
  return {std::nullopt, NoPlanReason::exhausted};
}

/// Plain breadth-first search; kept separate from best_first so it can serve
/// as an oracle for it.
SearchResult breadth_first(Search& search, const StateBits& init) {
  const auto& task = search.task_;
  std::unordered_set<StateBits, StateBitsHash> visited{init};
  std::deque<std::uint32_t> queue{search.add_node(init, kRoot, 0, 0)};
  while (!queue.empty()) {
    auto id = queue.front();
    queue.pop_front();
    if (task.satisfies_goal(search.nodes[id].state))
      return {search.path_to(id), std::nullopt};
    if (auto stop = search.check_limits()) return {std::nullopt, stop};
    ++search.stats.expanded;
    for (std::uint32_t a = 0; a < task.actions().size(); ++a) {
      if (!task.applicable(search.nodes[id].state, a)) continue;
      StateBits child = task.apply(search.nodes[id].state, a);
      if (!visited.insert(child).second) continue;
      queue.push_back(search.add_node(std::move(child), id, a,
                                      search.nodes[id].depth + 1));
    }
  }
  return {std::nullopt, NoPlanReason::exhausted};
}

}  // namespace

PlanOutcome plan(const KnowledgeBase& kb, const PlanningProblem& problem,
                 const SearchOptions& options) {
  validate_problem(kb, problem);
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() -
                                                                 start);
  };

  auto contradictions = check_goal_consistency(problem.goal);
  if (!contradictions.empty()) {
    NoPlanFound f{NoPlanReason::goal_inconsistent,
                  contradictions.front().message, contradictions, {}};
    f.stats.runtime = elapsed();
    return {std::nullopt, std::move(f)};
  }

  auto actions = prune_static(ground(kb, problem.objects), problem.init);
  CompiledTask task(actions, problem.init, problem.goal);
  const StateBits init = task.encode(problem.init);

  Search search(task, options);
  search.stats.ground_actions = actions.size();
  SearchResult result;
  switch (options.strategy) {
    case Strategy::greedy_ff: {
      RelaxedPlanner relaxed(task);
      result = best_first(search, init,
                          [&](std::uint32_t id) -> std::optional<std::size_t> {
                            auto rp = relaxed.extract(search.nodes[id].state);
                            if (!rp) return std::nullopt;
                            return rp->size();
                          });
      break;
    }
    case Strategy::astar_uniform:
      result = best_first(search, init,
                          [&](std::uint32_t id) -> std::optional<std::size_t> {
                            return search.nodes[id].depth;
                          });
      break;
    case Strategy::bfs_oracle:
      result = breadth_first(search, init);
      break;
  }
  search.stats.runtime = elapsed();

  if (!result.first) {
    std::string detail;
    switch (*result.second) {
      case NoPlanReason::exhausted:
        detail = "search space exhausted without reaching the goal";
        break;
      case NoPlanReason::budget_exceeded:
        detail = "node or time budget exceeded";
        break;
      case NoPlanReason::cancelled:
        detail = "search cancelled";
        break;
      case NoPlanReason::goal_inconsistent:
        break;
    }
    return {std::nullopt,
            NoPlanFound{*result.second, std::move(detail), {}, search.stats}};
  }

  Plan out;
  out.stats = search.stats;
  for (auto a : *result.first) out.steps.push_back(actions[a]);
  return {std::move(out), std::nullopt};
}

std::vector<PlanStep> to_steps(const Plan& plan) {
  std::vector<PlanStep> out;
  for (const auto& s : plan.steps) out.push_back({s.schema, s.args});
  return out;
}

// ---------------------------------------------------------------------------
// Validation

PlanValidation validate_plan(const KnowledgeBase& kb,
                             const PlanningProblem& problem,
                             std::span<const PlanStep> steps) {
  PlanValidation out;
  WorldState state = problem.init;
  auto invalid = [&](std::size_t i, std::string reason, AtomSet missing = {}) {
    out.valid = false;
    out.failed_step = i;
    out.reason = std::move(reason);
    out.missing = std::move(missing);
    out.final_state = state;
    return out;
  };

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    auto it = kb.actions.find(step.schema);
    if (it == kb.actions.end())
      return invalid(i, "unknown action '" + step.schema + "'");
    const ActionModel& model = it->second;
    if (model.params.size() != step.args.size())
      return invalid(i, "wrong number of arguments for " + step.schema);

    std::map<std::string, std::string> sub;
    std::set<std::string> distinct;
    for (std::size_t k = 0; k < step.args.size(); ++k) {
      const TypedObject* obj = problem.find_object(step.args[k]);
      if (!obj) return invalid(i, "undeclared object '" + step.args[k] + "'");
      if (!kb.hierarchy.is_subtype(obj->type, model.params[k].type))
        return invalid(i, "'" + obj->name + "' is not a " + model.params[k].type);
      if (!distinct.insert(step.args[k]).second)
        return invalid(i, "'" + step.args[k] + "' bound to two parameters");
      sub.emplace(model.params[k].name, step.args[k]);
    }

    auto substitute = [&](const AtomSet& lifted) {
      AtomSet g;
      for (const auto& atom : lifted) {
        Atom a{atom.predicate, {}};
        for (const auto& t : atom.args) {
          auto found = sub.find(t);
          a.args.push_back(found == sub.end() ? t : found->second);
        }
        g.insert(std::move(a));
      }
      return g;
    };

    AtomSet missing;
    for (const auto& p : substitute(model.pre)) {
      if (!state.contains(p)) missing.insert(p);
    }
    if (!missing.empty())
      return invalid(i, "preconditions do not hold", std::move(missing));

    for (const auto& d : substitute(model.eff_del)) state.erase(d);
    for (const auto& a : substitute(model.eff_add)) state.insert(a);
  }

  AtomSet unmet;
  for (const auto& g : problem.goal) {
    if (!state.contains(g)) unmet.insert(g);
  }
  if (!unmet.empty()) {
    invalid(0, "goal not reached", std::move(unmet));
    out.failed_step.reset();
    return out;
  }

  out.valid = true;
  out.final_state = std::move(state);
  return out;
}

PlanValidation validate_plan(const KnowledgeBase& kb,
                             const PlanningProblem& problem, const Plan& plan) {
  auto steps = to_steps(plan);
  return validate_plan(kb, problem, steps);
}

}  // namespace iroplan

#include <algorithm>
#include <set>

#include "iroplan/service.hpp"

namespace iroplan {

std::string_view to_string(HintCategory c) {
  switch (c) {
    case HintCategory::parameters: return "parameters";
    case HintCategory::preconditions: return "preconditions";
    case HintCategory::effects: return "effects";
    case HintCategory::initial_state: return "initial_state";
    case HintCategory::goal: return "goal";
  }
  return "unknown";
}

bool DebugReport::has(HintCategory c) const {
  for (const auto& h : hints) {
    if (h.category == c) return true;
  }
  return false;
}

namespace {

/// Facts reachable from `init` when delete effects are ignored.
WorldState relaxed_closure(const WorldState& init,
                           const std::vector<GroundAction>& actions) {
  WorldState facts = init;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& a : actions) {
      if (!is_subset(a.pre, facts)) continue;
      for (const auto& f : a.eff_add) grew |= facts.insert(f).second;
    }
  }
  return facts;
}

/// True when one of `m`'s add effects would produce `fact` under some
/// binding of its variables, but the binding violates a parameter type.
bool type_blocks(const KnowledgeBase& kb, const PlanningProblem& problem,
                 const ActionModel& m, const Atom& fact) {
  for (const auto& a : m.eff_add) {
    if (a.predicate != fact.predicate || a.args.size() != fact.args.size()) continue;
    std::map<std::string, std::string> binding;
    bool matches = true;
    for (std::size_t i = 0; i < a.args.size() && matches; ++i) {
      if (m.find_param(a.args[i])) {
        auto [it, fresh] = binding.emplace(a.args[i], fact.args[i]);
        matches = fresh || it->second == fact.args[i];
      } else {
        matches = a.args[i] == fact.args[i];
      }
    }
    if (!matches) continue;
    for (const auto& [var, constant] : binding) {
      const TypedObject* o = problem.find_object(constant);
      const TypedVariable* p = m.find_param(var);
      if (o && kb.hierarchy.contains(o->type) && kb.hierarchy.contains(p->type) &&
          !kb.hierarchy.is_subtype(o->type, p->type))
        return true;
    }
  }
  return false;
}

}  // namespace

DebugReport generate_debug_report(const KnowledgeBase& kb,
                                  const PlanningProblem& problem,
                                  const PlanOutcome& outcome) {
  DebugReport report;
  if (outcome.solved()) return report;

  const std::vector<GroundAction> grounded = ground(kb, problem.objects);
  std::set<std::string> added_predicates;
  for (const auto& [_, m] : kb.actions) {
    for (const auto& a : m.eff_add) added_predicates.insert(a.predicate);
  }

  // (a) effects: a goal fact no action can ever add.
  DebugHint effects{HintCategory::effects, std::string(hints::kEffects), {}};
  for (const auto& g : problem.goal) {
    if (problem.init.contains(g)) continue;
    if (!added_predicates.contains(g.predicate))
      effects.subjects.push_back(to_string(g));
  }

  // (b) parameters: actions without instances, and goal facts only the
  // parameter types keep out of reach.
  DebugHint parameters{HintCategory::parameters,
                       std::string(hints::kParameters), {}};
  std::map<std::string, std::size_t> instances;
  for (const auto& ga : grounded) ++instances[ga.schema];
  for (const auto& [name, _] : kb.actions) {
    if (!instances.contains(name)) parameters.subjects.push_back(name);
  }
  const WorldState reachable = relaxed_closure(problem.init, grounded);
  std::set<std::string> blocked_actions;
  for (const auto& g : problem.goal) {
    if (problem.init.contains(g) || !added_predicates.contains(g.predicate))
      continue;
    bool achievable = false;
    bool any_adder = false;
    for (const auto& ga : grounded) {
      if (!ga.eff_add.contains(g)) continue;
      any_adder = true;
      if (is_subset(ga.pre, reachable)) {
        achievable = true;
        break;
      }
    }
    if (achievable) continue;
    bool type_blocked = false;
    for (const auto& [name, m] : kb.actions) {
      if (type_blocks(kb, problem, m, g)) {
        type_blocked = true;
        blocked_actions.insert(name);
      }
    }
    if (!any_adder || type_blocked) parameters.subjects.push_back(to_string(g));
  }
  for (const auto& name : blocked_actions) {
    if (std::find(parameters.subjects.begin(), parameters.subjects.end(), name) ==
        parameters.subjects.end())
      parameters.subjects.push_back(name);
  }

  // (c) goal: contradicting goal states.
  DebugHint goal{HintCategory::goal, std::string(hints::kGoal), {}};
  auto contradictions = check_goal_consistency(problem.goal);
  if (outcome.failure && !outcome.failure->contradictions.empty())
    contradictions = outcome.failure->contradictions;
  for (const auto& c : contradictions)
    goal.subjects.push_back(to_string(c.first) + " / " + to_string(c.second));

  // (d) initial state: a declared object that is not on anything.
  DebugHint initial{HintCategory::initial_state,
                    std::string(hints::kInitialState), {}};
  for (const auto& o : problem.objects) {
    if (!kb.hierarchy.contains(types::kObject) ||
        !kb.hierarchy.is_subtype(o.type, types::kObject))
      continue;
    bool placed = false;
    for (const auto& f : problem.init) {
      if (f.predicate == "on" && !f.args.empty() && f.args[0] == o.name) {
        placed = true;
        break;
      }
    }
    if (!placed) initial.subjects.push_back(o.name);
  }

  for (auto* h : {&effects, &parameters, &goal, &initial}) {
    if (!h->subjects.empty()) report.hints.push_back(*h);
  }

  // (e) preconditions: only when nothing above explains the failure, since
  // unsatisfiable preconditions are usually a symptom of those causes.
  if (report.empty()) {
    DebugHint pre{HintCategory::preconditions,
                  std::string(hints::kPreconditions), {}};
    std::set<std::string> usable;
    for (const auto& ga : grounded) {
      if (is_subset(ga.pre, reachable)) usable.insert(ga.schema);
    }
    for (const auto& [name, _] : kb.actions) {
      if (instances.contains(name) && !usable.contains(name))
        pre.subjects.push_back(name);
    }
    for (const auto& g : problem.goal) {
      if (!reachable.contains(g)) pre.subjects.push_back(to_string(g));
    }
    if (pre.subjects.empty() && !problem.goal.empty()) {
      pre.subjects.push_back(outcome.failure
                                 ? std::string(to_string(outcome.failure->reason))
                                 : "no plan");
    }
    if (!pre.subjects.empty()) report.hints.push_back(std::move(pre));
  }
  return report;
}

void to_json(Json& j, const DebugHint& h) {
  j = Json{{"category", to_string(h.category)},
           {"message", h.message},
           {"subjects", h.subjects}};
}

void to_json(Json& j, const DebugReport& r) {
  j = Json{{"schema_version", kSchemaVersion}, {"hints", r.hints}};
}

}  // namespace iroplan

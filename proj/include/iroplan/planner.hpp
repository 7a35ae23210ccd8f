#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "iroplan/atom.hpp"
#include "iroplan/knowledge.hpp"

namespace iroplan {

struct TypedObject {
  std::string name;
  std::string type;

  friend bool operator==(const TypedObject&, const TypedObject&) = default;
};

struct PlanningProblem {
  std::string name;
  std::vector<TypedObject> objects;
  WorldState init;
  AtomSet goal;

  const TypedObject* find_object(std::string_view name) const;
  friend bool operator==(const PlanningProblem&,
                         const PlanningProblem&) = default;
};

struct GroundAction {
  std::string schema;
  std::vector<std::string> args;
  AtomSet pre;
  AtomSet eff_add;
  AtomSet eff_del;

  /// "move(c,A,B)"
  std::string label() const;

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
  friend auto operator<=>(const GroundAction& a, const GroundAction& b) {
    if (auto c = a.schema <=> b.schema; c != 0) return c;
    return a.args <=> b.args;
  }
};

/// A step as written in a plan file, before instantiation against a domain.
struct PlanStep {
  std::string schema;
  std::vector<std::string> args;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// All type-respecting bindings with pairwise distinct constants, sorted by
/// (schema, args).
std::vector<GroundAction> ground(const KnowledgeBase& kb,
                                 std::span<const TypedObject> objects);

/// Grounds a single step. Throws UnknownAction / UndeclaredConstant /
/// InvalidModel (arity or type mismatch).
GroundAction instantiate(const KnowledgeBase& kb,
                         std::span<const TypedObject> objects,
                         const PlanStep& step);

/// FF-style relaxed plan: actions chosen backwards from the goal through a
/// relaxed planning graph built without delete effects, ordered by layer.
/// nullopt when the goal is unreachable even ignoring deletes.
std::optional<std::vector<std::size_t>> relaxed_plan(
    const WorldState& state, const AtomSet& goal,
    std::span<const GroundAction> actions);

/// Size of relaxed_plan(); nullopt stands for infinity.
std::optional<std::size_t> relaxed_plan_length(
    const WorldState& state, const AtomSet& goal,
    std::span<const GroundAction> actions);

enum class Strategy { greedy_ff, astar_uniform, bfs_oracle };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct SearchOptions {
  Strategy strategy = Strategy::greedy_ff;
  std::size_t node_budget = 1'000'000;
  std::chrono::milliseconds time_budget{10'000};
  std::stop_token cancel;
  /// Called every progress batch with the number of expanded nodes.
  std::function<void(std::size_t)> on_progress;
};

struct SearchStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t ground_actions = 0;
  std::chrono::microseconds runtime{0};
};

struct Plan {
  std::vector<GroundAction> steps;
  SearchStats stats;

  std::size_t size() const { return steps.size(); }
};

enum class NoPlanReason { exhausted, budget_exceeded, goal_inconsistent, cancelled };
std::string_view to_string(NoPlanReason r);

struct NoPlanFound {
  NoPlanReason reason;
  std::string detail;
  std::vector<Contradiction> contradictions;
  SearchStats stats;
};

struct PlanOutcome {
  std::optional<Plan> plan;
  std::optional<NoPlanFound> failure;

  bool solved() const { return plan.has_value(); }
};

/// Throws InvalidModel / UnknownType when the problem does not validate
/// against the kb.
PlanOutcome plan(const KnowledgeBase& kb, const PlanningProblem& problem,
                 const SearchOptions& options = {});

/// Checks objects are typed with known types and every init/goal constant is
/// declared. Throws on the first violation.
void validate_problem(const KnowledgeBase& kb, const PlanningProblem& problem);

struct PlanValidation {
  bool valid = false;
  std::optional<std::size_t> failed_step;  // 0-based; unset when only the goal fails
  AtomSet missing;                         // unmet preconditions or goals
  std::string reason;
  WorldState final_state;
};

/// Symbolic replay from init. Does not share code with search: each step is
/// re-instantiated from its schema name and arguments.
PlanValidation validate_plan(const KnowledgeBase& kb,
                             const PlanningProblem& problem,
                             std::span<const PlanStep> steps);
PlanValidation validate_plan(const KnowledgeBase& kb,
                             const PlanningProblem& problem, const Plan& plan);

std::vector<PlanStep> to_steps(const Plan& plan);

/// (state \ del) U add
WorldState progress(const WorldState& state, const AtomSet& eff_add,
                    const AtomSet& eff_del);

}  // namespace iroplan

#include <algorithm>

#include "compiled_task.hpp"

namespace iroplan {
namespace detail {

CompiledTask::CompiledTask(std::span<const GroundAction> actions,
                           const WorldState& init, const AtomSet& goal) {
  actions_.reserve(actions.size());
  for (const auto& ga : actions) {
    CompiledAction ca;
    for (const auto& a : ga.pre) ca.pre.push_back(intern(a));
    for (const auto& a : ga.eff_add) ca.add.push_back(intern(a));
    for (const auto& a : ga.eff_del) ca.del.push_back(intern(a));
    actions_.push_back(std::move(ca));
  }
  for (const auto& a : goal) goal_.push_back(intern(a));
  for (const auto& a : init) intern(a);

  pre_of_.assign(facts_.size(), {});
  for (std::uint32_t i = 0; i < actions_.size(); ++i) {
    for (FactId f : actions_[i].pre) pre_of_[f].push_back(i);
  }
}

FactId CompiledTask::intern(const Atom& atom) {
  auto [it, inserted] = ids_.emplace(atom, static_cast<FactId>(facts_.size()));
  if (inserted) facts_.push_back(atom);
  return it->second;
}

StateBits CompiledTask::encode(const WorldState& state) const {
  StateBits bits(facts_.size());
  for (const auto& atom : state) {
    if (auto it = ids_.find(atom); it != ids_.end()) bits.set(it->second);
  }
  return bits;
}

bool CompiledTask::applicable(const StateBits& s, std::size_t a) const {
  return std::all_of(actions_[a].pre.begin(), actions_[a].pre.end(),
                     [&](FactId f) { return s.test(f); });
}

StateBits CompiledTask::apply(const StateBits& s, std::size_t a) const {
  StateBits out = s;
  for (FactId f : actions_[a].del) out.reset(f);
  for (FactId f : actions_[a].add) out.set(f);
  return out;
}

bool CompiledTask::satisfies_goal(const StateBits& s) const {
  return std::all_of(goal_.begin(), goal_.end(),
                     [&](FactId f) { return s.test(f); });
}

RelaxedPlanner::RelaxedPlanner(const CompiledTask& task) : task_(task) {}

bool RelaxedPlanner::build(const StateBits& state, bool stop_at_goal) {
  const auto& actions = task_.actions();
  fact_level_.assign(task_.num_facts(), kUnreached);
  achiever_.assign(task_.num_facts(), kUnreached);
  action_level_.assign(actions.size(), kUnreached);
  unsatisfied_.resize(actions.size());

  std::vector<std::uint32_t> ready;
  for (std::uint32_t a = 0; a < actions.size(); ++a) {
    unsatisfied_[a] = static_cast<std::uint32_t>(actions[a].pre.size());
    if (unsatisfied_[a] == 0) ready.push_back(a);
  }

  std::vector<FactId> frontier;
  for (FactId f = 0; f < task_.num_facts(); ++f) {
    if (state.test(f)) {
      fact_level_[f] = 0;
      frontier.push_back(f);
    }
  }

  auto goal_reached = [&] {
    return std::all_of(task_.goal().begin(), task_.goal().end(),
                       [&](FactId g) { return fact_level_[g] != kUnreached; });
  };

  for (std::uint32_t level = 0;; ++level) {
    for (FactId f : frontier) {
      for (auto a : task_.pre_of()[f]) {
        if (--unsatisfied_[a] == 0) ready.push_back(a);
      }
    }
    if (stop_at_goal && goal_reached()) return true;
    if (ready.empty()) return goal_reached();

    // Lowest-index achiever wins among actions of the same layer.
    std::sort(ready.begin(), ready.end());
    frontier.clear();
    for (auto a : ready) {
      action_level_[a] = level;
      for (FactId f : actions[a].add) {
        if (fact_level_[f] == kUnreached) {
          fact_level_[f] = level + 1;
          achiever_[f] = a;
          frontier.push_back(f);
        }
      }
    }
    ready.clear();
  }
}

std::optional<std::vector<std::uint32_t>> RelaxedPlanner::extract(
    const StateBits& state) {
  if (!build(state, true)) return std::nullopt;

  const auto& actions = task_.actions();
  std::uint32_t top = 0;
  for (FactId g : task_.goal()) top = std::max(top, fact_level_[g]);

  std::vector<std::vector<FactId>> goals_at(top + 1);
  std::vector<bool> marked(task_.num_facts(), false);
  for (FactId g : task_.goal()) {
    if (fact_level_[g] > 0 && !marked[g]) {
      marked[g] = true;
      goals_at[fact_level_[g]].push_back(g);
    }
  }

  std::vector<bool> selected(actions.size(), false);
  // Earliest layer of a selected action adding each fact.
  std::vector<std::uint32_t> added_at(task_.num_facts(), kUnreached);
  std::vector<std::uint32_t> chosen;
  for (std::uint32_t level = top; level > 0; --level) {
    auto& layer = goals_at[level];
    std::sort(layer.begin(), layer.end());
    for (FactId g : layer) {
      if (added_at[g] != kUnreached && added_at[g] < level) continue;
      std::uint32_t a = achiever_[g];
      if (selected[a]) continue;
      selected[a] = true;
      chosen.push_back(a);
      for (FactId f : actions[a].add)
        added_at[f] = std::min(added_at[f], action_level_[a]);
      for (FactId p : actions[a].pre) {
        if (fact_level_[p] > 0 && !marked[p]) {
          marked[p] = true;
          goals_at[fact_level_[p]].push_back(p);
        }
      }
    }
  }

  std::sort(chosen.begin(), chosen.end(), [&](auto x, auto y) {
    if (action_level_[x] != action_level_[y])
      return action_level_[x] < action_level_[y];
    return x < y;
  });
  return chosen;
}

void RelaxedPlanner::reachable(const StateBits& state, std::vector<bool>& facts,
                               std::vector<bool>& actions) {
  build(state, false);
  facts.assign(task_.num_facts(), false);
  actions.assign(task_.actions().size(), false);
  for (FactId f = 0; f < task_.num_facts(); ++f)
    facts[f] = fact_level_[f] != kUnreached;
  for (std::size_t a = 0; a < actions.size(); ++a)
    actions[a] = action_level_[a] != kUnreached;
}

}  // namespace detail

std::optional<std::vector<std::size_t>> relaxed_plan(
    const WorldState& state, const AtomSet& goal,
    std::span<const GroundAction> actions) {
  detail::CompiledTask task(actions, state, goal);
  detail::RelaxedPlanner planner(task);
  auto chosen = planner.extract(task.encode(state));
  if (!chosen) return std::nullopt;
  return std::vector<std::size_t>(chosen->begin(), chosen->end());
}

std::optional<std::size_t> relaxed_plan_length(
    const WorldState& state, const AtomSet& goal,
    std::span<const GroundAction> actions) {
  auto rp = relaxed_plan(state, goal, actions);
  if (!rp) return std::nullopt;
  return rp->size();
}

}  // namespace iroplan

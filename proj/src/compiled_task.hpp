#pragma once

// Integer-indexed view of a ground task shared by the heuristic and search.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "iroplan/atom.hpp"
#include "iroplan/planner.hpp"

namespace iroplan::detail {

using FactId = std::uint32_t;

class StateBits {
 public:
  StateBits() = default;
  explicit StateBits(std::size_t facts) : words_((facts + 63) / 64, 0) {}

  bool test(FactId f) const { return (words_[f >> 6] >> (f & 63)) & 1U; }
  void set(FactId f) { words_[f >> 6] |= std::uint64_t{1} << (f & 63); }
  void reset(FactId f) { words_[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }

  friend bool operator==(const StateBits&, const StateBits&) = default;

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct StateBitsHash {
  std::size_t operator()(const StateBits& s) const { return s.hash(); }
};

struct CompiledAction {
  std::vector<FactId> pre;
  std::vector<FactId> add;
  std::vector<FactId> del;
};

class CompiledTask {
 public:
  CompiledTask(std::span<const GroundAction> actions, const WorldState& init,
               const AtomSet& goal);

  std::size_t num_facts() const { return facts_.size(); }
  const std::vector<CompiledAction>& actions() const { return actions_; }
  const std::vector<FactId>& goal() const { return goal_; }
  const Atom& fact(FactId f) const { return facts_[f]; }

  /// Facts of `state` known to the task; unknown atoms are irrelevant to
  /// every action and the goal, so they are dropped.
  StateBits encode(const WorldState& state) const;

  bool applicable(const StateBits& s, std::size_t a) const;
  StateBits apply(const StateBits& s, std::size_t a) const;
  bool satisfies_goal(const StateBits& s) const;

  /// pre_of[f] lists actions with f among their preconditions.
  const std::vector<std::vector<std::uint32_t>>& pre_of() const {
    return pre_of_;
  }

 private:
  FactId intern(const Atom& atom);

  std::vector<Atom> facts_;
  std::map<Atom, FactId> ids_;
  std::vector<CompiledAction> actions_;
  std::vector<FactId> goal_;
  std::vector<std::vector<std::uint32_t>> pre_of_;
};

/// Reusable FF relaxed-plan evaluator over a compiled task.
class RelaxedPlanner {
 public:
  explicit RelaxedPlanner(const CompiledTask& task);

  /// Indices of the relaxed plan's actions ordered by (layer, index);
  /// nullopt if the goal is unreachable ignoring deletes.
  std::optional<std::vector<std::uint32_t>> extract(const StateBits& state);

  /// Facts reachable from `state` ignoring deletes, and the actions that
  /// become applicable along the way.
  void reachable(const StateBits& state, std::vector<bool>& facts,
                 std::vector<bool>& actions);

 private:
  static constexpr std::uint32_t kUnreached = 0xffffffffU;

  bool build(const StateBits& state, bool stop_at_goal);

  const CompiledTask& task_;
  std::vector<std::uint32_t> fact_level_;
  std::vector<std::uint32_t> achiever_;
  std::vector<std::uint32_t> action_level_;
  std::vector<std::uint32_t> unsatisfied_;
};

}  // namespace iroplan::detail

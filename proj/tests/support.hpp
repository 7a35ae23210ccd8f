#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "iroplan/executor.hpp"
#include "iroplan/json_io.hpp"
#include "iroplan/knowledge.hpp"
#include "iroplan/planner.hpp"
#include "iroplan/service.hpp"
#include "iroplan/sim_world.hpp"

namespace iroplan::fixtures {

std::filesystem::path data_dir();
std::filesystem::path scene_path(const std::string& name);
std::filesystem::path scenario_path(const std::string& name);
World load_bundled_scene(const std::string& name);
std::string read_text(const std::filesystem::path& path);

/// Cube c from A to B in table1.json, keyframes relative to c and B.
DemoScript cube_a_to_b();

/// Keyframes around a pick-and-place of `object` onto `destination`.
DemoScript pick_and_place(const std::string& object, const std::string& destination,
                          Arm arm = Arm::suction);

/// The stock move: on(?o,?from), clear(?o), clear(?to), stackable(?o,?to).
ActionModel stock_move(const std::string& name = "move");

/// A random tabletop problem: up to `max_objects` objects of random kinds
/// stacked on up to `max_positions` positions, a random goal over `on`, and a
/// randomly perturbed copy of the stock move (dropped conditions, narrowed
/// types, extra requirements, missing effects).
struct RandomProblem {
  KnowledgeBase kb;
  PlanningProblem problem;
};
RandomProblem random_problem(std::mt19937& rng, int max_objects = 4, int max_positions = 4);

/// Random sets over a small universe of ground atoms.
WorldState random_state(std::mt19937& rng, const std::vector<std::string>& constants,
                        double density = 0.3);

/// Random knowledge base that is valid for PDDL emission: lowercase names,
/// a random hierarchy extending the standard one, random typed actions.
KnowledgeBase random_kb(std::mt19937& rng);
/// Random problem over the types of `kb`, lowercase names.
PlanningProblem random_pddl_problem(std::mt19937& rng, const KnowledgeBase& kb);

/// What survives PDDL: no keyframes, default arm, lowercase variables.
KnowledgeBase pddl_view(KnowledgeBase kb);

/// Number of states reachable from init (stops counting at `limit`).
std::size_t reachable_states(const KnowledgeBase& kb, const PlanningProblem& problem,
                             std::size_t limit);

Request request(std::string method, std::string path, Json body = nullptr);

}  // namespace iroplan::fixtures

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iroplan/knowledge.hpp"
#include "iroplan/planner.hpp"

namespace iroplan::pddl {

inline constexpr std::string_view kDomainName = "iropro";

/// Canonical rendering: lowercase symbols, two-space indentation, one
/// :action block per model in name order. Throws InvalidModel if any action
/// carries error-severity diagnostics.
std::string emit_domain(const KnowledgeBase& kb,
                        std::string_view domain_name = kDomainName);

/// Throws UndeclaredConstant if init or goal mention an undeclared object.
std::string emit_problem(const PlanningProblem& problem,
                         std::string_view domain_name = kDomainName);

/// Parsed domain. Keyframes are not representable in PDDL, so actions come
/// back with empty keyframe sequences (a "skeleton").
struct ParsedDomain {
  std::string name;
  KnowledgeBase kb;
};

/// Case-insensitive. Throws SyntaxError (ErrorCode::SyntaxError) with a
/// location, or SyntaxError carrying ErrorCode::UnsupportedFeature.
ParsedDomain parse_domain(std::string_view text);
PlanningProblem parse_problem(std::string_view text);

/// One action per line; optional "N:" or "step N:" prefix; parentheses
/// optional; trailing "[cost]" and ';' comments ignored.
std::vector<PlanStep> parse_plan(std::string_view text);

/// Plan text in "N: (schema arg ...)" form.
std::string emit_plan(std::span<const PlanStep> steps);

/// Runs an external planner on emitted domain/problem files. `command` may
/// contain {domain}, {problem} and {plan}; without placeholders the domain
/// and problem paths are appended. The plan is read from {plan} when used,
/// otherwise from stdout. Plan constants are mapped back to the problem's
/// object names case-insensitively.
struct ExternalPlannerResult {
  int exit_code = 0;
  std::vector<PlanStep> steps;
  std::string output;
};

ExternalPlannerResult run_external_planner(const std::string& command,
                                           const KnowledgeBase& kb,
                                           const PlanningProblem& problem);

}  // namespace iroplan::pddl

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "iroplan/errors.hpp"
#include "iroplan/pddl.hpp"

namespace iroplan::pddl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string render(const Atom& atom) {
  std::string out = "(" + lower(atom.predicate);
  for (const auto& a : atom.args) out += " " + lower(a);
  return out + ")";
}

/// "?o - object ?e - element"
std::string render(const std::vector<TypedVariable>& vars) {
  std::string out;
  for (const auto& v : vars) {
    if (!out.empty()) out += ' ';
    out += lower(v.name) + " - " + lower(v.type);
  }
  return out;
}

std::string conjunction(const AtomSet& pos, const AtomSet& neg = {}) {
  std::string out = "(and";
  for (const auto& a : pos) out += " " + render(a);
  for (const auto& a : neg) out += " (not " + render(a) + ")";
  return out + ")";
}

}  // namespace

std::string emit_domain(const KnowledgeBase& kb, std::string_view domain_name) {
  for (const auto& [name, model] : kb.actions) {
    auto diags = validate_in_kb(model, kb);
    for (const auto& d : diags) {
      if (d.severity == Severity::error)
        throw Error(ErrorCode::InvalidModel, name + ": " + d.message);
    }
  }

  std::ostringstream os;
  os << "(define (domain " << lower(domain_name) << ")\n";
  os << "  (:requirements :strips :typing)\n";
  // Untyped names must come last, otherwise they would join the next group.
  os << "  (:types";
  for (const auto& t : kb.hierarchy.types()) {
    if (auto p = kb.hierarchy.parent(t)) os << "\n    " << lower(t) << " - " << lower(*p);
  }
  for (const auto& t : kb.hierarchy.types()) {
    if (!kb.hierarchy.parent(t)) os << "\n    " << lower(t);
  }
  os << ")\n";
  os << "  (:predicates";
  for (const auto& p : kb.predicates) {
    os << "\n    (" << lower(p.name);
    if (!p.params.empty()) os << ' ' << render(p.params);
    os << ')';
  }
  os << ")";
  for (const auto& [name, model] : kb.actions) {
    os << "\n  (:action " << lower(model.name) << "\n";
    os << "    :parameters (" << render(model.params) << ")\n";
    os << "    :precondition " << conjunction(model.pre) << "\n";
    os << "    :effect " << conjunction(model.eff_add, model.eff_del) << ")";
  }
  os << ")\n";
  return os.str();
}

std::string emit_problem(const PlanningProblem& problem,
                         std::string_view domain_name) {
  std::set<std::string> declared;
  for (const auto& o : problem.objects) declared.insert(o.name);
  for (const AtomSet* set : {&problem.init, &problem.goal}) {
    for (const auto& atom : *set) {
      for (const auto& arg : atom.args) {
        if (!declared.contains(arg))
          throw Error(ErrorCode::UndeclaredConstant,
                      to_string(atom) + " mentions undeclared object '" + arg +
                          "'");
      }
    }
  }

  std::ostringstream os;
  os << "(define (problem " << lower(problem.name) << ")\n";
  os << "  (:domain " << lower(domain_name) << ")\n";
  os << "  (:objects";
  for (const auto& o : problem.objects)
    os << "\n    " << lower(o.name) << " - " << lower(o.type);
  os << ")\n";
  os << "  (:init";
  for (const auto& a : problem.init) os << "\n    " << render(a);
  os << ")\n";
  os << "  (:goal " << conjunction(problem.goal) << "))\n";
  return os.str();
}

std::string emit_plan(std::span<const PlanStep> steps) {
  std::ostringstream os;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    os << i << ": (" << lower(steps[i].schema);
    for (const auto& a : steps[i].args) os << ' ' << lower(a);
    os << ")\n";
  }
  return os.str();
}

}  // namespace iroplan::pddl

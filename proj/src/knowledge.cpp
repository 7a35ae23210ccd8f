#include "iroplan/knowledge.hpp"

#include <algorithm>
#include <set>

#include "iroplan/errors.hpp"

namespace iroplan {

// ---------------------------------------------------------------------------
// TypeHierarchy

TypeHierarchy TypeHierarchy::standard() {
  TypeHierarchy h;
  h.add(std::string(types::kElement));
  h.add(std::string(types::kPosition), std::string(types::kElement));
  h.add(std::string(types::kObject), std::string(types::kElement));
  h.add(std::string(types::kCube), std::string(types::kObject));
  h.add(std::string(types::kBase), std::string(types::kObject));
  h.add(std::string(types::kRoof), std::string(types::kObject));
  return h;
}

void TypeHierarchy::add(const std::string& type, const std::string& parent) {
  if (type.empty()) throw Error(ErrorCode::UnknownType, "empty type name");
  if (!parent.empty() && !contains(parent))
    throw Error(ErrorCode::UnknownType, "unknown parent type '" + parent + "'");
  if (contains(type)) {
    auto existing = this->parent(type).value_or("");
    if (existing == parent) return;
    throw Error(ErrorCode::NameClash, "type '" + type + "' already declared");
  }
  order_.push_back(type);
  if (parent.empty()) {
    roots_.push_back(type);
  } else {
    parent_[type] = parent;
  }
}

bool TypeHierarchy::contains(std::string_view type) const {
  return std::find(order_.begin(), order_.end(), type) != order_.end();
}

std::optional<std::string> TypeHierarchy::parent(std::string_view type) const {
  auto it = parent_.find(std::string(type));
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

bool TypeHierarchy::is_subtype(std::string_view type,
                               std::string_view ancestor) const {
  std::string current(type);
  // Parents are declared before children, so the chain is acyclic.
  for (std::size_t guard = 0; guard <= order_.size(); ++guard) {
    if (current == ancestor) return true;
    auto it = parent_.find(current);
    if (it == parent_.end()) return false;
    current = it->second;
  }
  return false;
}

std::vector<PredicateSignature> standard_predicates() {
  const std::string e(types::kElement);
  const std::string o(types::kObject);
  return {
      {"clear", {{"?e", e}}},
      {"thin", {{"?o", o}}},
      {"flat", {{"?e", e}}},
      {"on", {{"?o", o}, {"?e", e}}},
      {"stackable", {{"?o", o}, {"?e", e}}},
  };
}

std::string_view to_string(Gripper g) {
  return g == Gripper::open ? "open" : "closed";
}

std::string_view to_string(Arm a) {
  return a == Arm::claw ? "claw" : "suction";
}

Gripper parse_gripper(std::string_view text) {
  if (text == "open") return Gripper::open;
  if (text == "closed" || text == "close") return Gripper::closed;
  throw Error(ErrorCode::BadRequest,
              "unknown gripper state '" + std::string(text) + "'");
}

Arm parse_arm(std::string_view text) {
  if (text == "claw") return Arm::claw;
  if (text == "suction") return Arm::suction;
  throw Error(ErrorCode::BadRequest, "unknown arm '" + std::string(text) + "'");
}

const TypedVariable* ActionModel::find_param(std::string_view variable) const {
  auto it = std::find_if(params.begin(), params.end(),
                         [&](const auto& p) { return p.name == variable; });
  return it == params.end() ? nullptr : &*it;
}

std::optional<std::size_t> ActionModel::param_index(
    std::string_view variable) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == variable) return i;
  }
  return std::nullopt;
}

const PredicateSignature* KnowledgeBase::find_predicate(
    std::string_view name) const {
  auto it = std::find_if(predicates.begin(), predicates.end(),
                         [&](const auto& p) { return p.name == name; });
  return it == predicates.end() ? nullptr : &*it;
}

const ActionModel& KnowledgeBase::action(std::string_view name) const {
  auto it = actions.find(std::string(name));
  if (it == actions.end())
    throw Error(ErrorCode::UnknownAction,
                "unknown action '" + std::string(name) + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// Classification

bool TypeRule::matches(const BoundingBox& box) const {
  auto within = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  return within(box.width, min.width, max.width) &&
         within(box.length, min.length, max.length) &&
         within(box.height, min.height, max.height);
}

std::vector<TypeRule> standard_type_rules() {
  return {
      {std::string(types::kBase), {0.08, 0.08, 0.005}, {0.30, 0.30, 0.04},
       {"flat"}},
      {std::string(types::kCube), {0.03, 0.03, 0.03}, {0.07, 0.07, 0.07},
       {"flat", "thin"}},
      {std::string(types::kRoof), {0.005, 0.04, 0.04}, {0.04, 0.15, 0.15},
       {"thin"}},
  };
}

Classification classify_object(const BoundingBox& box,
                               const std::vector<TypeRule>& rules) {
  for (const auto& rule : rules) {
    if (rule.matches(box)) return {rule.type, rule.unary};
  }
  return {std::string(types::kObject), {}};
}

// ---------------------------------------------------------------------------
// Inference and lifting

InferredConditions infer_conditions(const WorldState& before,
                                    const WorldState& after) {
  InferredConditions out;
  out.pre = set_difference(before, after);
  out.eff_del = out.pre;
  out.eff_add = set_difference(after, before);
  return out;
}

namespace {

/// Variables in first-occurrence order over pre, eff_add, eff_del.
std::vector<std::string> occurring_variables(const AtomSet& pre,
                                             const AtomSet& eff_add,
                                             const AtomSet& eff_del) {
  std::vector<std::string> out;
  for (const AtomSet* set : {&pre, &eff_add, &eff_del}) {
    for (const auto& atom : *set) {
      for (const auto& arg : atom.args) {
        if (is_variable(arg) &&
            std::find(out.begin(), out.end(), arg) == out.end())
          out.push_back(arg);
      }
    }
  }
  return out;
}

void check_effects_disjoint(const AtomSet& eff_add, const AtomSet& eff_del) {
  auto both = set_intersection(eff_add, eff_del);
  if (!both.empty())
    throw Error(ErrorCode::EffectContradiction,
                "effect " + to_string(*both.begin()) +
                    " is both added and deleted");
}

}  // namespace

ActionModel lift_action(std::string name, const InferredConditions& inferred,
                        const KeyframeSeq& keyframes, const Bindings& bindings,
                        const TypeHierarchy& hierarchy, Arm arm) {
  std::map<std::string, std::string> var_types;
  for (const auto& [landmark, var] : bindings) {
    if (!is_variable(var.name))
      throw Error(ErrorCode::UnknownVariable,
                  "binding for '" + landmark + "' is not a variable: '" +
                      var.name + "'");
    if (!hierarchy.contains(var.type))
      throw Error(ErrorCode::UnknownType, "unknown type '" + var.type + "'");
    auto [it, inserted] = var_types.emplace(var.name, var.type);
    if (!inserted && it->second != var.type)
      throw Error(ErrorCode::InvalidModel,
                  "variable " + var.name + " bound with two types");
  }

  auto lift = [&](const AtomSet& ground) {
    AtomSet out;
    for (const auto& atom : ground) {
      Atom lifted{atom.predicate, {}};
      for (const auto& arg : atom.args) {
        auto it = bindings.find(arg);
        if (it == bindings.end())
          throw Error(ErrorCode::UnboundConstant,
                      "no binding for constant '" + arg + "' in " +
                          to_string(atom));
        lifted.args.push_back(it->second.name);
      }
      out.insert(std::move(lifted));
    }
    return out;
  };

  ActionModel model;
  model.name = std::move(name);
  model.arm = arm;
  model.pre = lift(inferred.pre);
  model.eff_add = lift(inferred.eff_add);
  model.eff_del = lift(inferred.eff_del);
  check_effects_disjoint(model.eff_add, model.eff_del);

  for (const auto& var : occurring_variables(model.pre, model.eff_add,
                                             model.eff_del)) {
    model.params.push_back({var, var_types.at(var)});
  }

  for (const auto& kf : keyframes) {
    Keyframe lifted = kf;
    if (kf.relative_to) {
      auto it = bindings.find(*kf.relative_to);
      if (it == bindings.end())
        throw Error(ErrorCode::UnboundConstant,
                    "keyframe references unbound landmark '" +
                        *kf.relative_to + "'");
      lifted.relative_to = it->second.name;
    }
    model.keyframes.push_back(std::move(lifted));
  }
  return model;
}

AtomSet ground_atoms(const AtomSet& lifted,
                     const std::map<std::string, std::string>& substitution) {
  AtomSet out;
  for (const auto& atom : lifted) {
    Atom g{atom.predicate, {}};
    g.args.reserve(atom.args.size());
    for (const auto& arg : atom.args) {
      auto it = substitution.find(arg);
      g.args.push_back(it == substitution.end() ? arg : it->second);
    }
    out.insert(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Editing

namespace {

void require_variables(const Atom& atom, const ActionModel& model,
                       const std::map<std::string, std::string>& declare,
                       const TypeHierarchy& hierarchy) {
  for (const auto& arg : atom.args) {
    if (!is_variable(arg))
      throw Error(ErrorCode::UnknownVariable,
                  "'" + arg + "' in " + to_string(atom) +
                      " is not a variable");
    if (model.find_param(arg)) continue;
    auto it = declare.find(arg);
    if (it == declare.end())
      throw Error(ErrorCode::UnknownVariable,
                  "variable " + arg + " is not a parameter of " + model.name);
    if (!hierarchy.contains(it->second))
      throw Error(ErrorCode::UnknownType, "unknown type '" + it->second + "'");
  }
}

/// Keeps surviving parameters in place and appends new ones.
void recompute_params(ActionModel& model,
                      const std::map<std::string, std::string>& declare) {
  auto used = occurring_variables(model.pre, model.eff_add, model.eff_del);
  std::vector<TypedVariable> params;
  for (const auto& p : model.params) {
    if (std::find(used.begin(), used.end(), p.name) != used.end())
      params.push_back(p);
  }
  for (const auto& var : used) {
    if (model.find_param(var)) continue;
    params.push_back({var, declare.at(var)});
  }
  model.params = std::move(params);
}

AtomSet& effect_set(ActionModel& model, Polarity p) {
  return p == Polarity::add ? model.eff_add : model.eff_del;
}

}  // namespace

ActionModel edit_action(const ActionModel& model, const ActionEdit& op,
                        const TypeHierarchy& hierarchy) {
  ActionModel out = model;
  std::map<std::string, std::string> declared;

  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, edit::AddPrecondition>) {
          require_variables(e.atom, out, e.declare, hierarchy);
          declared = e.declare;
          out.pre.insert(e.atom);
        } else if constexpr (std::is_same_v<T, edit::RemovePrecondition>) {
          if (out.pre.erase(e.atom) == 0)
            throw Error(ErrorCode::UnknownCondition,
                        to_string(e.atom) + " is not a precondition of " +
                            out.name);
        } else if constexpr (std::is_same_v<T, edit::AddEffect>) {
          require_variables(e.atom, out, e.declare, hierarchy);
          declared = e.declare;
          const auto other =
              e.polarity == Polarity::add ? Polarity::del : Polarity::add;
          if (effect_set(out, other).contains(e.atom))
            throw Error(ErrorCode::EffectContradiction,
                        to_string(e.atom) +
                            " is already an effect with the opposite polarity");
          effect_set(out, e.polarity).insert(e.atom);
        } else if constexpr (std::is_same_v<T, edit::RemoveEffect>) {
          if (effect_set(out, e.polarity).erase(e.atom) == 0)
            throw Error(ErrorCode::UnknownCondition,
                        to_string(e.atom) + " is not an effect of " + out.name);
        } else if constexpr (std::is_same_v<T, edit::RetypeParam>) {
          auto it = std::find_if(
              out.params.begin(), out.params.end(),
              [&](const auto& p) { return p.name == e.variable; });
          if (it == out.params.end())
            throw Error(ErrorCode::UnknownVariable,
                        "variable " + e.variable + " is not a parameter of " +
                            out.name);
          if (!hierarchy.contains(e.type))
            throw Error(ErrorCode::UnknownType, "unknown type '" + e.type + "'");
          it->type = e.type;
        } else if constexpr (std::is_same_v<T, edit::Rename>) {
          if (e.name.empty())
            throw Error(ErrorCode::BadRequest, "action name must not be empty");
          out.name = e.name;
        }
      },
      op);

  recompute_params(out, declared);
  check_effects_disjoint(out.eff_add, out.eff_del);
  return out;
}

KnowledgeBase clone_action(const KnowledgeBase& kb, std::string_view name,
                           const std::string& new_name) {
  const ActionModel& source = kb.action(name);
  if (kb.actions.contains(new_name))
    throw Error(ErrorCode::NameClash,
                "an action named '" + new_name + "' already exists");
  KnowledgeBase out = kb;
  ActionModel copy = source;
  copy.name = new_name;
  out.actions.emplace(new_name, std::move(copy));
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

std::string_view to_string(Severity s) {
  return s == Severity::warning ? "warning" : "error";
}

std::vector<Diagnostic> validate_action_model(const ActionModel& model,
                                              const TypeHierarchy& hierarchy) {
  std::vector<Diagnostic> out;
  auto warn = [&](std::string code, std::string msg) {
    out.push_back({Severity::warning, std::move(code), std::move(msg)});
  };
  auto fail = [&](std::string code, std::string msg) {
    out.push_back({Severity::error, std::move(code), std::move(msg)});
  };

  if (model.params.empty())
    warn("empty_params", "action " + model.name + " has no parameters");
  if (model.eff_add.empty() && model.eff_del.empty())
    warn("no_effect", "action " + model.name +
                          " has no effect and can never change the state");
  for (const auto& atom : set_intersection(model.pre, model.eff_add))
    warn("redundant_add",
         to_string(atom) + " is both a precondition and an add effect");
  for (const auto& atom : set_intersection(model.eff_add, model.eff_del))
    fail("effect_contradiction",
         to_string(atom) + " is both added and deleted");

  std::set<std::string> seen;
  for (const auto& p : model.params) {
    if (!seen.insert(p.name).second)
      fail("duplicate_param", "parameter " + p.name + " declared twice");
    if (!hierarchy.contains(p.type))
      fail("unknown_type",
           "parameter " + p.name + " has unknown type '" + p.type + "'");
  }

  for (const AtomSet* set : {&model.pre, &model.eff_add, &model.eff_del}) {
    for (const auto& atom : *set) {
      for (const auto& arg : atom.args) {
        if (!is_variable(arg)) {
          fail("constant_in_condition",
               to_string(atom) + " mentions constant '" + arg + "'");
        } else if (!model.find_param(arg)) {
          fail("undeclared_variable",
               to_string(atom) + " uses " + arg + " which is not a parameter");
        }
      }
    }
  }

  // A moved object with something on top cannot be grasped; the inferred
  // conditions never contain clear(?o) because it holds before and after.
  for (const auto& atom : model.eff_del) {
    if (atom.predicate != "on" || atom.args.size() != 2) continue;
    Atom clear_obj{"clear", {atom.args[0]}};
    if (!model.pre.contains(clear_obj))
      warn("moved_object_not_clear",
           "the moved object " + atom.args[0] +
               " is not required to be clear (consider adding " +
               to_string(clear_obj) + ")");
  }

  if (model.keyframes.empty())
    warn("no_keyframes", "action " + model.name + " has no keyframes");
  for (std::size_t i = 0; i < model.keyframes.size(); ++i) {
    const auto& ref = model.keyframes[i].relative_to;
    if (ref && !model.find_param(*ref))
      warn("unbound_keyframe", "keyframe " + std::to_string(i) +
                                   " is relative to " + *ref +
                                   " which is not a parameter");
  }
  return out;
}

std::vector<Diagnostic> validate_in_kb(const ActionModel& model,
                                       const KnowledgeBase& kb) {
  auto out = validate_action_model(model, kb.hierarchy);
  for (const AtomSet* set : {&model.pre, &model.eff_add, &model.eff_del}) {
    for (const auto& atom : *set) {
      const auto* sig = kb.find_predicate(atom.predicate);
      if (!sig) {
        out.push_back({Severity::error, "unknown_predicate",
                       "predicate '" + atom.predicate + "' is not declared"});
      } else if (sig->arity() != atom.args.size()) {
        out.push_back({Severity::error, "arity_mismatch",
                       to_string(atom) + " does not match " + sig->name + "/" +
                           std::to_string(sig->arity())});
      }
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [](const auto& d) {
    return d.severity == Severity::error;
  });
}

std::vector<Contradiction> check_goal_consistency(const AtomSet& goal) {
  std::vector<Contradiction> out;
  for (const auto& atom : goal) {
    if (atom.predicate != "on" || atom.args.size() != 2) continue;
    const auto& object = atom.args[0];
    const auto& surface = atom.args[1];
    Atom clear{"clear", {surface}};
    if (goal.contains(clear))
      out.push_back({atom, clear,
                     object + " is on " + surface + " but " + surface +
                         " is also required to be clear"});
    for (const auto& other : goal) {
      if (other.predicate == "on" && other.args.size() == 2 &&
          other.args[0] == object && surface < other.args[1])
        out.push_back({atom, other,
                       object + " cannot be on both " + surface + " and " +
                           other.args[1]});
    }
  }
  return out;
}

}  // namespace iroplan

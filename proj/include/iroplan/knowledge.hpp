#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iroplan/atom.hpp"
#include "iroplan/geometry.hpp"

namespace iroplan {

namespace types {
inline constexpr std::string_view kElement = "element";
inline constexpr std::string_view kPosition = "position";
inline constexpr std::string_view kObject = "object";
inline constexpr std::string_view kBase = "base";
inline constexpr std::string_view kCube = "cube";
inline constexpr std::string_view kRoof = "roof";
}  // namespace types

/// Single-inheritance type forest. Declaration order is preserved so that
/// PDDL emission is deterministic; a parent is always declared before its
/// children.
class TypeHierarchy {
 public:
  /// Default tree: element > {position, object}, object > {cube, base, roof}.
  static TypeHierarchy standard();

  /// Adds `type` under `parent` (empty parent = root). Throws UnknownType if
  /// the parent is undeclared, NameClash if `type` already exists with a
  /// different parent.
  void add(const std::string& type, const std::string& parent = {});

  bool contains(std::string_view type) const;
  std::optional<std::string> parent(std::string_view type) const;

  /// True iff `type` equals `ancestor` or descends from it.
  bool is_subtype(std::string_view type, std::string_view ancestor) const;

  const std::vector<std::string>& types() const { return order_; }
  const std::map<std::string, std::string>& parents() const { return parent_; }

  friend bool operator==(const TypeHierarchy& a, const TypeHierarchy& b) {
    return a.parent_ == b.parent_ && a.roots_ == b.roots_;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> parent_;
  std::vector<std::string> roots_;
};

struct TypedVariable {
  std::string name;  // includes the leading '?'
  std::string type;

  friend bool operator==(const TypedVariable&, const TypedVariable&) = default;
};

struct PredicateSignature {
  std::string name;
  std::vector<TypedVariable> params;

  std::size_t arity() const { return params.size(); }
  friend bool operator==(const PredicateSignature&,
                         const PredicateSignature&) = default;
};

/// clear/1, thin/1, flat/1, on/2, stackable/2.
std::vector<PredicateSignature> standard_predicates();

enum class Gripper { open, closed };
enum class Arm { claw, suction };

std::string_view to_string(Gripper g);
std::string_view to_string(Arm a);
Gripper parse_gripper(std::string_view text);
Arm parse_arm(std::string_view text);

/// One recorded gripper state and end-effector pose. `relative_to` names the
/// reference frame: a landmark id while ground, a parameter variable once
/// lifted, and nullopt for the robot base frame.
struct Keyframe {
  Gripper gripper = Gripper::open;
  std::optional<std::string> relative_to;
  Pose offset;

  friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

using KeyframeSeq = std::vector<Keyframe>;

struct ActionModel {
  std::string name;
  std::vector<TypedVariable> params;
  AtomSet pre;
  AtomSet eff_add;
  AtomSet eff_del;
  KeyframeSeq keyframes;
  Arm arm = Arm::suction;

  const TypedVariable* find_param(std::string_view variable) const;
  std::optional<std::size_t> param_index(std::string_view variable) const;

  friend bool operator==(const ActionModel&, const ActionModel&) = default;
};

struct KnowledgeBase {
  TypeHierarchy hierarchy = TypeHierarchy::standard();
  std::vector<PredicateSignature> predicates = standard_predicates();
  std::map<std::string, ActionModel> actions;

  const PredicateSignature* find_predicate(std::string_view name) const;
  const ActionModel& action(std::string_view name) const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

// ---------------------------------------------------------------------------
// Object classification

struct BoundingBox {
  double width = 0.0;
  double length = 0.0;
  double height = 0.0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Closed interval per dimension; first matching rule in a table wins.
struct TypeRule {
  std::string type;
  BoundingBox min;
  BoundingBox max;
  std::vector<std::string> unary;  // derived predicates, e.g. {"flat"}

  bool matches(const BoundingBox& box) const;
  friend bool operator==(const TypeRule&, const TypeRule&) = default;
};

std::vector<TypeRule> standard_type_rules();

struct Classification {
  std::string type;
  std::vector<std::string> unary;

  friend bool operator==(const Classification&,
                         const Classification&) = default;
};

/// Unmatched boxes classify as plain `object` with no unary predicates.
Classification classify_object(const BoundingBox& box,
                               const std::vector<TypeRule>& rules);

// ---------------------------------------------------------------------------
// Condition inference

struct InferredConditions {
  AtomSet pre;
  AtomSet eff_add;
  AtomSet eff_del;

  friend bool operator==(const InferredConditions&,
                         const InferredConditions&) = default;
};

/// pre = eff_del = before \ after, eff_add = after \ before.
InferredConditions infer_conditions(const WorldState& before,
                                    const WorldState& after);

/// Landmark id -> typed variable used when lifting.
using Bindings = std::map<std::string, TypedVariable>;

/// Replaces constants by their bound variables. Parameters are exactly the
/// variables occurring in pre, eff_add, eff_del, in first-occurrence order.
/// Keyframe references are rebound; a keyframe whose landmark has no binding
/// throws UnboundConstant, one whose variable is not a parameter is kept and
/// reported by validate_action_model.
ActionModel lift_action(std::string name, const InferredConditions& inferred,
                        const KeyframeSeq& keyframes, const Bindings& bindings,
                        const TypeHierarchy& hierarchy, Arm arm = Arm::suction);

/// Substitutes `args` (positionally matching model.params) into an atom set.
AtomSet ground_atoms(const AtomSet& lifted,
                     const std::map<std::string, std::string>& substitution);

// ---------------------------------------------------------------------------
// Editing

enum class Polarity { add, del };

namespace edit {
/// `declare` types variables that are not yet parameters.
struct AddPrecondition {
  Atom atom;
  std::map<std::string, std::string> declare;
};
struct RemovePrecondition {
  Atom atom;
};
struct AddEffect {
  Atom atom;
  Polarity polarity = Polarity::add;
  std::map<std::string, std::string> declare;
};
struct RemoveEffect {
  Atom atom;
  Polarity polarity = Polarity::add;
};
struct RetypeParam {
  std::string variable;
  std::string type;
};
struct Rename {
  std::string name;
};
}  // namespace edit

using ActionEdit =
    std::variant<edit::AddPrecondition, edit::RemovePrecondition,
                 edit::AddEffect, edit::RemoveEffect, edit::RetypeParam,
                 edit::Rename>;

ActionModel edit_action(const ActionModel& model, const ActionEdit& op,
                        const TypeHierarchy& hierarchy);

KnowledgeBase clone_action(const KnowledgeBase& kb, std::string_view name,
                           const std::string& new_name);

// ---------------------------------------------------------------------------
// Diagnostics

enum class Severity { warning, error };
std::string_view to_string(Severity s);

struct Diagnostic {
  Severity severity;
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::vector<Diagnostic> validate_action_model(const ActionModel& model,
                                              const TypeHierarchy& hierarchy);

/// validate_action_model plus predicate-signature checks against the kb.
std::vector<Diagnostic> validate_in_kb(const ActionModel& model,
                                       const KnowledgeBase& kb);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

struct Contradiction {
  Atom first;
  Atom second;
  std::string message;

  friend bool operator==(const Contradiction&, const Contradiction&) = default;
};

/// Flags {on(o,e), clear(e)} and {on(o,p), on(o,q)} with p != q.
std::vector<Contradiction> check_goal_consistency(const AtomSet& goal);

}  // namespace iroplan

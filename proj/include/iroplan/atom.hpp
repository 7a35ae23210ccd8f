#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace iroplan {

inline bool is_variable(std::string_view term) {
  return !term.empty() && term.front() == '?';
}

/// A predicate applied to terms. Terms starting with '?' are variables,
/// everything else is a constant (a landmark id).
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  // Relational facts sort before unary ones so that lifted parameters come out
  // in the order the objects are manipulated: on(?o,?a) ahead of clear(?b).
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

using AtomSet = std::set<Atom>;

/// Closed-world state: every absent ground atom is false.
using WorldState = AtomSet;

/// "on(c,A)" style rendering used in logs, hints, and scenario scripts.
std::string to_string(const Atom& atom);
std::string to_string(const AtomSet& atoms);

/// Parses "on(c,A)", "clear(B)", or "(on c A)". Throws Error(BadRequest).
Atom parse_atom(std::string_view text);

/// Parses a whitespace separated list of atoms in either notation.
AtomSet parse_atoms(std::string_view text);

AtomSet set_difference(const AtomSet& a, const AtomSet& b);
AtomSet set_union(const AtomSet& a, const AtomSet& b);
AtomSet set_intersection(const AtomSet& a, const AtomSet& b);
bool is_subset(const AtomSet& sub, const AtomSet& super);

}  // namespace iroplan

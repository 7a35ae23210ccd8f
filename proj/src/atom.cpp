#include "iroplan/atom.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

#include "iroplan/errors.hpp"

namespace iroplan {

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(),
                      [](const std::string& a) { return is_variable(a); });
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (a.args.size() != b.args.size()) return b.args.size() <=> a.args.size();
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  return a.args <=> b.args;
}

std::string to_string(const Atom& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i > 0) out += ',';
    out += atom.args[i];
  }
  out += ')';
  return out;
}

std::string to_string(const AtomSet& atoms) {
  std::string out = "{";
  bool first = true;
  for (const auto& atom : atoms) {
    if (!first) out += ", ";
    first = false;
    out += to_string(atom);
  }
  out += '}';
  return out;
}

namespace {

bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '?' || c == '.';
}

[[noreturn]] void bad_atom(std::string_view text) {
  throw Error(ErrorCode::BadRequest,
              "malformed atom '" + std::string(text) + "'");
}

}  // namespace

Atom parse_atom(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return s;
  };
  std::string_view s = trim(text);
  if (s.empty()) bad_atom(text);

  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };

  Atom atom;
  if (s.front() == '(') {
    // (on c A)
    if (s.back() != ')') bad_atom(text);
    for (char c : s.substr(1, s.size() - 2)) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else if (is_symbol_char(c)) {
        current += c;
      } else {
        bad_atom(text);
      }
    }
    flush();
    if (tokens.empty()) bad_atom(text);
  } else {
    // on(c,A)
    auto open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')') bad_atom(text);
    tokens.emplace_back(trim(s.substr(0, open)));
    for (char c : s.substr(open + 1, s.size() - open - 2)) {
      if (c == ',') {
        if (current.empty()) bad_atom(text);
        flush();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        continue;
      } else if (is_symbol_char(c)) {
        current += c;
      } else {
        bad_atom(text);
      }
    }
    flush();
  }
  for (const auto& t : tokens) {
    if (t.empty() || !std::all_of(t.begin(), t.end(), is_symbol_char))
      bad_atom(text);
  }
  if (is_variable(tokens.front())) bad_atom(text);
  atom.predicate = tokens.front();
  atom.args.assign(std::next(tokens.begin()), tokens.end());
  return atom;
}

AtomSet parse_atoms(std::string_view text) {
  AtomSet out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    int depth = 0;
    while (i < text.size()) {
      char c = text[i];
      if (c == '(') ++depth;
      if (c == ')') {
        --depth;
        if (depth == 0) {
          ++i;
          break;
        }
      }
      if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) break;
      ++i;
    }
    out.insert(parse_atom(text.substr(start, i - start)));
  }
  return out;
}

AtomSet set_difference(const AtomSet& a, const AtomSet& b) {
  AtomSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

AtomSet set_union(const AtomSet& a, const AtomSet& b) {
  AtomSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

AtomSet set_intersection(const AtomSet& a, const AtomSet& b) {
  AtomSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

bool is_subset(const AtomSet& sub, const AtomSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace iroplan

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "iroplan/errors.hpp"
#include "iroplan/pddl.hpp"

namespace iroplan::pddl {

namespace {

constexpr std::size_t kMaxDepth = 128;

struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is(std::string_view s) const { return !is_list && symbol == s; }
};

[[noreturn]] void syntax_error(const SExpr& at, const std::string& msg) {
  throw SyntaxError(ErrorCode::SyntaxError, at.line, at.column, msg);
}

[[noreturn]] void unsupported(const SExpr& at, const std::string& what) {
  throw SyntaxError(ErrorCode::UnsupportedFeature, at.line, at.column,
                    "unsupported PDDL feature: " + what);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_document() {
    skip_blank();
    if (pos_ >= text_.size())
      throw SyntaxError(ErrorCode::SyntaxError, line_, col_, "empty input");
    SExpr doc = read(0);
    skip_blank();
    if (pos_ < text_.size())
      throw SyntaxError(ErrorCode::SyntaxError, line_, col_,
                        "trailing content after the top-level expression");
    return doc;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read(std::size_t depth) {
    skip_blank();
    SExpr e;
    e.line = line_;
    e.column = col_;
    if (pos_ >= text_.size())
      throw SyntaxError(ErrorCode::SyntaxError, line_, col_,
                        "unexpected end of input");
    char c = text_[pos_];
    if (c == ')')
      throw SyntaxError(ErrorCode::SyntaxError, line_, col_,
                        "unexpected ')'");
    if (c == '(') {
      if (depth >= kMaxDepth)
        throw SyntaxError(ErrorCode::SyntaxError, line_, col_,
                          "expression nested too deeply");
      advance();
      e.is_list = true;
      for (;;) {
        skip_blank();
        if (pos_ >= text_.size())
          throw SyntaxError(ErrorCode::SyntaxError, e.line, e.column,
                            "unbalanced '('");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read(depth + 1));
      }
      return e;
    }
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (ch == '(' || ch == ')' || ch == ';' ||
          std::isspace(static_cast<unsigned char>(ch)))
        break;
      e.symbol += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

const SExpr& expect_list(const SExpr& e, const std::string& what) {
  if (!e.is_list) syntax_error(e, "expected " + what);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const std::string& what) {
  if (e.is_list || e.symbol.empty()) syntax_error(e, "expected " + what);
  return e.symbol;
}

/// `(define (<kind> name) ...)`: returns the name and the remaining sections.
std::pair<std::string, std::vector<const SExpr*>> open_define(
    const SExpr& doc, std::string_view kind) {
  expect_list(doc, "(define ...)");
  if (doc.items.size() < 2 || !doc.items[0].is("define"))
    syntax_error(doc, "expected (define ...)");
  const SExpr& head = expect_list(doc.items[1], "(" + std::string(kind) + " name)");
  if (head.items.size() != 2 || !head.items[0].is(kind))
    syntax_error(head, "expected (" + std::string(kind) + " name)");
  std::string name = expect_symbol(head.items[1], "name");
  std::vector<const SExpr*> sections;
  for (std::size_t i = 2; i < doc.items.size(); ++i) {
    const SExpr& s = expect_list(doc.items[i], "section");
    if (s.items.empty() || s.items[0].is_list)
      syntax_error(s, "expected a section keyword");
    sections.push_back(&s);
  }
  return {name, sections};
}

struct TypedName {
  std::string name;
  std::optional<std::string> type;
  const SExpr* at;
};

/// `a b - t c - u d`
std::vector<TypedName> typed_list(const std::vector<SExpr>& items,
                                  std::size_t first) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = first; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (e.is_list) {
      if (!e.items.empty() && e.items[0].is("either")) unsupported(e, "either types");
      syntax_error(e, "unexpected list in typed list");
    }
    if (e.symbol == "-") {
      if (pending == 0 || i + 1 >= items.size())
        syntax_error(e, "dangling '-' in typed list");
      const SExpr& t = items[++i];
      if (t.is_list) {
        if (!t.items.empty() && t.items[0].is("either"))
          unsupported(t, "either types");
        syntax_error(t, "expected a type name");
      }
      for (std::size_t k = out.size() - pending; k < out.size(); ++k)
        out[k].type = t.symbol;
      pending = 0;
      continue;
    }
    out.push_back({e.symbol, std::nullopt, &e});
    ++pending;
  }
  return out;
}

Atom read_atom(const SExpr& e, bool allow_variables, bool allow_constants) {
  expect_list(e, "an atom");
  if (e.items.empty()) syntax_error(e, "empty atom");
  const std::string& pred = expect_symbol(e.items[0], "predicate name");
  static const std::set<std::string> kConnectives = {
      "or", "imply", "forall", "exists", "when", "increase", "decrease",
      "assign", "scale-up", "scale-down", "=", "<", ">", "<=", ">="};
  if (kConnectives.contains(pred)) unsupported(e, "'" + pred + "'");
  if (pred == "and" || pred == "not") syntax_error(e, "unexpected '" + pred + "'");
  Atom atom{pred, {}};
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const std::string& t = expect_symbol(e.items[i], "term");
    if (is_variable(t) && !allow_variables)
      syntax_error(e.items[i], "variable '" + t + "' not allowed here");
    if (!is_variable(t) && !allow_constants)
      unsupported(e.items[i], "constant '" + t + "' in an action schema");
    atom.args.push_back(t);
  }
  return atom;
}

/// Positive conjunction: `(and a b)`, `(and)`, or a single atom.
AtomSet read_conjunction(const SExpr& e, bool allow_variables,
                         bool allow_constants) {
  expect_list(e, "a condition");
  AtomSet out;
  if (!e.items.empty() && e.items[0].is("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const SExpr& c = e.items[i];
      if (c.is_list && !c.items.empty() && c.items[0].is("not"))
        unsupported(c, "negative preconditions");
      if (c.is_list && !c.items.empty() && c.items[0].is("and"))
        syntax_error(c, "nested 'and'");
      out.insert(read_atom(c, allow_variables, allow_constants));
    }
    return out;
  }
  if (!e.items.empty() && e.items[0].is("not"))
    unsupported(e, "negative preconditions");
  out.insert(read_atom(e, allow_variables, allow_constants));
  return out;
}

void read_effect(const SExpr& e, AtomSet& add, AtomSet& del) {
  expect_list(e, "an effect");
  auto literal = [&](const SExpr& l) {
    expect_list(l, "an effect literal");
    if (!l.items.empty() && l.items[0].is("not")) {
      if (l.items.size() != 2) syntax_error(l, "malformed (not ...)");
      del.insert(read_atom(l.items[1], true, false));
    } else {
      add.insert(read_atom(l, true, false));
    }
  };
  if (!e.items.empty() && e.items[0].is("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) literal(e.items[i]);
  } else {
    literal(e);
  }
}

void check_requirements(const SExpr& section) {
  for (std::size_t i = 1; i < section.items.size(); ++i) {
    const SExpr& r = section.items[i];
    const std::string& req = expect_symbol(r, "a requirement flag");
    if (req != ":strips" && req != ":typing") unsupported(r, "requirement " + req);
  }
}

TypeHierarchy read_types(const SExpr& section) {
  auto entries = typed_list(section.items, 1);
  std::map<std::string, std::string> parent;
  std::vector<std::string> order;
  for (const auto& t : entries) {
    if (!parent.contains(t.name)) order.push_back(t.name);
    parent[t.name] = t.type.value_or("");
  }
  TypeHierarchy h;
  std::set<std::string> visiting;
  std::function<void(const std::string&)> declare = [&](const std::string& t) {
    if (h.contains(t)) return;
    if (!visiting.insert(t).second)
      syntax_error(section, "cyclic type hierarchy at '" + t + "'");
    // A parent mentioned but never declared becomes a root.
    const std::string p = parent.contains(t) ? parent.at(t) : std::string();
    if (!p.empty()) declare(p);
    h.add(t, p);
  };
  for (const auto& t : order) declare(t);
  return h;
}

std::string default_type(const TypeHierarchy& h) {
  return h.types().empty() ? std::string(types::kObject) : h.types().front();
}

std::vector<TypedVariable> read_variables(const SExpr& list,
                                          const TypeHierarchy& h) {
  std::vector<TypedVariable> out;
  for (const auto& v : typed_list(list.items, 0)) {
    if (!is_variable(v.name)) syntax_error(*v.at, "expected a variable");
    out.push_back({v.name, v.type.value_or(default_type(h))});
  }
  return out;
}

ActionModel read_action(const SExpr& section, const TypeHierarchy& h) {
  if (section.items.size() < 2) syntax_error(section, "action without a name");
  ActionModel model;
  model.name = expect_symbol(section.items[1], "action name");
  for (std::size_t i = 2; i < section.items.size(); i += 2) {
    const SExpr& key = section.items[i];
    const std::string& k = expect_symbol(key, "an action keyword");
    if (i + 1 >= section.items.size()) syntax_error(key, "missing value for " + k);
    const SExpr& value = section.items[i + 1];
    if (k == ":parameters") {
      model.params = read_variables(expect_list(value, "parameter list"), h);
    } else if (k == ":precondition") {
      model.pre = read_conjunction(value, true, false);
    } else if (k == ":effect") {
      read_effect(value, model.eff_add, model.eff_del);
    } else {
      unsupported(key, "action keyword " + k);
    }
  }
  for (const AtomSet* set : {&model.pre, &model.eff_add, &model.eff_del}) {
    for (const auto& atom : *set) {
      for (const auto& arg : atom.args) {
        if (!model.find_param(arg))
          syntax_error(section, "variable " + arg + " in action " + model.name +
                                    " is not a parameter");
      }
    }
  }
  return model;
}

}  // namespace

ParsedDomain parse_domain(std::string_view text) {
  SExpr doc = Reader(text).read_document();
  auto [name, sections] = open_define(doc, "domain");
  ParsedDomain out;
  out.name = name;
  out.kb.hierarchy = TypeHierarchy{};
  out.kb.predicates.clear();

  for (const SExpr* s : sections) {
    const std::string& key = s->items[0].symbol;
    if (key == ":requirements") {
      check_requirements(*s);
    } else if (key == ":types") {
      out.kb.hierarchy = read_types(*s);
    } else if (key == ":predicates") {
      for (std::size_t i = 1; i < s->items.size(); ++i) {
        const SExpr& p = expect_list(s->items[i], "predicate declaration");
        if (p.items.empty()) syntax_error(p, "empty predicate declaration");
        PredicateSignature sig;
        sig.name = expect_symbol(p.items[0], "predicate name");
        SExpr rest;
        rest.items.assign(p.items.begin() + 1, p.items.end());
        sig.params = read_variables(rest, out.kb.hierarchy);
        out.kb.predicates.push_back(std::move(sig));
      }
    } else if (key == ":action") {
      ActionModel model = read_action(*s, out.kb.hierarchy);
      if (out.kb.actions.contains(model.name))
        syntax_error(*s, "duplicate action " + model.name);
      out.kb.actions.emplace(model.name, std::move(model));
    } else {
      unsupported(*s, "section " + key);
    }
  }
  if (!out.kb.hierarchy.contains(types::kObject) &&
      out.kb.hierarchy.types().empty())
    out.kb.hierarchy.add(std::string(types::kObject));
  return out;
}

PlanningProblem parse_problem(std::string_view text) {
  SExpr doc = Reader(text).read_document();
  auto [name, sections] = open_define(doc, "problem");
  PlanningProblem out;
  out.name = name;
  bool have_goal = false;
  for (const SExpr* s : sections) {
    const std::string& key = s->items[0].symbol;
    if (key == ":domain") {
      if (s->items.size() != 2) syntax_error(*s, "expected (:domain name)");
      expect_symbol(s->items[1], "domain name");
    } else if (key == ":objects") {
      for (const auto& o : typed_list(s->items, 1)) {
        if (is_variable(o.name)) syntax_error(*o.at, "objects cannot be variables");
        out.objects.push_back({o.name, o.type.value_or(std::string(types::kObject))});
      }
    } else if (key == ":init") {
      for (std::size_t i = 1; i < s->items.size(); ++i) {
        const SExpr& a = s->items[i];
        if (a.is_list && !a.items.empty() && a.items[0].is("not"))
          syntax_error(a, "negative literal in :init");
        out.init.insert(read_atom(a, false, true));
      }
    } else if (key == ":goal") {
      if (s->items.size() != 2) syntax_error(*s, "expected (:goal <condition>)");
      out.goal = read_conjunction(s->items[1], false, true);
      have_goal = true;
    } else {
      unsupported(*s, "section " + key);
    }
  }
  if (!have_goal) syntax_error(doc, "problem has no :goal");
  return out;
}

std::vector<PlanStep> parse_plan(std::string_view text) {
  std::vector<PlanStep> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;

    if (auto c = line.find(';'); c != std::string::npos) line.erase(c);
    std::transform(line.begin(), line.end(), line.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    std::istringstream is(line);
    std::string first;
    if (!(is >> first)) continue;

    std::string body = line;
    // optional "step" and "N:" prefixes
    auto strip_prefix = [&](std::string& s) {
      auto b = s.find_first_not_of(" \t\r");
      s.erase(0, b == std::string::npos ? s.size() : b);
      if (s.rfind("step", 0) == 0) s.erase(0, 4);
      b = s.find_first_not_of(" \t\r");
      s.erase(0, b == std::string::npos ? s.size() : b);
      std::size_t d = 0;
      while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) ++d;
      if (d > 0 && d < s.size() && s[d] == ':') s.erase(0, d + 1);
    };
    strip_prefix(body);
    if (auto b = body.find('['); b != std::string::npos) body.erase(b);

    auto open = body.find('(');
    if (open != std::string::npos) {
      auto close = body.find(')', open);
      if (close == std::string::npos ||
          body.find_first_not_of(" \t\r", close + 1) != std::string::npos ||
          body.find_first_not_of(" \t\r") != open)
        throw SyntaxError(ErrorCode::SyntaxError, line_no, open + 1,
                          "malformed plan step");
      body = body.substr(open + 1, close - open - 1);
    }
    std::istringstream tokens(body);
    PlanStep step;
    std::string tok;
    while (tokens >> tok) {
      if (tok.find_first_of("()") != std::string::npos)
        throw SyntaxError(ErrorCode::SyntaxError, line_no, 1,
                          "unexpected parenthesis in plan step");
      if (step.schema.empty()) {
        step.schema = tok;
      } else {
        step.args.push_back(tok);
      }
    }
    if (step.schema.empty())
      throw SyntaxError(ErrorCode::SyntaxError, line_no, 1, "empty plan step");
    out.push_back(std::move(step));
  }
  return out;
}

// ---------------------------------------------------------------------------
// External planner

namespace {

std::string replace_all(std::string s, std::string_view from,
                        const std::string& to) {
  for (auto p = s.find(from); p != std::string::npos;
       p = s.find(from, p + to.size()))
    s.replace(p, from.size(), to);
  return s;
}

std::string quote(const std::filesystem::path& p) {
  return "'" + replace_all(p.string(), "'", "'\\''") + "'";
}

/// Keeps only lines that look like plan steps (FF prints a lot of chatter).
std::string plan_lines(const std::string& output) {
  std::istringstream is(output);
  std::string line, out;
  while (std::getline(is, line)) {
    std::string l = line;
    std::transform(l.begin(), l.end(), l.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    auto b = l.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    l.erase(0, b);
    if (l.rfind("step", 0) == 0) {
      l.erase(0, 4);
      b = l.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      l.erase(0, b);
    }
    bool numbered = false;
    std::size_t d = 0;
    while (d < l.size() && std::isdigit(static_cast<unsigned char>(l[d]))) ++d;
    if (d > 0 && d < l.size() && l[d] == ':') numbered = true;
    if (numbered || l.front() == '(') out += line + "\n";
  }
  return out;
}

}  // namespace

ExternalPlannerResult run_external_planner(const std::string& command,
                                           const KnowledgeBase& kb,
                                           const PlanningProblem& problem) {
  std::string tmpl = (std::filesystem::temp_directory_path() / "iroplan-XXXXXX").string();
  if (!mkdtemp(tmpl.data()))
    throw Error(ErrorCode::ExecutionFailed, "cannot create a temp directory");
  const std::filesystem::path dir(tmpl);
  const auto domain_path = dir / "domain.pddl";
  const auto problem_path = dir / "problem.pddl";
  const auto plan_path = dir / "plan.out";
  std::ofstream(domain_path) << emit_domain(kb);
  std::ofstream(problem_path) << emit_problem(problem);

  std::string cmd = command;
  const bool placeholders = cmd.find("{domain}") != std::string::npos ||
                            cmd.find("{problem}") != std::string::npos;
  const bool plan_file = cmd.find("{plan}") != std::string::npos;
  cmd = replace_all(cmd, "{domain}", quote(domain_path));
  cmd = replace_all(cmd, "{problem}", quote(problem_path));
  cmd = replace_all(cmd, "{plan}", quote(plan_path));
  if (!placeholders) cmd += " " + quote(domain_path) + " " + quote(problem_path);
  cmd += " 2>&1";

  ExternalPlannerResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove_all(dir);
    throw Error(ErrorCode::ExecutionFailed, "cannot start external planner");
  }
  char buffer[4096];
  while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe))
    result.output.append(buffer, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

  std::string plan_text;
  if (plan_file) {
    std::ifstream in(plan_path);
    std::stringstream ss;
    ss << in.rdbuf();
    plan_text = ss.str();
  } else {
    plan_text = plan_lines(result.output);
  }
  std::filesystem::remove_all(dir);

  auto steps = parse_plan(plan_text);
  std::map<std::string, std::string> names;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  for (const auto& o : problem.objects) names[lower(o.name)] = o.name;
  for (const auto& [n, _] : kb.actions) names[lower(n)] = n;
  for (auto& s : steps) {
    if (auto it = names.find(s.schema); it != names.end()) s.schema = it->second;
    for (auto& a : s.args) {
      if (auto it = names.find(a); it != names.end()) a = it->second;
    }
  }
  result.steps = std::move(steps);
  return result;
}

}  // namespace iroplan::pddl

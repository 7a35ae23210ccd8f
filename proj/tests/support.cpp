#include "support.hpp"

#include <cctype>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace iroplan::fixtures {

namespace fs = std::filesystem;

namespace {

bool chance(std::mt19937& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

int uniform(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
T pick(std::mt19937& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

/// Random stacks of `objects` over `positions`: on(o, support) for every
/// object plus clear(x) for every landmark with nothing on it.
AtomSet random_configuration(std::mt19937& rng, const std::vector<std::string>& objects,
                             const std::vector<std::string>& positions) {
  std::vector<std::string> order = objects;
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::string> tops(positions.begin(), positions.end());
  AtomSet out;
  for (const auto& o : order) {
    std::vector<std::string> choices(tops.begin(), tops.end());
    const std::string support = pick(rng, choices);
    out.insert(Atom{"on", {o, support}});
    tops.erase(support);
    tops.insert(o);
  }
  for (const auto& t : tops) out.insert(Atom{"clear", {t}});
  return out;
}

}  // namespace

fs::path data_dir() {
  if (const char* env = std::getenv("IROPLAN_DATA_DIR")) return env;
  return IROPLAN_DATA_DIR;
}

fs::path scene_path(const std::string& name) { return data_dir() / "scenes" / name; }
fs::path scenario_path(const std::string& name) { return data_dir() / "scenarios" / name; }

World load_bundled_scene(const std::string& name) {
  return load_scene(load_scene_file(scene_path(name)));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DemoScript pick_and_place(const std::string& object, const std::string& destination, Arm arm) {
  return {demo::SaveKeyframe{object, {{0, 0, 0.10}, {}}},
          demo::Grasp{object, arm},
          demo::SaveKeyframe{object, {{0, 0, 0.0}, {}}},
          demo::SaveKeyframe{destination, {{0, 0, 0.10}, {}}},
          demo::ReleaseAt{destination},
          demo::SaveKeyframe{destination, {{0, 0, 0.12}, {}}}};
}

DemoScript cube_a_to_b() { return pick_and_place("c", "B"); }

ActionModel stock_move(const std::string& name) {
  ActionModel m;
  m.name = name;
  m.params = {{"?o", "object"}, {"?from", "element"}, {"?to", "element"}};
  m.pre = {Atom{"on", {"?o", "?from"}}, Atom{"clear", {"?o"}}, Atom{"clear", {"?to"}},
           Atom{"stackable", {"?o", "?to"}}};
  m.eff_add = {Atom{"on", {"?o", "?to"}}, Atom{"clear", {"?from"}}};
  m.eff_del = {Atom{"on", {"?o", "?from"}}, Atom{"clear", {"?to"}}};
  m.keyframes = {{Gripper::open, "?o", {{0, 0, 0.10}, {}}},
                 {Gripper::closed, "?o", {{0, 0, 0.0}, {}}},
                 {Gripper::closed, "?to", {{0, 0, 0.10}, {}}},
                 {Gripper::open, "?to", {{0, 0, 0.03}, {}}}};
  return m;
}

namespace {

ActionModel perturb(std::mt19937& rng, ActionModel m) {
  static const std::vector<std::string> object_types{"object", "cube", "base", "roof"};
  if (chance(rng, 0.3)) m.pre.erase(Atom{"clear", {"?o"}});
  if (chance(rng, 0.3)) m.pre.erase(Atom{"stackable", {"?o", "?to"}});
  if (chance(rng, 0.15)) m.pre.erase(Atom{"clear", {"?to"}});
  if (chance(rng, 0.2)) m.params[0].type = pick(rng, object_types);
  if (chance(rng, 0.15)) m.params[2].type = "position";
  if (chance(rng, 0.1)) m.params[1].type = "position";
  if (chance(rng, 0.2)) m.pre.insert(Atom{chance(rng, 0.5) ? "flat" : "thin", {"?o"}});
  if (chance(rng, 0.15)) m.eff_add.erase(Atom{"clear", {"?from"}});
  if (chance(rng, 0.1)) m.eff_del.erase(Atom{"clear", {"?to"}});
  return m;
}

}  // namespace

RandomProblem random_problem(std::mt19937& rng, int max_objects, int max_positions) {
  static const std::vector<std::string> kinds{"cube", "base", "roof"};
  RandomProblem out;
  out.kb.actions["move"] = perturb(rng, stock_move("move"));
  if (chance(rng, 0.3)) {
    ActionModel second = perturb(rng, stock_move("move2"));
    out.kb.actions["move2"] = second;
  }

  const int n = uniform(rng, 1, max_objects);
  const int m = uniform(rng, 1, max_positions);
  std::vector<std::string> objects, positions;
  PlanningProblem& p = out.problem;
  p.name = "random";
  for (int i = 1; i <= m; ++i) {
    positions.push_back("P" + std::to_string(i));
    p.objects.push_back({positions.back(), "position"});
  }
  for (int i = 1; i <= n; ++i) {
    objects.push_back("o" + std::to_string(i));
    p.objects.push_back({objects.back(), pick(rng, kinds)});
  }
  p.init = random_configuration(rng, objects, positions);
  for (const auto& o : objects) {
    if (chance(rng, 0.5)) p.init.insert(Atom{"flat", {o}});
    if (chance(rng, 0.5)) p.init.insert(Atom{"thin", {o}});
    for (const auto& e : positions)
      if (chance(rng, 0.8)) p.init.insert(Atom{"stackable", {o, e}});
    for (const auto& e : objects)
      if (e != o && chance(rng, 0.6)) p.init.insert(Atom{"stackable", {o, e}});
  }
  const AtomSet target = random_configuration(rng, objects, positions);
  std::vector<Atom> on_facts;
  for (const auto& a : target)
    if (a.predicate == "on") on_facts.push_back(a);
  std::shuffle(on_facts.begin(), on_facts.end(), rng);
  const int goals = uniform(rng, 1, std::min<int>(3, static_cast<int>(on_facts.size())));
  for (int i = 0; i < goals; ++i) p.goal.insert(on_facts[static_cast<std::size_t>(i)]);
  return out;
}

WorldState random_state(std::mt19937& rng, const std::vector<std::string>& constants,
                        double density) {
  WorldState s;
  for (const auto& a : constants) {
    for (const char* unary : {"clear", "flat", "thin"})
      if (chance(rng, density)) s.insert(Atom{unary, {a}});
    for (const auto& b : constants) {
      if (a == b) continue;
      for (const char* binary : {"on", "stackable"})
        if (chance(rng, density * 0.5)) s.insert(Atom{binary, {a, b}});
    }
  }
  return s;
}

KnowledgeBase random_kb(std::mt19937& rng) {
  KnowledgeBase kb;
  const int extra_types = uniform(rng, 0, 3);
  for (int i = 1; i <= extra_types; ++i)
    kb.hierarchy.add("t" + std::to_string(i), pick(rng, kb.hierarchy.types()));
  const int extra_predicates = uniform(rng, 0, 2);
  for (int i = 1; i <= extra_predicates; ++i) {
    PredicateSignature sig{"p" + std::to_string(i), {}};
    const int arity = uniform(rng, 1, 2);
    for (int k = 1; k <= arity; ++k)
      sig.params.push_back({"?x" + std::to_string(k), pick(rng, kb.hierarchy.types())});
    kb.predicates.push_back(sig);
  }

  const int actions = uniform(rng, 1, 4);
  for (int i = 1; i <= actions; ++i) {
    ActionModel m;
    m.name = "a" + std::to_string(i);
    const int params = uniform(rng, 1, 3);
    std::vector<std::string> vars;
    for (int k = 1; k <= params; ++k) {
      vars.push_back("?v" + std::to_string(k));
      m.params.push_back({vars.back(), pick(rng, kb.hierarchy.types())});
    }
    auto random_atom = [&] {
      const auto& sig = pick(rng, kb.predicates);
      Atom a{sig.name, {}};
      for (std::size_t k = 0; k < sig.arity(); ++k) a.args.push_back(pick(rng, vars));
      return a;
    };
    const int atoms = uniform(rng, 1, 6);
    for (int k = 0; k < atoms; ++k) {
      Atom a = random_atom();
      switch (uniform(rng, 0, 2)) {
        case 0: m.pre.insert(a); break;
        case 1: if (!m.eff_del.contains(a)) m.eff_add.insert(a); break;
        default: if (!m.eff_add.contains(a)) m.eff_del.insert(a); break;
      }
    }
    kb.actions[m.name] = m;
  }
  return kb;
}

PlanningProblem random_pddl_problem(std::mt19937& rng, const KnowledgeBase& kb) {
  PlanningProblem p;
  p.name = "prob" + std::to_string(uniform(rng, 0, 999));
  const int n = uniform(rng, 1, 6);
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) {
    names.push_back("c" + std::to_string(i));
    p.objects.push_back({names.back(), pick(rng, kb.hierarchy.types())});
  }
  auto random_fact = [&] {
    const auto& sig = pick(rng, kb.predicates);
    Atom a{sig.name, {}};
    for (std::size_t k = 0; k < sig.arity(); ++k) a.args.push_back(pick(rng, names));
    return a;
  };
  const int init = uniform(rng, 0, 8);
  for (int i = 0; i < init; ++i) p.init.insert(random_fact());
  const int goal = uniform(rng, 0, 3);
  for (int i = 0; i < goal; ++i) p.goal.insert(random_fact());
  return p;
}

KnowledgeBase pddl_view(KnowledgeBase kb) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto lower_atoms = [&](const AtomSet& atoms) {
    AtomSet out;
    for (Atom a : atoms) {
      for (auto& t : a.args)
        if (!t.empty() && t[0] == '?') t = lower(t);
      out.insert(std::move(a));
    }
    return out;
  };
  for (auto& [_, m] : kb.actions) {
    m.keyframes.clear();
    m.arm = Arm::suction;
    for (auto& p : m.params) p.name = lower(p.name);
    m.pre = lower_atoms(m.pre);
    m.eff_add = lower_atoms(m.eff_add);
    m.eff_del = lower_atoms(m.eff_del);
  }
  return kb;
}

std::size_t reachable_states(const KnowledgeBase& kb, const PlanningProblem& problem,
                             std::size_t limit) {
  // Facts are numbered and states packed into bit vectors so that large
  // state spaces can be counted quickly.
  const auto actions = ground(kb, problem.objects);
  std::map<Atom, std::size_t> index;
  auto id = [&](const Atom& a) { return index.try_emplace(a, index.size()).first->second; };
  for (const auto& f : problem.init) id(f);
  for (const auto& a : actions) {
    for (const auto& f : a.pre) id(f);
    for (const auto& f : a.eff_add) id(f);
    for (const auto& f : a.eff_del) id(f);
  }
  using Bits = std::vector<std::uint64_t>;
  const std::size_t words = index.size() / 64 + 1;
  auto pack = [&](const AtomSet& atoms) {
    Bits b(words, 0);
    for (const auto& f : atoms) {
      const std::size_t i = index.at(f);
      b[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return b;
  };
  struct Op {
    Bits pre, add, del;
  };
  std::vector<Op> ops;
  for (const auto& a : actions) ops.push_back({pack(a.pre), pack(a.eff_add), pack(a.eff_del)});
  struct Hash {
    std::size_t operator()(const Bits& b) const {
      std::size_t h = 0;
      for (auto w : b) h = h * 1000003u ^ std::hash<std::uint64_t>{}(w);
      return h;
    }
  };
  std::unordered_set<Bits, Hash> seen;
  std::deque<Bits> frontier;
  const Bits init = pack(problem.init);
  seen.insert(init);
  frontier.push_back(init);
  while (!frontier.empty() && seen.size() < limit) {
    const Bits s = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& op : ops) {
      bool applicable = true;
      for (std::size_t w = 0; w < words && applicable; ++w)
        applicable = (op.pre[w] & ~s[w]) == 0;
      if (!applicable) continue;
      Bits next(words);
      for (std::size_t w = 0; w < words; ++w) next[w] = (s[w] & ~op.del[w]) | op.add[w];
      if (seen.insert(next).second) frontier.push_back(std::move(next));
    }
  }
  return seen.size();
}

Request request(std::string method, std::string path, Json body) {
  Request r;
  r.method = std::move(method);
  r.path = std::move(path);
  const auto q = r.path.find('?');
  if (q != std::string::npos) {
    std::istringstream in(r.path.substr(q + 1));
    std::string kv;
    while (std::getline(in, kv, '&')) {
      const auto eq = kv.find('=');
      r.query[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
    }
    r.path.resize(q);
  }
  r.body = std::move(body);
  return r;
}

}  // namespace iroplan::fixtures

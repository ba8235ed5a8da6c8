#include "mst/env.hpp"

#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "mst/syntax.hpp"

namespace mst {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Canonical text of an environment, used as a visited-set key.
std::string key_of(const Delta& d) {
  std::string k;
  for (auto& [n, s] : d) k += n.str() + ":" + to_string(s) + ";";
  return k;
}

STypePtr head(const STypePtr& s) {
  STypePtr t = s;
  for (int guard = 0; t->kind == SType::Kind::Rec && guard < 64; ++guard) t = unfold(t);
  return t;
}

}  // namespace

TypeEnv parse_env(const std::string& text) {
  TypeEnv env;
  std::istringstream in(text);
  std::string line;
  enum { None, G, D } section = None;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t.rfind("//", 0) == 0 || t[0] == '%') continue;
    if (t == "[gamma]") {
      section = G;
      continue;
    }
    if (t == "[delta]") {
      section = D;
      continue;
    }
    auto colon = t.find(':');
    if (section == None || colon == std::string::npos)
      throw SyntaxError("env line " + std::to_string(lineno) + ": expected a section header or `name : type`");
    Name n = parse_name(trim(t.substr(0, colon)), {true});
    std::string ty = trim(t.substr(colon + 1));
    try {
      if (section == G) {
        n.kind = NameKind::Shared;
        auto v = parse_value_type(ty);
        if (v->kind == VType::Kind::Session)
          throw SyntaxError("session types belong in [delta]");
        env.gamma[n] = v;
      } else {
        n.kind = NameKind::Session;
        env.delta[n] = parse_session_type(ty);
      }
    } catch (const SyntaxError& e) {
      throw SyntaxError("env line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (auto& [n, _] : env.delta)
    if (env.gamma.count(n)) throw SyntaxError("name " + n.str() + " is in both gamma and delta");
  return env;
}

std::string print_env(const TypeEnv& env) {
  std::string out = "[gamma]\n";
  for (auto& [n, v] : env.gamma) out += n.str() + " : " + to_string(v) + "\n";
  out += "[delta]\n";
  for (auto& [n, s] : env.delta) out += n.str() + " : " + to_string(s) + "\n";
  return out;
}

ProcPtr apply_env_kinds(const ProcPtr& p, const TypeEnv& env) {
  Subst s;
  for (auto& n : free_names(p)) {
    auto it = env.gamma.find(n);
    if (it != env.gamma.end() && it->second->kind == VType::Kind::Shared && n.kind != NameKind::Shared) {
      Name m = n;
      m.kind = NameKind::Shared;
      s.bind(n, m);
    }
  }
  return s.empty() ? p : substitute(p, s);
}

TypeEnv init_env(const TypeEnv& env) {
  TypeEnv out;
  for (auto& [n, v] : env.gamma) out.gamma[n.indexed() ? n : n.with_index(1)] = v;
  for (auto& [n, s] : env.delta) out.delta[n.indexed() ? n : n.with_index(1)] = s;
  return out;
}

TypeEnv decompose_env(const TypeEnv& env, Mode mode) {
  TypeEnv out;
  for (auto& [n, v] : env.gamma) {
    if (!n.indexed() && !n.is_propagator()) throw TypeError("decompose_env: unindexed name " + n.str());
    auto parts = mode == Mode::Opt ? decompose_opt(v) : decompose_composed(v);
    auto names = bname(n, v, mode);
    for (std::size_t i = 0; i < names.size(); ++i) out.gamma[names[i]] = parts[i];
  }
  for (auto& [n, s] : env.delta) {
    if (!n.indexed() && !n.is_propagator()) throw TypeError("decompose_env: unindexed name " + n.str());
    auto parts = mode == Mode::Opt ? decompose_opt(s) : decompose_composed(s);
    auto names = bname(n, s, mode);
    for (std::size_t i = 0; i < names.size(); ++i) out.delta[names[i]] = parts[i];
  }
  return out;
}

bool env_balanced(const Delta& d) {
  for (auto& [n, s] : d) {
    auto it = d.find(n.co());
    if (it == d.end()) continue;
    if (!type_equal(it->second, dual(s)) && !type_equal(head(it->second), head(dual(s)))) return false;
  }
  return true;
}

std::vector<Delta> env_reducts(const Delta& d) {
  std::vector<Delta> out;
  for (auto& [n, s] : d) {
    if (n.dual) continue;
    auto it = d.find(n.co());
    if (it == d.end()) continue;
    auto a = head(s), b = head(it->second);
    using K = SType::Kind;
    auto fire = [&](const STypePtr& na, const STypePtr& nb) {
      Delta r = d;
      r[n] = na;
      r[n.co()] = nb;
      out.push_back(std::move(r));
    };
    if ((a->kind == K::Out && b->kind == K::In) || (a->kind == K::In && b->kind == K::Out)) {
      if (type_equal(a->payload, b->payload)) fire(a->cont, b->cont);
    } else if ((a->kind == K::Select && b->kind == K::Branch) || (a->kind == K::Branch && b->kind == K::Select)) {
      auto& sel = a->kind == K::Select ? a : b;
      auto& bra = a->kind == K::Select ? b : a;
      for (auto& [l, sl] : sel->branches) {
        for (auto& [m, bm] : bra->branches) {
          if (l != m) continue;
          if (a->kind == K::Select)
            fire(sl, bm);
          else
            fire(bm, sl);
        }
      }
    }
  }
  return out;
}

Delta env_reduce(const Delta& d) {
  auto rs = env_reducts(d);
  return rs.empty() ? d : rs.front();
}

bool delta_equal(const Delta& a, const Delta& b) {
  if (a.size() != b.size()) return false;
  for (auto& [n, s] : a) {
    auto it = b.find(n);
    if (it == b.end() || !type_equal(s, it->second)) return false;
  }
  return true;
}

bool env_confluent(const Delta& a, const Delta& b, std::size_t max_states) {
  auto closure = [&](const Delta& start) {
    std::map<std::string, Delta> seen;
    std::deque<Delta> work{start};
    seen[key_of(start)] = start;
    while (!work.empty() && seen.size() < max_states) {
      Delta cur = work.front();
      work.pop_front();
      for (auto& r : env_reducts(cur)) {
        auto k = key_of(r);
        if (seen.emplace(k, r).second) work.push_back(r);
      }
    }
    return seen;
  };
  auto ca = closure(a);
  auto cb = closure(b);
  for (auto& [k, da] : ca) {
    if (cb.count(k)) return true;
    for (auto& [_, db] : cb)
      if (delta_equal(da, db)) return true;
  }
  return false;
}

bool check_minimality(const TypeEnv& env) {
  for (auto& [n, v] : env.gamma)
    if (!is_minimal(v)) return false;
  for (auto& [n, s] : env.delta)
    if (!is_minimal(s)) return false;
  return true;
}

bool annotations_minimal(const ProcPtr& p) {
  std::function<bool(const ProcPtr&)> go = [&](const ProcPtr& q) -> bool {
    switch (q->kind) {
      case Proc::Kind::Res:
        if (q->annot && !is_minimal(*q->annot)) return false;
        return go(q->cont);
      case Proc::Kind::Par: return go(q->cont) && go(q->right);
      case Proc::Kind::Bra:
        for (auto& [l, b] : q->branches)
          if (!go(b)) return false;
        return true;
      case Proc::Kind::Out:
      case Proc::Kind::In:
      case Proc::Kind::Sel:
      case Proc::Kind::Rec: return go(q->cont);
      default: return true;
    }
  };
  return go(p);
}

NameSet rec_free_names(const ProcPtr& p, const Delta& d) {
  NameSet out;
  for (auto& n : free_names(p)) {
    if (n.kind == NameKind::Shared || n.is_propagator()) continue;
    // names outside delta carry base values
    auto it = d.find(n);
    if (it != d.end() && is_tr_unfolding(it->second)) out.insert(n);
  }
  return out;
}

}  // namespace mst

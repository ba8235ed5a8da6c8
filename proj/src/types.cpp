#include "mst/types.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace mst {

namespace {

STypePtr make_s(SType s) { return std::make_shared<const SType>(std::move(s)); }
VTypePtr make_v(VType v) { return std::make_shared<const VType>(std::move(v)); }

}  // namespace

STypePtr s_end() {
  static const STypePtr e = make_s(SType{});
  return e;
}

STypePtr s_var(const std::string& t) {
  SType s;
  s.kind = SType::Kind::Var;
  s.var = t;
  return make_s(std::move(s));
}

STypePtr s_rec(const std::string& t, STypePtr body) {
  SType s;
  s.kind = SType::Kind::Rec;
  s.var = t;
  s.cont = std::move(body);
  return make_s(std::move(s));
}

STypePtr s_out(std::vector<VTypePtr> payload, STypePtr cont) {
  SType s;
  s.kind = SType::Kind::Out;
  s.payload = std::move(payload);
  s.cont = std::move(cont);
  return make_s(std::move(s));
}

STypePtr s_in(std::vector<VTypePtr> payload, STypePtr cont) {
  SType s;
  s.kind = SType::Kind::In;
  s.payload = std::move(payload);
  s.cont = std::move(cont);
  return make_s(std::move(s));
}

STypePtr s_select(std::vector<std::pair<std::string, STypePtr>> branches) {
  SType s;
  s.kind = SType::Kind::Select;
  s.branches = std::move(branches);
  return make_s(std::move(s));
}

STypePtr s_branch(std::vector<std::pair<std::string, STypePtr>> branches) {
  SType s;
  s.kind = SType::Kind::Branch;
  s.branches = std::move(branches);
  return make_s(std::move(s));
}

VTypePtr v_session(STypePtr st) {
  VType v;
  v.kind = VType::Kind::Session;
  v.session = std::move(st);
  return make_v(std::move(v));
}

VTypePtr v_shared(std::vector<VTypePtr> items) {
  VType v;
  v.kind = VType::Kind::Shared;
  v.items = std::move(items);
  return make_v(std::move(v));
}

VTypePtr v_int() {
  static const VTypePtr i = make_v(VType{});
  return i;
}

VTypePtr v_bool() {
  VType v;
  v.kind = VType::Kind::Bool;
  static const VTypePtr b = make_v(v);
  return b;
}

VTypePtr v_arrow(std::vector<VTypePtr> args, bool linear) {
  VType v;
  v.kind = VType::Kind::Arrow;
  v.items = std::move(args);
  v.linear = linear;
  return make_v(std::move(v));
}

// ---------------------------------------------------------------------------
// Equality

namespace {

using VarPairs = std::vector<std::pair<std::string, std::string>>;

bool veq(const VTypePtr& a, const VTypePtr& b, VarPairs& env);

bool seq(const STypePtr& a, const STypePtr& b, VarPairs& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SType::Kind::End:
      return true;
    case SType::Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool l = it->first == a->var, r = it->second == b->var;
        if (l || r) return l && r;
      }
      return a->var == b->var;
    }
    case SType::Kind::Rec: {
      env.emplace_back(a->var, b->var);
      bool ok = seq(a->cont, b->cont, env);
      env.pop_back();
      return ok;
    }
    case SType::Kind::Out:
    case SType::Kind::In: {
      if (a->payload.size() != b->payload.size()) return false;
      for (std::size_t i = 0; i < a->payload.size(); ++i)
        if (!veq(a->payload[i], b->payload[i], env)) return false;
      return seq(a->cont, b->cont, env);
    }
    case SType::Kind::Select:
    case SType::Kind::Branch: {
      if (a->branches.size() != b->branches.size()) return false;
      for (std::size_t i = 0; i < a->branches.size(); ++i) {
        if (a->branches[i].first != b->branches[i].first) return false;
        if (!seq(a->branches[i].second, b->branches[i].second, env)) return false;
      }
      return true;
    }
  }
  return false;
}

bool veq(const VTypePtr& a, const VTypePtr& b, VarPairs& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case VType::Kind::Int:
    case VType::Kind::Bool:
      return true;
    case VType::Kind::Session:
      return seq(a->session, b->session, env);
    case VType::Kind::Arrow:
      if (a->linear != b->linear) return false;
      [[fallthrough]];
    case VType::Kind::Shared: {
      if (a->items.size() != b->items.size()) return false;
      for (std::size_t i = 0; i < a->items.size(); ++i)
        if (!veq(a->items[i], b->items[i], env)) return false;
      return true;
    }
  }
  return false;
}

}  // namespace

bool type_equal(const STypePtr& a, const STypePtr& b) {
  VarPairs env;
  return seq(a, b, env);
}

bool type_equal(const VTypePtr& a, const VTypePtr& b) {
  VarPairs env;
  return veq(a, b, env);
}

bool type_equal(const std::vector<VTypePtr>& a, const std::vector<VTypePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!type_equal(a[i], b[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_s(std::ostream& os, const STypePtr& s);

void print_v(std::ostream& os, const VTypePtr& v) {
  switch (v->kind) {
    case VType::Kind::Int: os << "Int"; break;
    case VType::Kind::Bool: os << "Bool"; break;
    case VType::Kind::Session: print_s(os, v->session); break;
    case VType::Kind::Shared:
      os << '<';
      for (std::size_t i = 0; i < v->items.size(); ++i) {
        if (i) os << ", ";
        print_v(os, v->items[i]);
      }
      os << '>';
      break;
    case VType::Kind::Arrow:
      os << '(';
      for (std::size_t i = 0; i < v->items.size(); ++i) {
        if (i) os << ", ";
        print_v(os, v->items[i]);
      }
      os << (v->linear ? ") -o *" : ") -> *");
      break;
  }
}

void print_s(std::ostream& os, const STypePtr& s) {
  switch (s->kind) {
    case SType::Kind::End: os << "end"; break;
    case SType::Kind::Var: os << s->var; break;
    case SType::Kind::Rec:
      os << "mu " << s->var << '.';
      print_s(os, s->cont);
      break;
    case SType::Kind::Out:
    case SType::Kind::In:
      os << (s->kind == SType::Kind::Out ? "!(" : "?(");
      for (std::size_t i = 0; i < s->payload.size(); ++i) {
        if (i) os << ", ";
        print_v(os, s->payload[i]);
      }
      os << ").";
      print_s(os, s->cont);
      break;
    case SType::Kind::Select:
    case SType::Kind::Branch:
      os << (s->kind == SType::Kind::Select ? "+{" : "&{");
      for (std::size_t i = 0; i < s->branches.size(); ++i) {
        if (i) os << ", ";
        os << s->branches[i].first << ": ";
        print_s(os, s->branches[i].second);
      }
      os << '}';
      break;
  }
}

}  // namespace

std::string to_string(const STypePtr& s) {
  std::ostringstream os;
  print_s(os, s);
  return os.str();
}

std::string to_string(const VTypePtr& v) {
  std::ostringstream os;
  print_v(os, v);
  return os.str();
}

std::string to_string(const std::vector<VTypePtr>& vs) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) os << ", ";
    print_v(os, vs[i]);
  }
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// Substitution, duality, unfolding

STypePtr subst_tvar(const STypePtr& s, const std::string& t, const STypePtr& by) {
  switch (s->kind) {
    case SType::Kind::End:
      return s;
    case SType::Kind::Var:
      return s->var == t ? by : s;
    case SType::Kind::Rec:
      if (s->var == t) return s;
      return s_rec(s->var, subst_tvar(s->cont, t, by));
    case SType::Kind::Out:
    case SType::Kind::In: {
      std::vector<VTypePtr> p;
      for (auto& v : s->payload) p.push_back(subst_tvar(v, t, by));
      auto c = subst_tvar(s->cont, t, by);
      return s->kind == SType::Kind::Out ? s_out(std::move(p), c) : s_in(std::move(p), c);
    }
    case SType::Kind::Select:
    case SType::Kind::Branch: {
      std::vector<std::pair<std::string, STypePtr>> bs;
      for (auto& [l, b] : s->branches) bs.emplace_back(l, subst_tvar(b, t, by));
      return s->kind == SType::Kind::Select ? s_select(std::move(bs)) : s_branch(std::move(bs));
    }
  }
  return s;
}

VTypePtr subst_tvar(const VTypePtr& v, const std::string& t, const STypePtr& by) {
  switch (v->kind) {
    case VType::Kind::Session:
      return v_session(subst_tvar(v->session, t, by));
    case VType::Kind::Shared:
    case VType::Kind::Arrow: {
      std::vector<VTypePtr> items;
      for (auto& i : v->items) items.push_back(subst_tvar(i, t, by));
      if (v->kind == VType::Kind::Shared) return v_shared(std::move(items));
      return v_arrow(std::move(items), v->linear);
    }
    default:
      return v;
  }
}

namespace {

// Payloads keep their polarity; a recursion variable escaping into a payload
// is replaced by the recursive type it refers to.
STypePtr dual_in(const STypePtr& s, std::map<std::string, STypePtr>& binders) {
  auto fix_payload = [&](const std::vector<VTypePtr>& ps) {
    std::vector<VTypePtr> out;
    for (auto& v : ps) {
      VTypePtr w = v;
      for (auto& [t, orig] : binders) w = subst_tvar(w, t, orig);
      out.push_back(w);
    }
    return out;
  };
  switch (s->kind) {
    case SType::Kind::End:
    case SType::Kind::Var:
      return s;
    case SType::Kind::Rec: {
      auto saved = binders.find(s->var) != binders.end() ? binders[s->var] : nullptr;
      binders[s->var] = s;
      auto body = dual_in(s->cont, binders);
      if (saved)
        binders[s->var] = saved;
      else
        binders.erase(s->var);
      return s_rec(s->var, body);
    }
    case SType::Kind::Out:
      return s_in(fix_payload(s->payload), dual_in(s->cont, binders));
    case SType::Kind::In:
      return s_out(fix_payload(s->payload), dual_in(s->cont, binders));
    case SType::Kind::Select:
    case SType::Kind::Branch: {
      std::vector<std::pair<std::string, STypePtr>> bs;
      for (auto& [l, b] : s->branches) bs.emplace_back(l, dual_in(b, binders));
      return s->kind == SType::Kind::Select ? s_branch(std::move(bs)) : s_select(std::move(bs));
    }
  }
  return s;
}

}  // namespace

STypePtr dual(const STypePtr& s) {
  std::map<std::string, STypePtr> binders;
  return dual_in(s, binders);
}

STypePtr unfold(const STypePtr& s) {
  STypePtr cur = s;
  for (int guard = 0; cur->kind == SType::Kind::Rec && guard < 64; ++guard)
    cur = subst_tvar(cur->cont, cur->var, cur);
  return cur;
}

bool is_closed(const STypePtr& s) {
  std::function<bool(const STypePtr&, std::vector<std::string>&)> go;
  std::function<bool(const VTypePtr&, std::vector<std::string>&)> gov =
      [&](const VTypePtr& v, std::vector<std::string>& bound) -> bool {
    if (v->kind == VType::Kind::Session) return go(v->session, bound);
    for (auto& i : v->items)
      if (!gov(i, bound)) return false;
    return true;
  };
  go = [&](const STypePtr& x, std::vector<std::string>& bound) -> bool {
    switch (x->kind) {
      case SType::Kind::End: return true;
      case SType::Kind::Var: return std::find(bound.begin(), bound.end(), x->var) != bound.end();
      case SType::Kind::Rec: {
        bound.push_back(x->var);
        bool ok = go(x->cont, bound);
        bound.pop_back();
        return ok;
      }
      case SType::Kind::Out:
      case SType::Kind::In:
        for (auto& p : x->payload)
          if (!gov(p, bound)) return false;
        return go(x->cont, bound);
      case SType::Kind::Select:
      case SType::Kind::Branch:
        for (auto& b : x->branches)
          if (!go(b.second, bound)) return false;
        return true;
    }
    return true;
  };
  std::vector<std::string> bound;
  return go(s, bound);
}

bool is_guarded(const STypePtr& s) {
  // unguarded: variables reachable from their binder without crossing a prefix
  std::function<bool(const STypePtr&, std::set<std::string>&)> go =
      [&](const STypePtr& x, std::set<std::string>& exposed) -> bool {
    switch (x->kind) {
      case SType::Kind::End: return true;
      case SType::Kind::Var: return exposed.count(x->var) == 0;
      case SType::Kind::Rec: {
        auto inner = exposed;
        inner.insert(x->var);
        return go(x->cont, inner);
      }
      case SType::Kind::Out:
      case SType::Kind::In: {
        std::set<std::string> none;
        for (auto& p : x->payload)
          if (p->kind == VType::Kind::Session && !go(p->session, none)) return false;
        return go(x->cont, none);
      }
      case SType::Kind::Select:
      case SType::Kind::Branch: {
        std::set<std::string> none;
        for (auto& b : x->branches)
          if (!go(b.second, none)) return false;
        return true;
      }
    }
    return true;
  };
  std::set<std::string> exposed;
  return go(s, exposed);
}

// ---------------------------------------------------------------------------
// Predicates

bool is_end(const STypePtr& s) { return s->kind == SType::Kind::End; }

bool is_prefix(const STypePtr& s) {
  return s->kind == SType::Kind::Out || s->kind == SType::Kind::In;
}

bool is_tail_recursive(const STypePtr& s) {
  if (s->kind != SType::Kind::Rec) return false;
  STypePtr cur = s->cont;
  int n = 0;
  while (is_prefix(cur)) {
    cur = cur->cont;
    ++n;
  }
  return n > 0 && cur->kind == SType::Kind::Var && cur->var == s->var;
}

bool is_tail_recursive(const VTypePtr& v) {
  return v->kind == VType::Kind::Session && is_tail_recursive(v->session);
}

bool is_tr_unfolding(const STypePtr& s) {
  std::vector<STypePtr> chain;
  STypePtr cur = s;
  while (is_prefix(cur)) {
    chain.push_back(cur);
    cur = cur->cont;
  }
  if (!is_tail_recursive(cur)) return false;
  if (chain.empty()) return true;
  // The prefixes in front of the μ must be a suffix of its unfolding.
  std::vector<STypePtr> body;
  for (STypePtr u = unfold(cur); is_prefix(u); u = u->cont) {
    body.push_back(u);
    if (u->cont->kind == SType::Kind::Rec) break;
  }
  if (chain.size() >= body.size()) return false;
  return type_equal(s, body[body.size() - chain.size()]);
}

bool is_linear(const VTypePtr& v) {
  if (v->kind != VType::Kind::Session) return false;
  return !is_end(v->session) && !is_tr_unfolding(v->session);
}

bool is_minimal(const VTypePtr& v) {
  switch (v->kind) {
    case VType::Kind::Session: return is_minimal(v->session);
    case VType::Kind::Shared:
    case VType::Kind::Arrow:
      for (auto& i : v->items)
        if (!is_minimal(i)) return false;
      return true;
    default: return true;
  }
}

bool is_minimal(const STypePtr& s) {
  auto gamma = [](const STypePtr& x) {
    return x->kind == SType::Kind::End || x->kind == SType::Kind::Var;
  };
  auto payload_ok = [](const std::vector<VTypePtr>& p) {
    for (auto& v : p)
      if (!is_minimal(v)) return false;
    return true;
  };
  switch (s->kind) {
    case SType::Kind::End:
    case SType::Kind::Var: return true;
    case SType::Kind::Rec: return is_minimal(s->cont);
    case SType::Kind::Out:
    case SType::Kind::In: return gamma(s->cont) && payload_ok(s->payload);
    case SType::Kind::Select:
    case SType::Kind::Branch:
      for (auto& [l, b] : s->branches) {
        if (!is_prefix(b) || !gamma(b->cont) || !payload_ok(b->payload)) return false;
      }
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Optimized decomposition

std::vector<VTypePtr> decompose_opt(const VTypePtr& c) {
  switch (c->kind) {
    case VType::Kind::Int:
    case VType::Kind::Bool:
      return {c};
    case VType::Kind::Shared: {
      std::vector<VTypePtr> inner;
      for (auto& i : c->items)
        for (auto& d : decompose_opt(i)) inner.push_back(d);
      return {v_shared(std::move(inner))};
    }
    case VType::Kind::Arrow:
      throw TypeError("higher-order arrow types have no first-order decomposition");
    case VType::Kind::Session: {
      std::vector<VTypePtr> out;
      for (auto& s : decompose_opt(c->session)) out.push_back(v_session(s));
      return out;
    }
  }
  return {};
}

namespace {

std::vector<VTypePtr> payload_opt(const std::vector<VTypePtr>& p) {
  std::vector<VTypePtr> out;
  for (auto& v : p)
    for (auto& d : decompose_opt(v)) out.push_back(d);
  return out;
}

}  // namespace

std::vector<STypePtr> decompose_rec_body(const STypePtr& body, const std::string& t) {
  std::vector<STypePtr> out;
  STypePtr cur = body;
  while (is_prefix(cur)) {
    auto p = payload_opt(cur->payload);
    auto m = cur->kind == SType::Kind::Out ? s_out(std::move(p), s_var(t)) : s_in(std::move(p), s_var(t));
    out.push_back(s_rec(t, m));
    cur = cur->cont;
  }
  if (!(cur->kind == SType::Kind::Var && cur->var == t))
    throw TypeError("recursive decomposition expects a tail-recursive body: " + to_string(body));
  return out;
}

std::vector<STypePtr> decompose_partial(const STypePtr& s) {
  STypePtr cur = s;
  while (is_prefix(cur)) cur = cur->cont;
  if (!is_tail_recursive(cur))
    throw TypeError("not an unfolding of a tail-recursive type: " + to_string(s));
  return decompose_rec_body(cur->cont, cur->var);
}

std::vector<STypePtr> decompose_opt(const STypePtr& s) {
  if (!is_closed(s)) throw TypeError("cannot decompose open type " + to_string(s));
  switch (s->kind) {
    case SType::Kind::End:
      return {s};
    case SType::Kind::Var:
      throw TypeError("cannot decompose type variable " + s->var);
    case SType::Kind::Rec:
      if (!is_tail_recursive(s))
        throw TypeError("recursive type is not tail-recursive: " + to_string(s));
      return decompose_rec_body(s->cont, s->var);
    case SType::Kind::Out:
    case SType::Kind::In: {
      if (is_tr_unfolding(s)) return decompose_partial(s);
      auto p = payload_opt(s->payload);
      auto head = s->kind == SType::Kind::Out ? s_out(std::move(p), s_end()) : s_in(std::move(p), s_end());
      std::vector<STypePtr> out{head};
      if (!is_end(s->cont))
        for (auto& r : decompose_opt(s->cont)) out.push_back(r);
      return out;
    }
    case SType::Kind::Branch: {
      std::vector<std::pair<std::string, STypePtr>> bs;
      for (auto& [l, b] : s->branches) {
        std::vector<VTypePtr> p;
        for (auto& d : decompose_opt(b)) p.push_back(v_session(d));
        bs.emplace_back(l, s_in(std::move(p), s_end()));
      }
      return {s_branch(std::move(bs))};
    }
    case SType::Kind::Select: {
      std::vector<std::pair<std::string, STypePtr>> bs;
      for (auto& [l, b] : s->branches) {
        std::vector<VTypePtr> p;
        for (auto& d : decompose_opt(dual(b))) p.push_back(v_session(d));
        bs.emplace_back(l, s_out(std::move(p), s_end()));
      }
      return {s_select(std::move(bs))};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Composed decomposition

VTypePtr trigger_type(const std::vector<VTypePtr>& payload) {
  auto inner = v_shared({v_session(s_in(payload, s_end()))});
  return v_shared({v_session(s_in({v_session(s_in({inner}, s_end()))}, s_end()))});
}

std::vector<VTypePtr> decompose_composed(const VTypePtr& c) {
  switch (c->kind) {
    case VType::Kind::Int:
    case VType::Kind::Bool:
      return {c};
    case VType::Kind::Shared: {
      std::vector<VTypePtr> inner;
      for (auto& i : c->items)
        for (auto& d : decompose_composed(i)) inner.push_back(d);
      // shared channels carry triggers like every other channel here
      return {v_shared({trigger_type(inner)})};
    }
    case VType::Kind::Arrow:
      throw TypeError("higher-order arrow types have no first-order decomposition");
    case VType::Kind::Session: {
      std::vector<VTypePtr> out;
      for (auto& s : decompose_composed(c->session)) out.push_back(v_session(s));
      return out;
    }
  }
  return {};
}

namespace {

std::vector<VTypePtr> payload_composed(const std::vector<VTypePtr>& p) {
  std::vector<VTypePtr> out;
  for (auto& v : p)
    for (auto& d : decompose_composed(v)) out.push_back(d);
  return out;
}

std::vector<STypePtr> composed_rec_body(const STypePtr& body, const std::string& t) {
  std::vector<STypePtr> out;
  STypePtr cur = body;
  while (is_prefix(cur)) {
    std::vector<VTypePtr> p{trigger_type(payload_composed(cur->payload))};
    auto m = cur->kind == SType::Kind::Out ? s_out(std::move(p), s_var(t)) : s_in(std::move(p), s_var(t));
    out.push_back(s_rec(t, m));
    cur = cur->cont;
  }
  if (!(cur->kind == SType::Kind::Var && cur->var == t))
    throw TypeError("recursive decomposition expects a tail-recursive body: " + to_string(body));
  return out;
}

std::vector<STypePtr> composed_partial(const STypePtr& s) {
  STypePtr cur = s;
  while (is_prefix(cur)) cur = cur->cont;
  if (!is_tail_recursive(cur))
    throw TypeError("not an unfolding of a tail-recursive type: " + to_string(s));
  return composed_rec_body(cur->cont, cur->var);
}

}  // namespace

std::vector<STypePtr> decompose_composed(const STypePtr& s) {
  if (!is_closed(s)) throw TypeError("cannot decompose open type " + to_string(s));
  switch (s->kind) {
    case SType::Kind::End:
      return {s};
    case SType::Kind::Var:
      throw TypeError("cannot decompose type variable " + s->var);
    case SType::Kind::Rec:
      if (!is_tail_recursive(s))
        throw TypeError("recursive type is not tail-recursive: " + to_string(s));
      return composed_rec_body(s->cont, s->var);
    case SType::Kind::Out:
    case SType::Kind::In: {
      if (is_tr_unfolding(s)) return composed_partial(s);
      std::vector<VTypePtr> p{trigger_type(payload_composed(s->payload))};
      auto head = s->kind == SType::Kind::Out ? s_out(std::move(p), s_end()) : s_in(std::move(p), s_end());
      std::vector<STypePtr> out{head};
      if (!is_end(s->cont))
        for (auto& r : decompose_composed(s->cont)) out.push_back(r);
      return out;
    }
    case SType::Kind::Select:
    case SType::Kind::Branch:
      throw TypeError("unsupported: labeled choice in the composed decomposition");
  }
  return {};
}

std::size_t block_size(const STypePtr& s, Mode mode) {
  return mode == Mode::Opt ? decompose_opt(s).size() : decompose_composed(s).size();
}

std::size_t block_size(const VTypePtr& c, Mode mode) {
  return mode == Mode::Opt ? decompose_opt(c).size() : decompose_composed(c).size();
}

int index_fn(const STypePtr& s, Mode mode) {
  if (!is_tr_unfolding(s)) throw TypeError("index function needs a tail-recursive unfolding: " + to_string(s));
  STypePtr cur = s->kind == SType::Kind::Rec ? subst_tvar(s->cont, s->var, s) : s;
  int l = 0;
  while (is_prefix(cur)) {
    cur = cur->cont;
    ++l;
  }
  // cur is the μ the prefix chain ends in
  int n = mode == Mode::Opt ? static_cast<int>(decompose_rec_body(cur->cont, cur->var).size())
                            : static_cast<int>(composed_rec_body(cur->cont, cur->var).size());
  return n - l + 1;
}

std::size_t spine_length(const STypePtr& s) {
  std::size_t n = 0;
  for (STypePtr cur = s; is_prefix(cur); cur = cur->cont) ++n;
  return n;
}

}  // namespace mst

#include "mst/typecheck.hpp"

#include "mst/syntax.hpp"

namespace mst {

namespace {

struct Failure {
  std::string rule, message;
  ProcPtr where;
};

struct Ctx {
  Gamma gamma;
  Delta delta;
  std::map<std::string, Delta> recvars;
};

std::string snippet(const ProcPtr& p) {
  auto s = print_process(p);
  if (s.size() > 72) s = s.substr(0, 69) + "...";
  return s;
}

STypePtr head(const STypePtr& s) {
  STypePtr t = s;
  for (int guard = 0; t->kind == SType::Kind::Rec && guard < 64; ++guard) t = unfold(t);
  return t;
}

bool same_type(const STypePtr& a, const STypePtr& b) {
  return type_equal(a, b) || type_equal(head(a), head(b));
}

bool same_type(const VTypePtr& a, const VTypePtr& b) {
  if (type_equal(a, b)) return true;
  if (a->kind == VType::Kind::Session && b->kind == VType::Kind::Session) return same_type(a->session, b->session);
  return false;
}

bool is_end_type(const STypePtr& s) { return s->kind == SType::Kind::End; }

class Checker {
 public:
  Delta residual;

  void check(Ctx c, const ProcPtr& p) {
    switch (p->kind) {
      case Proc::Kind::Nil: return nil(c, p);
      case Proc::Kind::Out: return output(c, p);
      case Proc::Kind::In: return input(c, p);
      case Proc::Kind::Sel: return select(c, p);
      case Proc::Kind::Bra: return branch(c, p);
      case Proc::Kind::Res: return restriction(c, p);
      case Proc::Kind::Par: return par(c, p);
      case Proc::Kind::Rec: return rec(c, p);
      case Proc::Kind::Var: return recvar(c, p);
      case Proc::Kind::App: fail("App", "higher-order application is not first-order typable", p);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& rule, const std::string& msg, const ProcPtr& p) {
    throw Failure{rule, msg, p};
  }

  void nil(const Ctx& c, const ProcPtr& p) {
    for (auto& [n, s] : c.delta) {
      if (!is_end_type(s)) fail("Nil", "session " + n.str() + " left at " + to_string(s), p);
      residual[n] = s;
    }
  }

  VTypePtr expr_type(const Ctx& c, const ValuePtr& v, const ProcPtr& p) {
    switch (v->kind) {
      case Value::Kind::Int: return v_int();
      case Value::Kind::Bool: return v_bool();
      case Value::Kind::Name: {
        auto it = c.gamma.find(v->name);
        if (it != c.gamma.end()) return it->second;
        auto jt = c.delta.find(v->name);
        if (jt != c.delta.end()) return v_session(jt->second);
        fail("Name", "unbound name " + v->name.str(), p);
      }
      case Value::Kind::Neg:
      case Value::Kind::Succ: {
        auto t = expr_type(c, v->lhs, p);
        if (t->kind != VType::Kind::Int) fail("Expr", "arithmetic on a non-Int value", p);
        return v_int();
      }
      case Value::Kind::Add: {
        auto a = expr_type(c, v->lhs, p);
        auto b = expr_type(c, v->rhs, p);
        if (a->kind != VType::Kind::Int || b->kind != VType::Kind::Int)
          fail("Expr", "addition of non-Int values", p);
        return v_int();
      }
      case Value::Kind::Abs: fail("Abs", "abstractions are not first-order values", p);
    }
    fail("Expr", "unknown value", p);
  }

  // Checks payload values against expected types, consuming delegated
  // sessions from delta.
  void send_payload(Ctx& c, const Name& subject, const std::vector<ValuePtr>& vs, const std::vector<VTypePtr>& ts,
                    const std::string& rule, const ProcPtr& p) {
    if (vs.size() != ts.size())
      fail(rule, "arity mismatch: sends " + std::to_string(vs.size()) + ", type expects " + std::to_string(ts.size()), p);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const auto& t = ts[i];
      const auto& v = vs[i];
      if (t->kind == VType::Kind::Session) {
        if (v->kind != Value::Kind::Name) fail(rule, "session payload must be a name", p);
        if (v->name == subject) fail(rule, "a session cannot be sent over itself", p);
        auto it = c.delta.find(v->name);
        if (it == c.delta.end()) fail(rule, "delegated name " + v->name.str() + " is not a live session", p);
        if (!same_type(it->second, t->session))
          fail(rule, "delegated " + v->name.str() + " has " + to_string(it->second) + ", expected " + to_string(t),
               p);
        c.delta.erase(it);
      } else if (t->kind == VType::Kind::Arrow) {
        fail(rule, "higher-order payloads are not first-order typable", p);
      } else {
        auto vt = expr_type(c, v, p);
        if (!same_type(vt, t))
          fail(rule, "payload " + print_value(v) + " has " + to_string(vt) + ", expected " + to_string(t), p);
      }
    }
  }

  void bind(Ctx& c, const Name& x, const VTypePtr& t, const ProcPtr& p) {
    auto it = c.delta.find(x);
    if (it != c.delta.end()) {
      if (!is_end_type(it->second)) fail("Bind", "binder " + x.str() + " shadows a live session", p);
      c.delta.erase(it);
    }
    c.gamma.erase(x);
    if (t->kind == VType::Kind::Session)
      c.delta[x] = t->session;
    else
      c.gamma[x] = t;
  }

  void output(Ctx c, const ProcPtr& p) {
    const Name& u = p->subject;
    if (auto it = c.delta.find(u); it != c.delta.end()) {
      auto s = head(it->second);
      if (s->kind != SType::Kind::Out) fail("Send", u.str() + " has " + to_string(it->second) + ", not an output", p);
      send_payload(c, u, p->payload, s->payload, "Send", p);
      c.delta[u] = s->cont;
      return check(std::move(c), p->cont);
    }
    if (auto it = c.gamma.find(u); it != c.gamma.end()) {
      if (it->second->kind != VType::Kind::Shared) fail("Req", u.str() + " is not a shared channel", p);
      auto items = it->second->items;
      send_payload(c, u, p->payload, items, "Req", p);
      return check(std::move(c), p->cont);
    }
    fail("Send", "unbound subject " + u.str(), p);
  }

  void input(Ctx c, const ProcPtr& p) {
    const Name& u = p->subject;
    std::vector<VTypePtr> ts;
    if (auto it = c.delta.find(u); it != c.delta.end()) {
      auto s = head(it->second);
      if (s->kind != SType::Kind::In) fail("Rcv", u.str() + " has " + to_string(it->second) + ", not an input", p);
      ts = s->payload;
      c.delta[u] = s->cont;
    } else if (auto jt = c.gamma.find(u); jt != c.gamma.end()) {
      if (jt->second->kind != VType::Kind::Shared) fail("Acc", u.str() + " is not a shared channel", p);
      ts = jt->second->items;
    } else {
      fail("Rcv", "unbound subject " + u.str(), p);
    }
    if (ts.size() != p->binders.size())
      fail("Rcv", "arity mismatch: binds " + std::to_string(p->binders.size()) + ", type carries " +
                      std::to_string(ts.size()),
           p);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (p->binders[i] == u) fail("Rcv", "binder shadows its own subject", p);
      bind(c, p->binders[i], ts[i], p);
    }
    check(std::move(c), p->cont);
  }

  void select(Ctx c, const ProcPtr& p) {
    auto it = c.delta.find(p->subject);
    if (it == c.delta.end()) fail("Sel", "unbound subject " + p->subject.str(), p);
    auto s = head(it->second);
    if (s->kind != SType::Kind::Select) fail("Sel", p->subject.str() + " has " + to_string(s) + ", not a selection", p);
    for (auto& [l, sl] : s->branches) {
      if (l == p->label) {
        c.delta[p->subject] = sl;
        return check(std::move(c), p->cont);
      }
    }
    fail("Sel", "label " + p->label + " not offered by " + to_string(s), p);
  }

  void branch(const Ctx& c, const ProcPtr& p) {
    auto it = c.delta.find(p->subject);
    if (it == c.delta.end()) fail("Bra", "unbound subject " + p->subject.str(), p);
    auto s = head(it->second);
    if (s->kind != SType::Kind::Branch) fail("Bra", p->subject.str() + " has " + to_string(s) + ", not a branching", p);
    if (s->branches.size() != p->branches.size()) fail("Bra", "branch labels differ from " + to_string(s), p);
    for (auto& [l, sl] : s->branches) {
      const ProcPtr* body = nullptr;
      for (auto& [m, q] : p->branches)
        if (m == l) body = &q;
      if (!body) fail("Bra", "missing branch " + l, p);
      Ctx ci = c;
      ci.delta[p->subject] = sl;
      check(std::move(ci), *body);
    }
  }

  void restriction(Ctx c, const ProcPtr& p) {
    const Name& n = p->subject;
    if (!p->annot) fail("Res", "restriction of " + n.str() + " needs a type annotation", p);
    const auto& t = *p->annot;
    for (const Name& m : {n, n.co()}) {
      auto it = c.delta.find(m);
      if (it != c.delta.end()) {
        if (!is_end_type(it->second)) fail("Res", "restriction shadows live session " + m.str(), p);
        c.delta.erase(it);
      }
      c.gamma.erase(m);
    }
    if (t->kind == VType::Kind::Session) {
      if (!is_closed(t->session)) fail("ResS", "open session annotation", p);
      c.delta[n] = t->session;
      c.delta[n.co()] = dual(t->session);
      check(std::move(c), p->cont);
    } else if (t->kind == VType::Kind::Shared) {
      c.gamma[n] = t;
      check(std::move(c), p->cont);
    } else {
      fail("Res", "restricted names must have a channel type", p);
    }
  }

  // Names a subprocess may own: its free names plus the snapshot of any free
  // recursion variable.
  NameSet owned(const Ctx& c, const ProcPtr& q) {
    NameSet fn = free_names(q);
    for (auto& x : free_recvars(q)) {
      auto it = c.recvars.find(x);
      if (it == c.recvars.end()) continue;
      for (auto& [n, s] : it->second) fn.insert(n);
    }
    return fn;
  }

  void par(const Ctx& c, const ProcPtr& p) {
    NameSet fl = owned(c, p->cont), fr = owned(c, p->right);
    Ctx cl{c.gamma, {}, c.recvars}, cr{c.gamma, {}, c.recvars};
    for (auto& [n, s] : c.delta) {
      bool l = fl.count(n) > 0, r = fr.count(n) > 0;
      if (is_end_type(s)) {
        if (l || !r) cl.delta[n] = s;
        if (r) cr.delta[n] = s;
        continue;
      }
      if (l && r) fail("Par", "linear name " + n.str() + " used by both sides", p);
      if (!l && !r) fail("Par", "session " + n.str() + " at " + to_string(s) + " is used by neither side", p);
      (l ? cl : cr).delta[n] = s;
    }
    check(std::move(cl), p->cont);
    check(std::move(cr), p->right);
  }

  void rec(Ctx c, const ProcPtr& p) {
    c.recvars[p->label] = c.delta;
    check(std::move(c), p->cont);
  }

  void recvar(const Ctx& c, const ProcPtr& p) {
    auto it = c.recvars.find(p->label);
    if (it == c.recvars.end()) fail("RVar", "unbound recursion variable " + p->label, p);
    auto strip = [](const Delta& d) {
      Delta out;
      for (auto& [n, s] : d)
        if (!is_end_type(s)) out[n] = s;
      return out;
    };
    Delta now = strip(c.delta), snap = strip(it->second);
    bool same = now.size() == snap.size();
    for (auto& [n, s] : now) {
      auto jt = snap.find(n);
      if (jt == snap.end() || !same_type(s, jt->second)) same = false;
    }
    if (!same) fail("RVar", "delta at " + p->label + " differs from the recursion snapshot", p);
    for (auto& [n, s] : c.delta) residual[n] = s;
  }
};

}  // namespace

CheckReport typecheck(const TypeEnv& env, const ProcPtr& p) {
  CheckReport rep;
  Checker ch;
  Ctx c{env.gamma, env.delta, {}};
  try {
    ch.check(std::move(c), p);
    rep.ok = true;
  } catch (const Failure& f) {
    rep.failures.push_back({snippet(f.where), f.rule, f.message});
  } catch (const TypeError& e) {
    rep.failures.push_back({snippet(p), "Type", e.what()});
  }
  rep.residual_delta = std::move(ch.residual);
  return rep;
}

}  // namespace mst

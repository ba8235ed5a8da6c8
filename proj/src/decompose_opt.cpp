#include <algorithm>
#include <functional>

#include "mst/decompose.hpp"
#include "mst/metrics.hpp"
#include "mst/syntax.hpp"
#include "mst/typecheck.hpp"

namespace mst {

namespace {

STypePtr head(const STypePtr& s) {
  STypePtr t = s;
  for (int guard = 0; t->kind == SType::Kind::Rec && guard < 64; ++guard) t = unfold(t);
  return t;
}

bool contains(const std::vector<Name>& xs, const Name& n) { return std::find(xs.begin(), xs.end(), n) != xs.end(); }

std::vector<Name> minus(const std::vector<Name>& xs, const std::vector<Name>& drop) {
  std::vector<Name> out;
  for (auto& x : xs)
    if (!contains(drop, x)) out.push_back(x);
  return out;
}

std::vector<Name> concat(std::vector<Name> a, const std::vector<Name>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<ValuePtr> as_values(const std::vector<Name>& ns) {
  std::vector<ValuePtr> out;
  for (auto& n : ns) out.push_back(v_name(n));
  return out;
}

// Source typing of indexed names plus the minimal types of their blocks.
struct Scope {
  Gamma gamma;
  Delta delta;
  std::map<Name, VTypePtr> dt;

  void add_block(const Name& n, const VTypePtr& t) {
    auto parts = decompose_opt(t);
    auto names = bname(n, t);
    for (std::size_t i = 0; i < names.size(); ++i) dt[names[i]] = parts[i];
  }
};

Scope scope_of(const TypeEnv& src) {
  Scope sc{src.gamma, src.delta, {}};
  auto d = decompose_env(src, Mode::Opt);
  for (auto& [n, t] : d.gamma) sc.dt[n] = t;
  for (auto& [n, s] : d.delta) sc.dt[n] = v_session(s);
  return sc;
}

// One mimicked prefix: the action itself plus how the context evolves.
struct Step {
  std::function<ProcPtr(ProcPtr)> act;
  ProcPtr next;                // continuation after index updates
  std::vector<Name> drop;      // the consumed linear subject
  std::vector<Name> fresh;     // received blocks, appended to the context
  std::vector<std::pair<Name, VTypePtr>> restricted;  // names bound after the trio input
  Scope scope;
};

class Breaker {
 public:
  PropTable* props;

  ProcPtr B(int k, const std::vector<Name>& x, const ProcPtr& p, const Scope& sc) {
    switch (p->kind) {
      case Proc::Kind::Out:
      case Proc::Kind::In: {
        Step st = p->kind == Proc::Kind::Out ? step_out(p, x, sc) : step_in(p, x, sc);
        auto z = concat(fnb(st.next, minus(x, st.drop)), fnb(st.next, st.fresh));
        note_lin(k, x, sc);
        auto trio = p_in(prop_lin(k), x, st.act(p_out(prop_lin(k + 1).co(), z, p_nil())));
        return p_par(trio, B(k + 1, z, st.next, st.scope));
      }
      case Proc::Kind::Sel: return select(k, x, p, sc);
      case Proc::Kind::Bra: return branch(k, x, p, sc);
      case Proc::Kind::Res: {
        Scope s2 = sc;
        auto [q, names] = open_restriction(p, x, s2);
        if (!is_tail_recursive(*p->annot)) return wrap(names, B(k, x, q, s2));
        std::vector<Name> ends;
        for (auto& [n, t] : names) {
          ends.push_back(n);
          ends.push_back(n.co());
        }
        std::vector<Name> plain, duals;
        for (auto& n : ends) (n.dual ? duals : plain).push_back(n);
        auto z = concat(fnb(q, x), fnb(q, concat(plain, duals)));
        note_lin(k, x, sc);
        auto trio = p_in(prop_lin(k), x, p_out(prop_lin(k + 1).co(), z, p_nil()));
        return wrap(names, p_par(trio, B(k + 1, z, q, s2)));
      }
      case Proc::Kind::Par: {
        int l = degree(p->cont, Mode::Opt);
        auto y = fnb(p->cont, x), z = fnb(p->right, x);
        note_lin(k, x, sc);
        auto trio = p_in(prop_lin(k), x,
                         p_out(prop_lin(k + 1).co(), y, p_out(prop_lin(k + l + 1).co(), z, p_nil())));
        return p_par({trio, B(k + 1, y, p->cont, sc), B(k + l + 1, z, p->right, sc)});
      }
      case Proc::Kind::Nil:
        note_lin(k, x, sc);
        return p_in(prop_lin(k), x, p_nil());
      case Proc::Kind::Rec: {
        auto z = fnb(p->cont, x);
        bool g = free_recvars(p->cont).count(p->label) > 0;
        Name crx = prop_rec_var(p->label);
        Name first = g ? prop_rec(k + 1).co() : prop_rec(k + 1);
        note_lin(k, x, sc);
        auto loop = p_rec(p->label, p_in(crx, z, p_out(first, z, p_var(p->label))));
        auto control = p_in(prop_lin(k), x, p_out(first, z, loop));
        auto body = Brec(k + 1, z, p->cont, sc, p->label, z, g);
        return p_res(crx, v_shared(types(z, sc)), p_par(control, body));
      }
      case Proc::Kind::Var: throw DecomposeError("process variable " + p->label + " outside its recursion");
      case Proc::Kind::App: throw DecomposeError("higher-order application in a first-order breakdown");
    }
    return p_nil();
  }

  ProcPtr Brec(int k, const std::vector<Name>& x, const ProcPtr& p, const Scope& sc, const std::string& var,
               const std::vector<Name>& gx, bool g, std::vector<std::pair<Name, VTypePtr>> pending = {}) {
    g = g && free_recvars(p).count(var) > 0;
    // Context entries the next trio keeps: g(X), then whatever q still uses.
    auto keep = [&](const std::vector<Name>& xs, const ProcPtr& q) {
      std::vector<Name> out;
      auto used = fnb(q, xs);
      for (auto& n : xs)
        if ((g && contains(gx, n)) || contains(used, n)) out.push_back(n);
      return out;
    };
    std::vector<Name> pend_names;
    for (auto& [n, t] : pending) {
      pend_names.push_back(n);
      if (t->kind == VType::Kind::Session) pend_names.push_back(n.co());
    }
    auto recv = minus(x, pend_names);
    // Wraps the body of a recursive trio: linear and guarded by X when g is
    // set, replicated on a shared propagator otherwise.
    auto trio = [&](const std::function<ProcPtr(ProcPtr)>& body, const std::vector<Name>& z, bool last_shared) {
      Name next = g ? prop_rec(k + 1).co() : prop_rec(k + 1);
      if (last_shared) next = prop_rec(k + 1);
      if (g) {
        note_rec_lin(k, recv, sc);
        return p_rec(var, p_in(prop_rec(k), recv, wrap(pending, body(p_out(next, z, p_var(var))))));
      }
      note_rec_shared(k, recv, sc);
      return p_rec(var, p_par(p_in(prop_rec(k), recv, wrap(pending, body(p_out(next, z, p_nil())))), p_var(var)));
    };
    switch (p->kind) {
      case Proc::Kind::Out:
      case Proc::Kind::In: {
        Step st = p->kind == Proc::Kind::Out ? step_out(p, x, sc) : step_in(p, x, sc);
        auto z = concat(keep(minus(x, st.drop), st.next), fnb(st.next, st.fresh));
        bool next_g = g && free_recvars(st.next).count(var) > 0;
        auto t = trio(st.act, z, !next_g);
        return p_par(t, Brec(k + 1, z, st.next, st.scope, var, gx, g));
      }
      case Proc::Kind::Res: {
        Scope s2 = sc;
        auto [q, names] = open_restriction(p, x, s2);
        std::vector<Name> ends;
        for (auto& [n, t] : names) {
          ends.push_back(n);
          if (t->kind == VType::Kind::Session) ends.push_back(n.co());
        }
        if (!is_tail_recursive(*p->annot)) {
          for (auto& e : names) pending.push_back(e);
          return Brec(k, concat(x, ends), q, s2, var, gx, g, pending);
        }
        std::vector<Name> plain, duals;
        for (auto& n : ends) (n.dual ? duals : plain).push_back(n);
        auto z = concat(keep(x, q), fnb(q, concat(plain, duals)));
        auto all = pending;
        for (auto& e : names) all.push_back(e);
        pending = all;
        bool next_g = g && free_recvars(q).count(var) > 0;
        auto t = trio([](ProcPtr c) { return c; }, z, !next_g);
        return p_par(t, Brec(k + 1, z, q, s2, var, gx, g));
      }
      case Proc::Kind::Par: {
        ProcPtr q1 = p->cont, q2 = p->right;
        bool x1 = free_recvars(q1).count(var) > 0, x2 = free_recvars(q2).count(var) > 0;
        if (x1 && x2)
          throw DecomposeError("unsupported: recursion variable " + var + " on both sides of a parallel composition");
        if (x2) std::swap(q1, q2);
        int l = degree(q1, Mode::Opt);
        auto y1 = keep(x, q1), y2 = fnb(q2, x);
        Name n1 = g ? prop_rec(k + 1).co() : prop_rec(k + 1);
        Name n2 = prop_rec(k + l + 1);
        ProcPtr t;
        if (g) {
          note_rec_lin(k, recv, sc);
          t = p_rec(var, p_in(prop_rec(k), recv,
                              wrap(pending, p_par(p_out(n1, y1, p_var(var)), p_out(n2, y2, p_nil())))));
        } else {
          note_rec_shared(k, recv, sc);
          t = p_rec(var, p_par(p_in(prop_rec(k), recv,
                                    wrap(pending, p_par(p_out(n1, y1, p_nil()), p_out(n2, y2, p_nil())))),
                               p_var(var)));
        }
        return p_par({t, Brec(k + 1, y1, q1, sc, var, gx, g), Brec(k + l + 1, y2, q2, sc, var, gx, false)});
      }
      case Proc::Kind::Var: {
        if (p->label != var) throw DecomposeError("unsupported: nested recursion variable " + p->label);
        note_rec_lin(k, recv, sc);
        return p_rec(var, p_in(prop_rec(k), recv, wrap(pending, p_out(prop_rec_var(var), recv, p_var(var)))));
      }
      case Proc::Kind::Nil: {
        note_rec_shared(k, recv, sc);
        return p_rec(var, p_par(p_in(prop_rec(k), recv, wrap(pending, p_nil())), p_var(var)));
      }
      case Proc::Kind::Rec: throw DecomposeError("unsupported: nested recursion inside rec " + var);
      case Proc::Kind::Sel:
      case Proc::Kind::Bra: throw DecomposeError("unsupported: labeled choice inside a recursion body");
      case Proc::Kind::App: throw DecomposeError("higher-order application in a first-order breakdown");
    }
    return p_nil();
  }

 private:
  std::vector<VTypePtr> types(const std::vector<Name>& xs, const Scope& sc) {
    std::vector<VTypePtr> out;
    for (auto& n : xs) {
      auto it = sc.dt.find(n);
      if (it == sc.dt.end()) throw DecomposeError("no decomposed type for context name " + n.str());
      out.push_back(it->second);
    }
    return out;
  }

  void note_lin(int k, const std::vector<Name>& x, const Scope& sc) {
    (*props)[prop_lin(k)] = v_session(s_in(types(x, sc), s_end()));
  }
  void note_rec_lin(int k, const std::vector<Name>& x, const Scope& sc) {
    (*props)[prop_rec(k)] = v_session(s_rec("t", s_in(types(x, sc), s_var("t"))));
  }
  void note_rec_shared(int k, const std::vector<Name>& x, const Scope& sc) {
    (*props)[prop_rec(k)] = v_shared(types(x, sc));
  }

  static ProcPtr wrap(const std::vector<std::pair<Name, VTypePtr>>& names, ProcPtr body) {
    for (auto it = names.rbegin(); it != names.rend(); ++it) body = p_res(it->first, it->second, body);
    return body;
  }

  // Picks an indexed binder for `b` that clashes with nothing in sight.
  static Name indexed_binder(const Name& b, const NameSet& avoid) {
    Name n = b.with_index(1);
    n.dual = false;
    auto clash = [&](const Name& m) {
      return std::any_of(avoid.begin(), avoid.end(), [&](const Name& a) { return a.plain().same_root(m); });
    };
    while (clash(n)) n = fresh_name(b).with_index(1);
    return n;
  }

  static NameSet in_sight(const ProcPtr& p, const std::vector<Name>& x) {
    NameSet s;
    for (auto& n : free_names(p)) s.insert(n.plain());
    for (auto& n : x) s.insert(n.plain());
    return s;
  }

  // Index l acting for u_i, and the continuation update.
  struct Subject {
    Name acting;
    bool linear = false;
    STypePtr type;  // unfolded head; null for shared subjects
    std::vector<VTypePtr> shared_items;
  };

  Subject subject(const Name& u, const Scope& sc) {
    Subject s;
    if (auto it = sc.delta.find(u); it != sc.delta.end()) {
      const auto& S = it->second;
      s.type = head(S);
      if (is_tr_unfolding(S)) {
        s.acting = u.with_index(u.index + index_fn(S) - 1);
      } else {
        s.acting = u;
        s.linear = true;
      }
      return s;
    }
    if (auto it = sc.gamma.find(u); it != sc.gamma.end() && it->second->kind == VType::Kind::Shared) {
      s.acting = u;
      s.shared_items = it->second->items;
      return s;
    }
    throw DecomposeError("no type for subject " + u.str());
  }

  void advance(const Subject& s, const Name& u, const STypePtr& cont, Scope& sc, Subst& sigma) {
    if (!s.type) return;
    if (s.linear) {
      sc.delta.erase(u);
      Name nxt = u.with_index(u.index + 1);
      sc.delta[nxt] = cont;
      sigma.bind(u, nxt);
    } else {
      sc.delta[u] = cont;
    }
  }

  Step step_out(const ProcPtr& p, const std::vector<Name>& x, const Scope& sc) {
    (void)x;
    Step st;
    st.scope = sc;
    const Name& u = p->subject;
    auto s = subject(u, sc);
    std::vector<VTypePtr> ts;
    if (s.type) {
      if (s.type->kind != SType::Kind::Out) throw DecomposeError("subject " + u.str() + " is not an output");
      ts = s.type->payload;
    } else {
      ts = s.shared_items;
    }
    if (ts.size() != p->payload.size()) throw DecomposeError("arity mismatch on " + u.str());
    std::vector<ValuePtr> vals;
    for (std::size_t i = 0; i < p->payload.size(); ++i) {
      const auto& v = p->payload[i];
      if (ts[i]->kind == VType::Kind::Session) {
        const Name& y = v->name;
        auto it = st.scope.delta.find(y);
        if (it == st.scope.delta.end()) throw DecomposeError("no type for delegated " + y.str());
        for (auto& n : bname(y, it->second)) vals.push_back(v_name(n));
        st.scope.delta.erase(it);
      } else {
        vals.push_back(v);
      }
    }
    Subst sigma;
    advance(s, u, s.type ? s.type->cont : nullptr, st.scope, sigma);
    if (s.linear) st.drop = {u};
    st.next = substitute(p->cont, sigma);
    Name l = s.acting;
    st.act = [l, vals](ProcPtr c) { return p_out(l, vals, c); };
    return st;
  }

  Step step_in(const ProcPtr& p, const std::vector<Name>& x, const Scope& sc) {
    Step st;
    st.scope = sc;
    const Name& u = p->subject;
    auto s = subject(u, sc);
    std::vector<VTypePtr> ts;
    if (s.type) {
      if (s.type->kind != SType::Kind::In) throw DecomposeError("subject " + u.str() + " is not an input");
      ts = s.type->payload;
    } else {
      ts = s.shared_items;
    }
    if (ts.size() != p->binders.size()) throw DecomposeError("arity mismatch on " + u.str());
    auto avoid = in_sight(p, x);
    Subst rho;
    std::vector<Name> received;
    for (std::size_t i = 0; i < p->binders.size(); ++i) {
      Name b = indexed_binder(p->binders[i], avoid);
      b.kind = NameKind::Variable;
      avoid.insert(b.plain());
      rho.bind(p->binders[i], b);
      const auto& t = ts[i];
      if (t->kind == VType::Kind::Session) {
        st.scope.delta[b] = t->session;
        st.scope.gamma.erase(b);
      } else {
        st.scope.gamma[b] = t;
        st.scope.delta.erase(b);
      }
      st.scope.add_block(b, t);
      for (auto& n : bname(b, t)) received.push_back(n);
    }
    Subst sigma;
    advance(s, u, s.type ? s.type->cont : nullptr, st.scope, sigma);
    if (s.linear) st.drop = {u};
    st.next = substitute(substitute(p->cont, rho), sigma);
    st.fresh = received;
    Name l = s.acting;
    st.act = [l, received](ProcPtr c) { return p_in(l, received, c); };
    return st;
  }

  // Opens (new s : C) Q: picks an indexed name, records the types of its
  // block and returns the block restrictions with their minimal types.
  std::pair<ProcPtr, std::vector<std::pair<Name, VTypePtr>>> open_restriction(const ProcPtr& p,
                                                                              const std::vector<Name>& x,
                                                                              Scope& sc) {
    if (!p->annot) throw DecomposeError("restriction of " + p->subject.str() + " has no type annotation");
    const auto& C = *p->annot;
    NameSet avoid;
    for (auto& n : free_names(p)) avoid.insert(n.plain());
    for (auto& n : x) avoid.insert(n.plain());
    Name s1 = indexed_binder(p->subject, avoid);
    s1.kind = p->subject.kind;
    Subst sigma;
    sigma.bind_pair(p->subject, s1);
    ProcPtr q = substitute(p->cont, sigma);
    std::vector<std::pair<Name, VTypePtr>> names;
    auto parts = decompose_opt(C);
    auto block = bname(s1, C);
    if (C->kind == VType::Kind::Session) {
      sc.delta[s1] = C->session;
      sc.delta[s1.co()] = dual(C->session);
      for (std::size_t i = 0; i < block.size(); ++i) {
        sc.dt[block[i]] = parts[i];
        sc.dt[block[i].co()] = v_session(dual(parts[i]->session));
        names.emplace_back(block[i], parts[i]);
      }
    } else {
      sc.gamma[s1] = C;
      sc.dt[s1] = parts[0];
      names.emplace_back(s1, parts[0]);
    }
    return {q, names};
  }

  ProcPtr select(int k, const std::vector<Name>& x, const ProcPtr& p, const Scope& sc) {
    const Name& u = p->subject;
    auto it = sc.delta.find(u);
    if (it == sc.delta.end()) throw DecomposeError("no type for selecting subject " + u.str());
    auto S = head(it->second);
    if (S->kind != SType::Kind::Select) throw DecomposeError("subject " + u.str() + " is not a selection");
    STypePtr chosen;
    for (auto& [l, sl] : S->branches)
      if (l == p->label) chosen = sl;
    if (!chosen) throw DecomposeError("label " + p->label + " not offered");
    Scope s2 = sc;
    Name u1 = u.with_index(u.index + 1);
    s2.delta.erase(u);
    s2.delta[u1] = chosen;
    Subst sigma;
    sigma.bind(u, u1);
    ProcPtr q = substitute(p->cont, sigma);
    auto parts = decompose_opt(chosen);
    auto block = bname(u1, chosen);
    std::vector<std::pair<Name, VTypePtr>> res;
    std::vector<Name> sent;
    for (std::size_t i = 0; i < block.size(); ++i) {
      // The continuation keeps the subject's polarity; the annotation types
      // the non-dual endpoint.
      s2.dt[block[i]] = v_session(parts[i]);
      s2.dt[block[i].co()] = v_session(dual(parts[i]));
      Name plain = block[i].plain();
      VTypePtr ann = v_session(u.dual ? dual(parts[i]) : parts[i]);
      res.emplace_back(plain, ann);
      sent.push_back(block[i].co());
    }
    auto z = fnb(q, minus(x, {u}));
    note_lin(k, x, sc);
    auto trio = p_in(prop_lin(k), x,
                     p_sel(u, p->label, p_out(u, as_values(sent), p_out(prop_lin(k + 1).co(), z, p_nil()))));
    return wrap(res, p_par(trio, B(k + 1, z, q, s2)));
  }

  ProcPtr branch(int k, const std::vector<Name>& x, const ProcPtr& p, const Scope& sc) {
    const Name& u = p->subject;
    auto it = sc.delta.find(u);
    if (it == sc.delta.end()) throw DecomposeError("no type for branching subject " + u.str());
    auto S = head(it->second);
    if (S->kind != SType::Kind::Branch) throw DecomposeError("subject " + u.str() + " is not a branching");
    std::vector<std::pair<std::string, ProcPtr>> arms;
    for (auto& [l, body] : p->branches) {
      STypePtr sl;
      for (auto& [m, t] : S->branches)
        if (m == l) sl = t;
      if (!sl) throw DecomposeError("branch " + l + " not in the type of " + u.str());
      NameSet avoid = in_sight(p, x);
      Name y = indexed_binder(var_name("y"), avoid);
      Scope s2 = sc;
      s2.delta.erase(u);
      s2.delta[y] = sl;
      s2.add_block(y, v_session(sl));
      Subst sigma;
      sigma.bind(u, y);
      ProcPtr q = substitute(body, sigma);
      auto ys = bname(y, sl);
      auto z = concat(fnb(q, minus(x, {u})), fnb(q, ys));
      PropTable local;
      PropTable* outer = props;
      props = &local;
      auto inner = B(1, z, q, s2);
      props = outer;
      auto arm = p_par(p_in(u, ys, p_out(prop_lin(1).co(), z, p_nil())), inner);
      for (auto jt = local.rbegin(); jt != local.rend(); ++jt) arm = p_res(jt->first, jt->second, arm);
      arms.emplace_back(l, arm);
    }
    note_lin(k, x, sc);
    return p_in(prop_lin(k), x, p_bra(u, arms));
  }
};

}  // namespace

Breakdown breakdown_opt(const ProcPtr& p, int k, const std::vector<Name>& ctx, const TypeEnv& src) {
  Breakdown out;
  Breaker b{&out.propagators};
  out.process = b.B(k, ctx, p, scope_of(src));
  return out;
}

Breakdown breakdown_rec(const ProcPtr& p, int k, const std::vector<Name>& ctx, const std::string& var,
                        const std::vector<Name>& g, const TypeEnv& src) {
  Breakdown out;
  Breaker b{&out.propagators};
  out.process = b.Brec(k, ctx, p, scope_of(src), var, g, !g.empty());
  return out;
}

bool indexed_pred(const std::vector<Name>& y, const std::vector<Name>& x, const TypeEnv& env) {
  std::vector<Name> covered;
  for (auto& z : x) {
    VTypePtr t;
    if (auto it = env.delta.find(z); it != env.delta.end())
      t = v_session(it->second);
    else if (auto jt = env.gamma.find(z); jt != env.gamma.end())
      t = jt->second;
    else
      return false;
    for (auto& n : bname(z, t)) {
      if (!contains(y, n)) return false;
      covered.push_back(n);
    }
  }
  return std::all_of(y.begin(), y.end(), [&](const Name& n) { return contains(covered, n); });
}

ProcPtr decompose_composed_process(const ProcPtr& p, const TypeEnv& env);

Decomposition decompose(const ProcPtr& p0, const TypeEnv& env, Mode mode) {
  ProcPtr p = apply_env_kinds(p0, env);
  auto rep = typecheck(env, p);
  if (!rep.ok) throw DecomposeError("source does not typecheck: " + rep.failures.front().message);
  if (!recursion_guarded(p)) throw DecomposeError("unguarded recursion");
  if (mode == Mode::Composed) {
    try {
      return {decompose_composed_process(p, env), decompose_env(init_env(env), mode)};
    } catch (const TypeError& e) {
      throw DecomposeError(e.what());
    }
  }

  auto fn = free_names(p);
  std::vector<Name> fv(fn.begin(), fn.end());
  for (auto& n : fv)
    if (n.indexed()) throw DecomposeError("source names must be unindexed: " + n.str());
  ProcPtr q = substitute(p, init_subst(fv));
  TypeEnv src = init_env(env);
  std::vector<Name> r;
  for (auto& [n, s] : src.delta)
    if (is_tr_unfolding(s) && fn.count(n.with_index(0)))
      for (auto& b : bname(n, s)) r.push_back(b);
  Breakdown bd = breakdown_opt(q, 1, r, src);
  ProcPtr body = p_par(p_out(prop_lin(1).co(), r, p_nil()), bd.process);
  for (auto it = bd.propagators.rbegin(); it != bd.propagators.rend(); ++it) body = p_res(it->first, it->second, body);
  return {body, decompose_env(src, Mode::Opt)};
}

}  // namespace mst

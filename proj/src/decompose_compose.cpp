#include <algorithm>
#include <functional>

#include "mst/decompose.hpp"
#include "mst/metrics.hpp"

namespace mst {

namespace {

[[noreturn]] void unsupported(const std::string& what) {
  throw DecomposeError("unsupported in the composed decomposition: " + what);
}

STypePtr head(const STypePtr& s) {
  STypePtr t = s;
  for (int guard = 0; t->kind == SType::Kind::Rec && guard < 64; ++guard) t = unfold(t);
  return t;
}

std::vector<Name> concat(std::vector<Name> a, const std::vector<Name>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Name ho_var(const std::string& base) {
  Name n = var_name(base);
  n.generated = true;
  return fresh_name(n);
}

Name trigger_name() {
  Name n = generated_name("a");
  n.kind = NameKind::Shared;
  return fresh_name(n);
}

Name session_name(const std::string& base = "s") { return fresh_name(generated_name(base)); }

Name recvar_trigger(const std::string& x) {
  Name n = var_name("z" + x);
  n.generated = true;
  return n;
}

VTypePtr in_end(std::vector<VTypePtr> payload) { return v_session(s_in(std::move(payload), s_end())); }

// ---------------------------------------------------------------------------
// Preparation

class Preparer {
 public:
  PreparedComposed out;
  Gamma gamma;
  Delta delta;

  void record_block(const std::vector<Name>& block, const std::vector<VTypePtr>& parts, bool both_ends) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      out.types[block[i]] = parts[i];
      if (both_ends && parts[i]->kind == VType::Kind::Session)
        out.types[block[i].co()] = v_session(dual(parts[i]->session));
    }
  }

  Name unique(const Name& b, const ProcPtr& scope, NameKind kind) {
    NameSet avoid;
    for (auto& n : all_names(scope)) avoid.insert(n.plain());
    for (auto& [n, t] : out.types) avoid.insert(n.plain());
    Name n = b.with_index(1);
    n.dual = false;
    n.kind = kind;
    auto clash = [&](const Name& m) {
      return std::any_of(avoid.begin(), avoid.end(), [&](const Name& a) { return a.same_root(m); });
    };
    while (clash(n)) n = fresh_name(b).with_index(1);
    n.kind = kind;
    return n;
  }

  struct Subject {
    Name acting;
    std::vector<VTypePtr> payload;
  };

  Subject subject(const Name& u, SType::Kind want, Subst& sigma) {
    if (auto it = delta.find(u); it != delta.end()) {
      STypePtr S = it->second;
      STypePtr h = head(S);
      if (h->kind != want) throw DecomposeError("subject " + u.str() + " has the wrong polarity");
      if (is_tr_unfolding(S)) {
        Subject s{u.with_index(u.index + index_fn(S, Mode::Composed) - 1), h->payload};
        it->second = h->cont;
        return s;
      }
      Name nxt = u.with_index(u.index + 1);
      delta.erase(it);
      delta[nxt] = h->cont;
      sigma.bind(u, nxt);
      return {u, h->payload};
    }
    if (auto it = gamma.find(u); it != gamma.end() && it->second->kind == VType::Kind::Shared)
      return {u, it->second->items};
    throw DecomposeError("no type for subject " + u.str());
  }

  ProcPtr go(const ProcPtr& p, bool in_rec) {
    switch (p->kind) {
      case Proc::Kind::Nil:
      case Proc::Kind::Var: return p;
      case Proc::Kind::Sel:
      case Proc::Kind::Bra: unsupported("labeled choice");
      case Proc::Kind::App: unsupported("application");
      case Proc::Kind::Par: {
        Gamma g = gamma;
        Delta d = delta;
        auto l = go(p->cont, in_rec);
        gamma = g;
        delta = d;
        auto r = go(p->right, in_rec);
        return p_par(l, r);
      }
      case Proc::Kind::Rec: {
        if (in_rec) unsupported("nested recursion");
        return p_rec(p->label, go(p->cont, true));
      }
      case Proc::Kind::Res: return restriction(p, in_rec);
      case Proc::Kind::Out: {
        Subst sigma;
        auto s = subject(p->subject, SType::Kind::Out, sigma);
        std::vector<ValuePtr> vals;
        for (std::size_t i = 0; i < p->payload.size(); ++i) {
          const auto& v = p->payload[i];
          if (s.payload[i]->kind != VType::Kind::Session) {
            vals.push_back(v);
            continue;
          }
          const Name& y = v->name;
          auto it = delta.find(y);
          if (it == delta.end()) throw DecomposeError("no type for delegated " + y.str());
          if (is_tr_unfolding(it->second)) unsupported("delegating tail-recursive " + y.str());
          auto block = bname(y, it->second, Mode::Composed);
          record_block(block, decompose_composed(v_session(it->second)), false);
          for (auto& n : block) vals.push_back(v_name(n));
          delta.erase(it);
        }
        return p_out(s.acting, std::move(vals), go(substitute(p->cont, sigma), in_rec));
      }
      case Proc::Kind::In: {
        Subst sigma;
        auto s = subject(p->subject, SType::Kind::In, sigma);
        Subst rho;
        std::vector<Name> received;
        for (std::size_t i = 0; i < p->binders.size(); ++i) {
          const auto& t = s.payload[i];
          if (t->kind == VType::Kind::Session && is_tail_recursive(t)) unsupported("receiving a tail-recursive name");
          Name b = unique(p->binders[i], p, NameKind::Variable);
          rho.bind(p->binders[i], b);
          if (t->kind == VType::Kind::Session)
            delta[b] = t->session;
          else
            gamma[b] = t;
          auto block = bname(b, t, Mode::Composed);
          record_block(block, decompose_composed(t), false);
          received.insert(received.end(), block.begin(), block.end());
        }
        auto body = substitute(substitute(p->cont, rho), sigma);
        return p_in(s.acting, received, go(body, in_rec));
      }
    }
    return p;
  }

  ProcPtr restriction(const ProcPtr& p, bool in_rec) {
    if (!p->annot) throw DecomposeError("restriction of " + p->subject.str() + " has no type annotation");
    const auto& C = *p->annot;
    if (C->kind == VType::Kind::Session && is_tail_recursive(C))
      unsupported("restricted tail-recursive name " + p->subject.str());
    Name s1 = unique(p->subject, p, p->subject.kind);
    Subst sigma;
    sigma.bind_pair(p->subject, s1);
    auto parts = decompose_composed(C);
    auto block = bname(s1, C, Mode::Composed);
    if (C->kind == VType::Kind::Session) {
      delta[s1] = C->session;
      delta[s1.co()] = dual(C->session);
    } else {
      gamma[s1] = C;
    }
    record_block(block, parts, true);
    ProcPtr body = go(substitute(p->cont, sigma), in_rec);
    for (std::size_t i = block.size(); i-- > 0;) body = p_res(block[i], parts[i], body);
    return body;
  }
};

// ---------------------------------------------------------------------------
// Direct breakdown

struct RecFrame {
  Name trigger;                     // zX
  std::vector<const TrRoot*> roots;
  VTypePtr factory;                 // Y
};

class Composer {
 public:
  const PreparedComposed& prep;
  PropTable props;
  std::map<Name, VTypePtr> local;  // higher-order variables introduced here
  std::map<std::string, RecFrame> frames;

  explicit Composer(const PreparedComposed& p) : prep(p) {}

  VTypePtr type_of(const Name& n) const {
    if (auto it = local.find(n); it != local.end()) return it->second;
    if (auto it = prep.types.find(n); it != prep.types.end()) return it->second;
    throw DecomposeError("composed breakdown: no type for " + n.str());
  }

  VTypePtr type_of(const ValuePtr& v) const {
    switch (v->kind) {
      case Value::Kind::Name: return type_of(v->name);
      case Value::Kind::Bool: return v_bool();
      case Value::Kind::Abs: throw DecomposeError("composed breakdown: abstraction in a first-order payload");
      default: return v_int();
    }
  }

  std::vector<VTypePtr> types(const std::vector<Name>& ns) const {
    std::vector<VTypePtr> out;
    for (auto& n : ns) out.push_back(type_of(n));
    return out;
  }

  void note(int k, const std::vector<Name>& x) { props[prop_lin(k)] = in_end(types(x)); }

  const TrRoot* root_of(const Name& n) const {
    for (auto& r : prep.roots)
      if (r.root == n.with_index(0)) return &r;
    return nullptr;
  }

  static VTypePtr provided(const TrRoot& r) { return v_shared({in_end(r.parts)}); }

  // Obtains the block of a tail-recursive root; `act` builds the body from
  // the received names.
  ProcPtr obtain(const TrRoot& r, const std::function<ProcPtr(const std::vector<Name>&)>& act) {
    Name a1 = trigger_name(), y1 = ho_var("y");
    std::vector<Name> z;
    for (std::size_t i = 0; i < r.block.size(); ++i) {
      z.push_back(ho_var("r"));
      local[z.back()] = r.parts[i];
    }
    return p_res(a1, provided(r), p_out(r.provider, std::vector<Name>{a1}, p_in(a1, {y1}, p_in(y1, z, act(z)))));
  }

  ProcPtr give_back(const TrRoot& r, const std::vector<Name>& z) {
    Name b = ho_var("b");
    Name s = session_name();
    return p_in(r.provider, {b}, p_res(s, in_end(r.parts), p_out(b, std::vector<Name>{s}, p_out(s.co(), z, p_nil()))));
  }

  Name block_member(const TrRoot& r, const Name& u, const std::vector<Name>& z) const {
    for (std::size_t i = 0; i < r.block.size(); ++i)
      if (r.block[i] == u) return z[i];
    throw DecomposeError("composed breakdown: " + u.str() + " is outside its block");
  }

  ProcPtr A(int k, const std::vector<Name>& x, const ProcPtr& p) {
    switch (p->kind) {
      case Proc::Kind::Nil:
        note(k, x);
        return p_in(prop_lin(k), x, p_nil());
      case Proc::Kind::Res: return p_res(p->subject, p->annot, A(k, x, p->cont));
      case Proc::Kind::Par: {
        auto y = composed_context(p->cont), z = composed_context(p->right);
        int l = degree(p->cont, Mode::Composed);
        note(k, x);
        auto trio = p_in(prop_lin(k), x, p_out(prop_lin(k + 1).co(), y, p_out(prop_lin(k + l + 1).co(), z, p_nil())));
        return p_par(trio, p_par(A(k + 1, y, p->cont), A(k + l + 1, z, p->right)));
      }
      case Proc::Kind::Out: return output(k, x, p);
      case Proc::Kind::In: return input(k, x, p);
      case Proc::Kind::Rec: return recursion(k, x, p);
      case Proc::Kind::Var: return recursion_variable(k, x, p);
      default: unsupported("construct outside the first-order fragment");
    }
  }

  ProcPtr output(int k, const std::vector<Name>& x, const ProcPtr& p) {
    auto ctxq = composed_context(p->cont);
    std::vector<VTypePtr> payload;
    for (auto& v : p->payload) payload.push_back(type_of(v));
    NameSet pv;
    for (auto& v : p->payload)
      for (auto& n : free_names(v))
        if (n.kind == NameKind::Variable) pv.insert(n);
    std::vector<Name> yv(pv.begin(), pv.end());

    VTypePtr tx = v_shared({in_end(payload)});
    VTypePtr tz = in_end({tx});
    VTypePtr ta = trigger_type(payload);
    Name a = trigger_name(), y = ho_var("y"), z = ho_var("z"), xv = ho_var("x"), s = session_name();
    local[y] = in_end({tz});
    local[z] = tz;
    local[xv] = tx;
    NameSet xs(yv.begin(), yv.end());
    xs.insert(xv);
    std::vector<Name> xm(xs.begin(), xs.end());

    note(k, x);
    note(k + 1, yv);
    note(k + 2, xm);
    auto send = p_res(s, in_end(payload), p_out(xv, std::vector<Name>{s}, p_out(s.co(), p->payload, p_nil())));
    auto server = p_in(a, {y}, p_in(y, {z}, p_par(p_out(prop_lin(k + 1).co(), yv, p_nil()),
                                                   p_par(p_in(prop_lin(k + 1), yv, p_in(z, {xv}, p_out(prop_lin(k + 2).co(), xm, p_nil()))),
                                                         p_in(prop_lin(k + 2), xm, send)))));
    auto act = [&](const Name& subj, ProcPtr after) {
      return p_res(a, ta, p_out(subj, std::vector<Name>{a}, p_par(p_out(prop_lin(k + 3).co(), ctxq, after), server)));
    };
    ProcPtr trio;
    if (const TrRoot* r = root_of(p->subject)) {
      trio = p_in(prop_lin(k), x, obtain(*r, [&](const std::vector<Name>& zs) {
                    return act(block_member(*r, p->subject, zs), give_back(*r, zs));
                  }));
    } else {
      trio = p_in(prop_lin(k), x, act(p->subject, p_nil()));
    }
    return p_par(trio, A(k + 3, ctxq, p->cont));
  }

  ProcPtr input(int k, const std::vector<Name>& x, const ProcPtr& p) {
    const auto& w = p->binders;
    auto ctxq = composed_context(p->cont);
    std::vector<Name> fvv;
    for (auto& n : ctxq)
      if (std::find(w.begin(), w.end(), n) == w.end()) fvv.push_back(n);
    int l = degree(p->cont, Mode::Composed);
    auto payload = types(w);
    VTypePtr tx = v_shared({in_end(payload)});
    VTypePtr tz = in_end({tx});
    VTypePtr ta = trigger_type(payload);

    Name y = ho_var("y"), yp = ho_var("y"), s = session_name(), sp = session_name(), a = trigger_name();
    local[y] = ta;
    local[yp] = in_end(payload);
    NameSet xs(fvv.begin(), fvv.end());
    xs.insert(y);
    std::vector<Name> x1(xs.begin(), xs.end());

    note(k, x);
    note(k + 1, x1);
    note(k + 2, {y});
    note(k + 3, fvv);
    note(k + 4, fvv);
    note(k + l + 4, {});

    auto receive = [&](const Name& subj, ProcPtr after) {
      return p_in(subj, {y}, p_out(prop_lin(k + 1).co(), x1, after));
    };
    ProcPtr trio;
    if (const TrRoot* r = root_of(p->subject)) {
      trio = p_in(prop_lin(k), x, obtain(*r, [&](const std::vector<Name>& zs) {
                    return receive(block_member(*r, p->subject, zs), give_back(*r, zs));
                  }));
    } else {
      trio = p_in(prop_lin(k), x, receive(p->subject, p_nil()));
    }
    auto forward = p_in(prop_lin(k + 1), x1, p_out(prop_lin(k + 2).co(), std::vector<Name>{y},
                                                   p_out(prop_lin(k + 3).co(), fvv, p_nil())));
    auto ask = p_in(prop_lin(k + 2), {y},
                    p_res(sp, in_end({tz}), p_out(y, std::vector<Name>{sp}, p_out(sp.co(), std::vector<Name>{s}, p_nil()))));
    auto body = p_par(p_out(prop_lin(k + 4).co(), fvv, p_nil()), A(k + 4, fvv, p->cont));
    auto offer = p_in(prop_lin(k + 3), fvv,
                      p_res(a, tx, p_out(s.co(), std::vector<Name>{a},
                                         p_par(p_out(prop_lin(k + l + 4).co(), std::vector<Name>{}, p_nil()),
                                               p_in(a, {yp}, p_in(yp, w, body))))));
    auto last = p_in(prop_lin(k + l + 4), {}, p_nil());
    return p_par(trio, p_res(s, in_end({tx}), p_par(forward, p_par(ask, p_par(offer, last)))));
  }

  std::vector<const TrRoot*> roots_in(const ProcPtr& p) const {
    std::vector<const TrRoot*> out;
    auto fn = free_names(p);
    for (auto& r : prep.roots)
      if (std::any_of(fn.begin(), fn.end(), [&](const Name& n) { return n.with_index(0) == r.root; }))
        out.push_back(&r);
    return out;
  }

  ProcPtr recursion(int k, const std::vector<Name>& x, const ProcPtr& p) {
    const std::string& X = p->label;
    auto roots = roots_in(p->cont);
    std::vector<VTypePtr> all;
    for (auto* r : roots) all.insert(all.end(), r->parts.begin(), r->parts.end());
    const std::string t = "t";
    auto all_t = all;
    all_t.push_back(v_session(s_in({v_shared({v_session(s_var(t))})}, s_end())));
    STypePtr Y = s_rec(t, s_in(all_t, s_end()));
    VTypePtr Z = v_shared({v_session(Y)});
    Name zx = recvar_trigger(X);
    local[zx] = Z;
    frames[X] = RecFrame{zx, roots, v_session(Y)};

    auto w = composed_context(p->cont);
    int l = degree(p->cont, Mode::Composed);
    (void)l;
    Name s1 = session_name(), a1 = trigger_name();
    Name yq = ho_var("y"), y1 = ho_var("y");
    local[yq] = v_session(Y);
    local[y1] = in_end({Z});

    note(k, x);
    note(k + 1, x);
    note(k + 2, {});
    note(k + 3, x);
    note(k + 4, w);

    // One instance per unfolding: receives the recursive blocks and a fresh
    // trigger, serves the blocks locally and runs the body on its own chain.
    std::vector<Name> hats;
    std::vector<ProcPtr> servers;
    for (auto* r : roots) {
      std::vector<Name> mine;
      for (std::size_t i = 0; i < r->block.size(); ++i) {
        mine.push_back(ho_var("r"));
        local[mine.back()] = r->parts[i];
      }
      hats.insert(hats.end(), mine.begin(), mine.end());
      servers.push_back(give_back(*r, mine));
    }
    Composer inner(prep);
    inner.local = local;
    inner.frames = frames;
    inner.note(1, x);
    inner.note(2, w);
    auto inst_body = p_par(p_out(prop_lin(1).co(), x, p_nil()),
                           p_par(p_in(prop_lin(1), x, p_in(y1, {zx}, p_out(prop_lin(2).co(), w, p_nil()))),
                                 inner.A(2, w, p->cont)));
    inst_body = p_par(p_par(servers), inst_body);
    for (auto it = inner.props.rbegin(); it != inner.props.rend(); ++it) inst_body = p_res(it->first, it->second, inst_body);
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) inst_body = p_res((*it)->provider, v_shared({provided(**it)}), inst_body);
    for (auto& [n, t2] : inner.local) local[n] = t2;

    std::string rep = "Rep" + std::to_string(++rep_serial_);
    auto factory = p_rec(rep, p_par(p_in(a1, {yq}, p_in(yq, concat(hats, {y1}), inst_body)), p_var(rep)));

    auto control = p_in(prop_lin(k), x, p_out(prop_lin(k + 1).co(), x, p_out(prop_lin(k + 3).co(), x, p_nil())));
    auto launch = p_par(p_in(prop_lin(k + 1), x,
                             p_res(a1, Z, p_out(s1.co(), std::vector<Name>{a1},
                                                p_par(p_out(prop_lin(k + 2).co(), std::vector<Name>{}, p_nil()), factory)))),
                        p_in(prop_lin(k + 2), {}, p_nil()));
    auto first = p_par(p_in(prop_lin(k + 3), x, p_in(s1, {zx}, p_out(prop_lin(k + 4).co(), w, p_nil()))),
                       A(k + 4, w, p->cont));
    return p_res(s1, in_end({Z}), p_par(control, p_par(launch, first)));
  }

  ProcPtr recursion_variable(int k, const std::vector<Name>& x, const ProcPtr& p) {
    auto it = frames.find(p->label);
    if (it == frames.end()) throw DecomposeError("composed breakdown: free process variable " + p->label);
    const RecFrame& f = it->second;
    const Name& zx = f.trigger;
    VTypePtr Z = local.at(zx);
    Name s1 = session_name();
    note(k, x);
    note(k + 1, {zx});
    note(k + 2, {zx});
    note(k + 3, {});

    std::vector<Name> gathered;
    std::function<ProcPtr(std::size_t)> collect = [&](std::size_t i) -> ProcPtr {
      if (i == f.roots.size()) {
        Name sp = session_name();
        return p_res(sp, f.factory,
                     p_out(zx, std::vector<Name>{sp}, p_out(sp.co(), concat(gathered, {s1}), p_nil())));
      }
      return obtain(*f.roots[i], [&](const std::vector<Name>& z) {
        gathered.insert(gathered.end(), z.begin(), z.end());
        return collect(i + 1);
      });
    };
    auto control = p_in(prop_lin(k), x,
                        p_out(prop_lin(k + 1).co(), std::vector<Name>{zx}, p_out(prop_lin(k + 2).co(), std::vector<Name>{zx}, p_nil())));
    auto pass = p_in(prop_lin(k + 1), {zx}, collect(0));
    auto hand = p_in(prop_lin(k + 2), {zx},
                     p_out(s1.co(), std::vector<Name>{zx}, p_out(prop_lin(k + 3).co(), std::vector<Name>{}, p_nil())));
    auto last = p_in(prop_lin(k + 3), {}, p_nil());
    return p_res(s1, in_end({Z}), p_par(control, p_par(pass, p_par(hand, last))));
  }

 private:
  static inline int rep_serial_ = 0;
};

// ---------------------------------------------------------------------------
// The three literal stages

NameSet free_session_names(const ProcPtr& p) {
  NameSet out;
  for (auto& n : free_names(p))
    if (n.kind == NameKind::Session || n.kind == NameKind::PropLin || n.kind == NameKind::Variable) out.insert(n);
  return out;
}

std::vector<Name> ho_free_vars(const ProcPtr& p) {
  auto vs = free_vars(p);
  return {vs.begin(), vs.end()};
}

std::vector<Name> ho_free_vars(const ValuePtr& v) {
  std::vector<Name> out;
  for (auto& n : free_names(v))
    if (n.kind == NameKind::Variable) out.push_back(n);
  return out;
}

int ho_value_degree(const ValuePtr& v) { return v->kind == Value::Kind::Abs ? ho_degree(v->body) : 0; }

ValuePtr ho_value_breakdown(int k, const std::vector<Name>& x, const ValuePtr& v) {
  if (v->kind != Value::Kind::Abs) return v;
  if (!v->linear) unsupported("shared abstraction in the higher-order breakdown");
  return v_abs(v->binders, p_par(p_out(prop_lin(k).co(), x, p_nil()), breakdown_ho(v->body, k, x)), true);
}

}  // namespace

std::vector<Name> composed_context(const ProcPtr& p) {
  NameSet out = free_vars(p);
  for (auto& x : free_recvars(p)) out.insert(recvar_trigger(x));
  return {out.begin(), out.end()};
}

PreparedComposed prepare_composed(const ProcPtr& p, const TypeEnv& env) {
  auto fn = free_names(p);
  std::vector<Name> fv(fn.begin(), fn.end());
  for (auto& n : fv)
    if (n.indexed()) throw DecomposeError("source names must be unindexed: " + n.str());
  TypeEnv src = init_env(env);
  Preparer pr;
  pr.gamma = src.gamma;
  pr.delta = src.delta;
  auto denv = decompose_env(src, Mode::Composed);
  for (auto& [n, t] : denv.gamma) pr.out.types[n] = t;
  for (auto& [n, s] : denv.delta) pr.out.types[n] = v_session(s);
  for (auto& [n, s] : src.delta) {
    if (!is_tr_unfolding(s) || !fn.count(n.with_index(0))) continue;
    TrRoot r;
    r.root = n.with_index(0);
    r.provider = prop_rec_provider(n.dual ? "_" + n.base : n.base);
    r.block = bname(n, s, Mode::Composed);
    r.parts = decompose_composed(v_session(s));
    pr.out.roots.push_back(r);
  }
  pr.out.process = pr.go(substitute(p, init_subst(fv)), false);
  return pr.out;
}

Breakdown breakdown_composed(const PreparedComposed& prep, const ProcPtr& p, int k, const std::vector<Name>& ctx) {
  Composer c(prep);
  auto out = c.A(k, ctx, p);
  return {out, c.props};
}

ProcPtr encode_pi_to_ho(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Nil: return p;
    case Proc::Kind::Out: {
      Name z = ho_var("z"), x = ho_var("x");
      auto abs = v_abs({z}, p_in(z, {x}, p_app(v_name(x), p->payload)));
      return p_out(p->subject, std::vector<ValuePtr>{abs}, encode_pi_to_ho(p->cont));
    }
    case Proc::Kind::In: {
      Name y = ho_var("y"), s = session_name();
      auto abs = v_abs(p->binders, encode_pi_to_ho(p->cont));
      return p_in(p->subject, {y},
                  p_res(s, std::nullopt, p_par(p_app(v_name(y), {v_name(s)}), p_out(s.co(), std::vector<ValuePtr>{abs}, p_nil()))));
    }
    case Proc::Kind::Par: return p_par(encode_pi_to_ho(p->cont), encode_pi_to_ho(p->right));
    case Proc::Kind::Res: return p_res(p->subject, p->annot, encode_pi_to_ho(p->cont));
    default: unsupported("first-order to higher-order encoding outside the finite fragment");
  }
}

int ho_degree(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Nil: return 1;
    case Proc::Kind::Out: {
      int n = 1 + ho_degree(p->cont);
      for (auto& v : p->payload) n += ho_value_degree(v);
      return n;
    }
    case Proc::Kind::In: return 1 + ho_degree(p->cont);
    case Proc::Kind::App: return 1 + ho_value_degree(p->fun);
    case Proc::Kind::Res: return ho_degree(p->cont);
    case Proc::Kind::Par: return 1 + ho_degree(p->cont) + ho_degree(p->right);
    default: unsupported("higher-order degree outside the finite fragment");
  }
}

ProcPtr breakdown_ho(const ProcPtr& p, int k, const std::vector<Name>& x) {
  switch (p->kind) {
    case Proc::Kind::Nil: return p_in(prop_lin(k), x, p_nil());
    case Proc::Kind::Out: {
      int j = k + 1;
      std::vector<ValuePtr> vals;
      for (auto& v : p->payload) {
        vals.push_back(ho_value_breakdown(j, ho_free_vars(v), v));
        j += ho_value_degree(v);
      }
      auto z = ho_free_vars(p->cont);
      auto trio = p_in(prop_lin(k), x, p_out(p->subject, vals, p_out(prop_lin(j).co(), z, p_nil())));
      return p_par(trio, breakdown_ho(p->cont, j, z));
    }
    case Proc::Kind::In: {
      auto z = ho_free_vars(p->cont);
      auto trio = p_in(prop_lin(k), x, p_in(p->subject, p->binders, p_out(prop_lin(k + 1).co(), z, p_nil())));
      return p_par(trio, breakdown_ho(p->cont, k + 1, z));
    }
    case Proc::Kind::App:
      return p_in(prop_lin(k), x, p_app(ho_value_breakdown(k + 1, ho_free_vars(p->fun), p->fun), p->payload));
    case Proc::Kind::Res: return p_res(p->subject, p->annot, breakdown_ho(p->cont, k, x));
    case Proc::Kind::Par: {
      auto y = ho_free_vars(p->cont), z = ho_free_vars(p->right);
      int l = ho_degree(p->cont);
      auto trio = p_in(prop_lin(k), x, p_out(prop_lin(k + 1).co(), y, p_out(prop_lin(k + l + 1).co(), z, p_nil())));
      return p_par(trio, p_par(breakdown_ho(p->cont, k + 1, y), breakdown_ho(p->right, k + l + 1, z)));
    }
    default: unsupported("higher-order breakdown outside the finite fragment");
  }
}

ProcPtr encode_ho_to_pi(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Nil:
    case Proc::Kind::Var: return p;
    case Proc::Kind::Out: {
      ProcPtr cont = encode_ho_to_pi(p->cont);
      std::vector<ValuePtr> vals;
      std::vector<ProcPtr> servers;
      std::vector<Name> triggers;
      for (auto& v : p->payload) {
        if (v->kind != Value::Kind::Abs) {
          vals.push_back(v);
          continue;
        }
        Name a = trigger_name(), y = ho_var("y");
        ProcPtr body = encode_ho_to_pi(v->body);
        ProcPtr server = p_in(a, {y}, p_in(y, v->binders, body));
        if (free_session_names(v->body).empty()) {
          std::string rep = "Rep" + a.base + std::to_string(a.serial);
          server = p_rec(rep, p_par(server, p_var(rep)));
        }
        vals.push_back(v_name(a));
        servers.push_back(server);
        triggers.push_back(a);
      }
      std::vector<ProcPtr> parts{cont};
      parts.insert(parts.end(), servers.begin(), servers.end());
      ProcPtr out = triggers.empty() ? p_out(p->subject, vals, cont) : p_out(p->subject, vals, p_par(parts));
      for (auto it = triggers.rbegin(); it != triggers.rend(); ++it) out = p_res(*it, std::nullopt, out);
      return out;
    }
    case Proc::Kind::In: return p_in(p->subject, p->binders, encode_ho_to_pi(p->cont));
    case Proc::Kind::App: {
      Name s = session_name();
      if (p->fun->kind == Value::Kind::Name)
        return p_res(s, std::nullopt, p_out(p->fun->name, std::vector<Name>{s}, p_out(s.co(), p->payload, p_nil())));
      return p_res(s, std::nullopt,
                   p_par(p_in(s, p->fun->binders, encode_ho_to_pi(p->fun->body)), p_out(s.co(), p->payload, p_nil())));
    }
    case Proc::Kind::Res: return p_res(p->subject, p->annot, encode_ho_to_pi(p->cont));
    case Proc::Kind::Par: return p_par(encode_ho_to_pi(p->cont), encode_ho_to_pi(p->right));
    case Proc::Kind::Rec: return p_rec(p->label, encode_ho_to_pi(p->cont));
    default: unsupported("labeled choice in the higher-order to first-order encoding");
  }
}

ProcPtr decompose_composed_process(const ProcPtr& p, const TypeEnv& env) {
  auto prep = prepare_composed(p, env);
  Composer c(prep);
  ProcPtr body = c.A(1, {}, prep.process);
  std::vector<ProcPtr> parts{p_out(prop_lin(1).co(), std::vector<Name>{}, p_nil()), body};
  for (auto& r : prep.roots) {
    Name b = ho_var("b"), s = session_name();
    parts.push_back(p_in(r.provider, {b}, p_res(s, in_end(r.parts), p_out(b, std::vector<Name>{s},
                                                                          p_out(s.co(), r.block, p_nil())))));
  }
  c.note(1, {});
  ProcPtr out = p_par(parts);
  for (auto it = prep.roots.rbegin(); it != prep.roots.rend(); ++it)
    out = p_res(it->provider, v_shared({Composer::provided(*it)}), out);
  for (auto it = c.props.rbegin(); it != c.props.rend(); ++it) out = p_res(it->first, it->second, out);
  return out;
}

}  // namespace mst

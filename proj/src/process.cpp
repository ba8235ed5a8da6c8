#include "mst/process.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

namespace mst {

namespace {

ValuePtr make_val(Value v) { return std::make_shared<const Value>(std::move(v)); }
ProcPtr make_proc(Proc p) { return std::make_shared<const Proc>(std::move(p)); }

std::atomic<int> g_serial{0};

}  // namespace

// ---------------------------------------------------------------------------
// Construction

ValuePtr v_name(const Name& n) {
  Value v;
  v.kind = Value::Kind::Name;
  v.name = n;
  return make_val(std::move(v));
}

ValuePtr v_num(long long i) {
  Value v;
  v.kind = Value::Kind::Int;
  v.num = i;
  return make_val(std::move(v));
}

ValuePtr v_boolean(bool b) {
  Value v;
  v.kind = Value::Kind::Bool;
  v.num = b ? 1 : 0;
  return make_val(std::move(v));
}

ValuePtr v_neg(ValuePtr a) {
  Value v;
  v.kind = Value::Kind::Neg;
  v.lhs = std::move(a);
  return make_val(std::move(v));
}

ValuePtr v_succ(ValuePtr a) {
  Value v;
  v.kind = Value::Kind::Succ;
  v.lhs = std::move(a);
  return make_val(std::move(v));
}

ValuePtr v_add(ValuePtr a, ValuePtr b) {
  Value v;
  v.kind = Value::Kind::Add;
  v.lhs = std::move(a);
  v.rhs = std::move(b);
  return make_val(std::move(v));
}

ValuePtr v_abs(std::vector<Name> binders, ProcPtr body, bool linear) {
  Value v;
  v.kind = Value::Kind::Abs;
  v.binders = std::move(binders);
  v.body = std::move(body);
  v.linear = linear;
  return make_val(std::move(v));
}

ProcPtr p_nil() {
  static const ProcPtr nil = make_proc(Proc{});
  return nil;
}

ProcPtr p_out(const Name& subj, std::vector<ValuePtr> payload, ProcPtr cont) {
  Proc p;
  p.kind = Proc::Kind::Out;
  p.subject = subj;
  p.payload = std::move(payload);
  p.cont = std::move(cont);
  return make_proc(std::move(p));
}

ProcPtr p_out(const Name& subj, const std::vector<Name>& payload, ProcPtr cont) {
  std::vector<ValuePtr> vs;
  for (auto& n : payload) vs.push_back(v_name(n));
  return p_out(subj, std::move(vs), std::move(cont));
}

ProcPtr p_in(const Name& subj, std::vector<Name> binders, ProcPtr cont) {
  Proc p;
  p.kind = Proc::Kind::In;
  p.subject = subj;
  p.binders = std::move(binders);
  p.cont = std::move(cont);
  return make_proc(std::move(p));
}

ProcPtr p_sel(const Name& subj, const std::string& label, ProcPtr cont) {
  Proc p;
  p.kind = Proc::Kind::Sel;
  p.subject = subj;
  p.label = label;
  p.cont = std::move(cont);
  return make_proc(std::move(p));
}

ProcPtr p_bra(const Name& subj, std::vector<std::pair<std::string, ProcPtr>> branches) {
  Proc p;
  p.kind = Proc::Kind::Bra;
  p.subject = subj;
  p.branches = std::move(branches);
  return make_proc(std::move(p));
}

ProcPtr p_res(const Name& n, std::optional<VTypePtr> annot, ProcPtr body) {
  Proc p;
  p.kind = Proc::Kind::Res;
  p.subject = n.plain();
  p.annot = std::move(annot);
  p.cont = std::move(body);
  return make_proc(std::move(p));
}

ProcPtr p_par(ProcPtr l, ProcPtr r) {
  Proc p;
  p.kind = Proc::Kind::Par;
  p.cont = std::move(l);
  p.right = std::move(r);
  return make_proc(std::move(p));
}

ProcPtr p_par(const std::vector<ProcPtr>& ps) {
  if (ps.empty()) return p_nil();
  ProcPtr acc = ps.back();
  for (std::size_t i = ps.size() - 1; i-- > 0;) acc = p_par(ps[i], acc);
  return acc;
}

ProcPtr p_rec(const std::string& x, ProcPtr body) {
  Proc p;
  p.kind = Proc::Kind::Rec;
  p.label = x;
  p.cont = std::move(body);
  return make_proc(std::move(p));
}

ProcPtr p_var(const std::string& x) {
  Proc p;
  p.kind = Proc::Kind::Var;
  p.label = x;
  return make_proc(std::move(p));
}

ProcPtr p_app(ValuePtr fun, std::vector<ValuePtr> args) {
  Proc p;
  p.kind = Proc::Kind::App;
  p.fun = std::move(fun);
  p.payload = std::move(args);
  return make_proc(std::move(p));
}

// ---------------------------------------------------------------------------
// Free names

namespace {

void fn_value(const ValuePtr& v, NameSet& bound, NameSet& out);

void fn_proc(const ProcPtr& p, NameSet& bound, NameSet& out) {
  auto use = [&](const Name& n) {
    if (!bound.count(n)) out.insert(n);
  };
  auto under = [&](const std::vector<Name>& bs, auto&& body) {
    std::vector<Name> added;
    for (auto& b : bs)
      if (bound.insert(b).second) added.push_back(b);
    body();
    for (auto& b : added) bound.erase(b);
  };
  switch (p->kind) {
    case Proc::Kind::Nil:
    case Proc::Kind::Var:
      return;
    case Proc::Kind::Out:
      use(p->subject);
      for (auto& v : p->payload) fn_value(v, bound, out);
      fn_proc(p->cont, bound, out);
      return;
    case Proc::Kind::In:
      use(p->subject);
      under(p->binders, [&] { fn_proc(p->cont, bound, out); });
      return;
    case Proc::Kind::Sel:
      use(p->subject);
      fn_proc(p->cont, bound, out);
      return;
    case Proc::Kind::Bra:
      use(p->subject);
      for (auto& [l, b] : p->branches) fn_proc(b, bound, out);
      return;
    case Proc::Kind::Res:
      under({p->subject, p->subject.co()}, [&] { fn_proc(p->cont, bound, out); });
      return;
    case Proc::Kind::Par:
      fn_proc(p->cont, bound, out);
      fn_proc(p->right, bound, out);
      return;
    case Proc::Kind::Rec:
      fn_proc(p->cont, bound, out);
      return;
    case Proc::Kind::App:
      fn_value(p->fun, bound, out);
      for (auto& v : p->payload) fn_value(v, bound, out);
      return;
  }
}

void fn_value(const ValuePtr& v, NameSet& bound, NameSet& out) {
  switch (v->kind) {
    case Value::Kind::Name:
      if (!bound.count(v->name)) out.insert(v->name);
      return;
    case Value::Kind::Neg:
    case Value::Kind::Succ:
      fn_value(v->lhs, bound, out);
      return;
    case Value::Kind::Add:
      fn_value(v->lhs, bound, out);
      fn_value(v->rhs, bound, out);
      return;
    case Value::Kind::Abs: {
      std::vector<Name> added;
      for (auto& b : v->binders)
        if (bound.insert(b).second) added.push_back(b);
      fn_proc(v->body, bound, out);
      for (auto& b : added) bound.erase(b);
      return;
    }
    default:
      return;
  }
}

void recvars(const ProcPtr& p, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (p->kind) {
    case Proc::Kind::Var:
      if (!bound.count(p->label)) out.insert(p->label);
      return;
    case Proc::Kind::Rec: {
      bool added = bound.insert(p->label).second;
      recvars(p->cont, bound, out);
      if (added) bound.erase(p->label);
      return;
    }
    case Proc::Kind::Out:
    case Proc::Kind::In:
    case Proc::Kind::Sel:
    case Proc::Kind::Res:
      recvars(p->cont, bound, out);
      for (auto& v : p->payload)
        if (v->kind == Value::Kind::Abs) recvars(v->body, bound, out);
      return;
    case Proc::Kind::Bra:
      for (auto& [l, b] : p->branches) recvars(b, bound, out);
      return;
    case Proc::Kind::Par:
      recvars(p->cont, bound, out);
      recvars(p->right, bound, out);
      return;
    default:
      return;
  }
}

void collect_all(const ProcPtr& p, NameSet& out) {
  std::function<void(const ValuePtr&)> val = [&](const ValuePtr& v) {
    switch (v->kind) {
      case Value::Kind::Name: out.insert(v->name); break;
      case Value::Kind::Neg:
      case Value::Kind::Succ: val(v->lhs); break;
      case Value::Kind::Add: val(v->lhs); val(v->rhs); break;
      case Value::Kind::Abs:
        for (auto& b : v->binders) out.insert(b);
        collect_all(v->body, out);
        break;
      default: break;
    }
  };
  switch (p->kind) {
    case Proc::Kind::Out:
    case Proc::Kind::Sel:
    case Proc::Kind::In:
      out.insert(p->subject);
      for (auto& b : p->binders) out.insert(b);
      for (auto& v : p->payload) val(v);
      collect_all(p->cont, out);
      return;
    case Proc::Kind::Bra:
      out.insert(p->subject);
      for (auto& [l, b] : p->branches) collect_all(b, out);
      return;
    case Proc::Kind::Res:
      out.insert(p->subject);
      out.insert(p->subject.co());
      collect_all(p->cont, out);
      return;
    case Proc::Kind::Par:
      collect_all(p->cont, out);
      collect_all(p->right, out);
      return;
    case Proc::Kind::Rec:
      collect_all(p->cont, out);
      return;
    case Proc::Kind::App:
      val(p->fun);
      for (auto& v : p->payload) val(v);
      return;
    default:
      return;
  }
}

}  // namespace

NameSet free_names(const ProcPtr& p) {
  NameSet bound, out;
  fn_proc(p, bound, out);
  return out;
}

NameSet free_names(const ValuePtr& v) {
  NameSet bound, out;
  fn_value(v, bound, out);
  return out;
}

NameSet free_vars(const ProcPtr& p) {
  NameSet out;
  for (auto& n : free_names(p))
    if (n.kind == NameKind::Variable) out.insert(n);
  return out;
}

std::set<std::string> free_recvars(const ProcPtr& p) {
  std::set<std::string> bound, out;
  recvars(p, bound, out);
  return out;
}

bool has_free_recvar(const ProcPtr& p) { return !free_recvars(p).empty(); }

NameSet all_names(const ProcPtr& p) {
  NameSet out;
  collect_all(p, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

void Subst::bind(const Name& from, ValuePtr to) { map_[from] = std::move(to); }
void Subst::bind(const Name& from, const Name& to) { map_[from] = v_name(to); }
void Subst::bind_pair(const Name& from, const Name& to) {
  map_[from] = v_name(to);
  map_[from.co()] = v_name(to.co());
}

const ValuePtr* Subst::find(const Name& n) const {
  auto it = map_.find(n);
  return it == map_.end() ? nullptr : &it->second;
}

Name fresh_name(const Name& like) {
  Name n = like;
  n.serial = ++g_serial;
  return n;
}

namespace {

struct Substituter {
  const Subst& sub;
  std::set<Name> range_roots;  // plain forms of names free in the range
  std::vector<std::pair<Name, std::optional<Name>>> scope;  // shadowing / renaming

  explicit Substituter(const Subst& s) : sub(s) {
    for (auto& [k, v] : s.entries())
      for (auto& n : free_names(v)) range_roots.insert(n.plain());
  }

  ValuePtr lookup(const Name& n) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == n) return it->second ? v_name(*it->second) : v_name(n);
    }
    if (auto v = sub.find(n)) return *v;
    return nullptr;
  }

  Name name_at(const Name& n) {
    auto v = lookup(n);
    if (!v) return n;
    if (v->kind != Value::Kind::Name)
      throw SyntaxError("substitution places a non-name value in channel position: " + n.str());
    return v->name;
  }

  // Pushes scope entries for the binders; returns the possibly renamed binders.
  std::vector<Name> enter(const std::vector<Name>& bs) {
    std::vector<Name> out;
    for (auto& b : bs) {
      if (range_roots.count(b.plain())) {
        Name f = fresh_name(b);
        scope.emplace_back(b, f);
        out.push_back(f);
      } else {
        scope.emplace_back(b, std::nullopt);
        out.push_back(b);
      }
    }
    return out;
  }
  void leave(std::size_t n) { scope.resize(scope.size() - n); }

  ValuePtr value(const ValuePtr& v) {
    switch (v->kind) {
      case Value::Kind::Name: {
        auto r = lookup(v->name);
        return r ? r : v;
      }
      case Value::Kind::Neg: return v_neg(value(v->lhs));
      case Value::Kind::Succ: return v_succ(value(v->lhs));
      case Value::Kind::Add: return v_add(value(v->lhs), value(v->rhs));
      case Value::Kind::Abs: {
        auto bs = enter(v->binders);
        auto body = proc(v->body);
        leave(bs.size());
        return v_abs(bs, body, v->linear);
      }
      default: return v;
    }
  }

  ProcPtr proc(const ProcPtr& p) {
    switch (p->kind) {
      case Proc::Kind::Nil:
      case Proc::Kind::Var:
        return p;
      case Proc::Kind::Out: {
        std::vector<ValuePtr> pay;
        for (auto& v : p->payload) pay.push_back(value(v));
        return p_out(name_at(p->subject), std::move(pay), proc(p->cont));
      }
      case Proc::Kind::In: {
        Name subj = name_at(p->subject);
        auto bs = enter(p->binders);
        auto c = proc(p->cont);
        leave(bs.size());
        return p_in(subj, bs, c);
      }
      case Proc::Kind::Sel:
        return p_sel(name_at(p->subject), p->label, proc(p->cont));
      case Proc::Kind::Bra: {
        std::vector<std::pair<std::string, ProcPtr>> bs;
        for (auto& [l, b] : p->branches) bs.emplace_back(l, proc(b));
        return p_bra(name_at(p->subject), std::move(bs));
      }
      case Proc::Kind::Res: {
        Name n = p->subject;
        if (range_roots.count(n)) {
          Name f = fresh_name(n);
          scope.emplace_back(n, f);
          scope.emplace_back(n.co(), f.co());
          n = f;
        } else {
          scope.emplace_back(n, std::nullopt);
          scope.emplace_back(n.co(), std::nullopt);
        }
        auto body = proc(p->cont);
        leave(2);
        return p_res(n, p->annot, body);
      }
      case Proc::Kind::Par:
        return p_par(proc(p->cont), proc(p->right));
      case Proc::Kind::Rec:
        return p_rec(p->label, proc(p->cont));
      case Proc::Kind::App: {
        std::vector<ValuePtr> args;
        for (auto& v : p->payload) args.push_back(value(v));
        return p_app(value(p->fun), std::move(args));
      }
    }
    return p;
  }
};

int g_recvar_serial = 0;

}  // namespace

ProcPtr substitute(const ProcPtr& p, const Subst& s) {
  if (s.empty()) return p;
  Substituter st(s);
  return st.proc(p);
}

ValuePtr substitute(const ValuePtr& v, const Subst& s) {
  if (s.empty()) return v;
  Substituter st(s);
  return st.value(v);
}

ProcPtr rename_recvar(const ProcPtr& p, const std::string& from, const std::string& to) {
  return substitute_recvar(p, from, p_var(to));
}

ProcPtr substitute_recvar(const ProcPtr& p, const std::string& x, const ProcPtr& by) {
  std::set<std::string> by_free = free_recvars(by);
  std::function<ProcPtr(const ProcPtr&)> go = [&](const ProcPtr& q) -> ProcPtr {
    switch (q->kind) {
      case Proc::Kind::Var:
        return q->label == x ? by : q;
      case Proc::Kind::Rec: {
        if (q->label == x) return q;
        if (by_free.count(q->label)) {
          std::string fresh = q->label + "'" + std::to_string(++g_recvar_serial);
          auto body = substitute_recvar(q->cont, q->label, p_var(fresh));
          return p_rec(fresh, go(body));
        }
        return p_rec(q->label, go(q->cont));
      }
      case Proc::Kind::Out: {
        std::vector<ValuePtr> pay;
        for (auto& v : q->payload) {
          if (v->kind == Value::Kind::Abs)
            pay.push_back(v_abs(v->binders, go(v->body), v->linear));
          else
            pay.push_back(v);
        }
        return p_out(q->subject, std::move(pay), go(q->cont));
      }
      case Proc::Kind::In: return p_in(q->subject, q->binders, go(q->cont));
      case Proc::Kind::Sel: return p_sel(q->subject, q->label, go(q->cont));
      case Proc::Kind::Bra: {
        std::vector<std::pair<std::string, ProcPtr>> bs;
        for (auto& [l, b] : q->branches) bs.emplace_back(l, go(b));
        return p_bra(q->subject, std::move(bs));
      }
      case Proc::Kind::Res: return p_res(q->subject, q->annot, go(q->cont));
      case Proc::Kind::Par: return p_par(go(q->cont), go(q->right));
      default: return q;
    }
  };
  return go(p);
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

struct AlphaEq {
  std::vector<std::pair<Name, int>> left, right;
  std::vector<std::pair<std::string, int>> lvars, rvars;
  int next = 0;

  static int level(const std::vector<std::pair<Name, int>>& env, const Name& n) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == n) return it->second;
    return -1;
  }
  static int vlevel(const std::vector<std::pair<std::string, int>>& env, const std::string& x) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second;
    return -1;
  }

  bool name(const Name& a, const Name& b) {
    int la = level(left, a), lb = level(right, b);
    if (la >= 0 || lb >= 0) return la == lb;
    return a == b;
  }

  void bind(const std::vector<Name>& as, const std::vector<Name>& bs) {
    for (std::size_t i = 0; i < as.size(); ++i) {
      int l = next++;
      left.emplace_back(as[i], l);
      right.emplace_back(bs[i], l);
    }
  }
  void unbind(std::size_t n) {
    left.resize(left.size() - n);
    right.resize(right.size() - n);
  }

  bool value(const ValuePtr& a, const ValuePtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case Value::Kind::Name: return name(a->name, b->name);
      case Value::Kind::Int:
      case Value::Kind::Bool: return a->num == b->num;
      case Value::Kind::Neg:
      case Value::Kind::Succ: return value(a->lhs, b->lhs);
      case Value::Kind::Add: return value(a->lhs, b->lhs) && value(a->rhs, b->rhs);
      case Value::Kind::Abs: {
        if (a->binders.size() != b->binders.size() || a->linear != b->linear) return false;
        bind(a->binders, b->binders);
        bool ok = proc(a->body, b->body);
        unbind(a->binders.size());
        return ok;
      }
    }
    return false;
  }

  bool values(const std::vector<ValuePtr>& a, const std::vector<ValuePtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!value(a[i], b[i])) return false;
    return true;
  }

  bool proc(const ProcPtr& a, const ProcPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case Proc::Kind::Nil: return true;
      case Proc::Kind::Var: {
        int la = vlevel(lvars, a->label), lb = vlevel(rvars, b->label);
        if (la >= 0 || lb >= 0) return la == lb;
        return a->label == b->label;
      }
      case Proc::Kind::Rec: {
        int l = next++;
        lvars.emplace_back(a->label, l);
        rvars.emplace_back(b->label, l);
        bool ok = proc(a->cont, b->cont);
        lvars.pop_back();
        rvars.pop_back();
        return ok;
      }
      case Proc::Kind::Out:
        return name(a->subject, b->subject) && values(a->payload, b->payload) && proc(a->cont, b->cont);
      case Proc::Kind::In: {
        if (!name(a->subject, b->subject) || a->binders.size() != b->binders.size()) return false;
        bind(a->binders, b->binders);
        bool ok = proc(a->cont, b->cont);
        unbind(a->binders.size());
        return ok;
      }
      case Proc::Kind::Sel:
        return a->label == b->label && name(a->subject, b->subject) && proc(a->cont, b->cont);
      case Proc::Kind::Bra: {
        if (!name(a->subject, b->subject) || a->branches.size() != b->branches.size()) return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i) {
          if (a->branches[i].first != b->branches[i].first) return false;
          if (!proc(a->branches[i].second, b->branches[i].second)) return false;
        }
        return true;
      }
      case Proc::Kind::Res: {
        if (a->annot.has_value() != b->annot.has_value()) return false;
        if (a->annot && !type_equal(*a->annot, *b->annot)) return false;
        bind({a->subject, a->subject.co()}, {b->subject, b->subject.co()});
        bool ok = proc(a->cont, b->cont);
        unbind(2);
        return ok;
      }
      case Proc::Kind::Par:
        return proc(a->cont, b->cont) && proc(a->right, b->right);
      case Proc::Kind::App:
        return value(a->fun, b->fun) && values(a->payload, b->payload);
    }
    return false;
  }
};

}  // namespace

bool alpha_equal(const ProcPtr& a, const ProcPtr& b) {
  AlphaEq eq;
  return eq.proc(a, b);
}

bool alpha_equal(const ValuePtr& a, const ValuePtr& b) {
  AlphaEq eq;
  return eq.value(a, b);
}

// ---------------------------------------------------------------------------
// Indexed names

Subst init_subst(const std::vector<Name>& names) {
  Subst s;
  for (auto& n : names) {
    if (n.indexed()) throw SyntaxError("init expects unindexed names, got " + n.str());
    s.bind(n, n.with_index(1));
  }
  return s;
}

Subst next_subst(const Name& n, const VTypePtr& type) {
  if (!n.indexed()) throw SyntaxError("next expects an indexed name, got " + n.str());
  Subst s;
  if (is_linear(type)) s.bind(n, n.with_index(n.index + 1));
  return s;
}

bool is_initialized(const ProcPtr& p) {
  for (auto& n : free_names(p))
    if (!n.indexed() && !n.is_propagator()) return false;
  return true;
}

std::vector<Name> fnb(const NameSet& fn, const std::vector<Name>& ctx) {
  std::vector<Name> out;
  for (auto& z : ctx) {
    bool hit = std::any_of(fn.begin(), fn.end(), [&](const Name& n) { return n.same_root(z); });
    if (hit) out.push_back(z);
  }
  return out;
}

std::vector<Name> fnb(const ProcPtr& p, const std::vector<Name>& ctx) { return fnb(free_names(p), ctx); }

std::vector<Name> bname(const Name& n, const VTypePtr& type, Mode mode) {
  if (!n.indexed()) throw SyntaxError("bname expects an indexed name, got " + n.str());
  std::vector<Name> out;
  std::size_t k = block_size(type, mode);
  for (std::size_t j = 0; j < k; ++j) out.push_back(n.with_index(n.index + static_cast<int>(j)));
  return out;
}

std::vector<Name> bname(const Name& n, const STypePtr& type, Mode mode) {
  return bname(n, v_session(type), mode);
}

bool recursion_guarded(const ProcPtr& p) {
  // A body made only of process variables (under restriction, recursion or
  // parallel composition) never reaches a prefix.
  std::function<bool(const ProcPtr&)> only_vars = [&](const ProcPtr& q) -> bool {
    switch (q->kind) {
      case Proc::Kind::Var: return true;
      case Proc::Kind::Res:
      case Proc::Kind::Rec: return only_vars(q->cont);
      case Proc::Kind::Par: return only_vars(q->cont) && only_vars(q->right);
      default: return false;
    }
  };
  std::function<bool(const ProcPtr&)> go = [&](const ProcPtr& q) -> bool {
    switch (q->kind) {
      case Proc::Kind::Rec: return !only_vars(q->cont) && go(q->cont);
      case Proc::Kind::Par: return go(q->cont) && go(q->right);
      case Proc::Kind::Bra:
        for (auto& [l, b] : q->branches)
          if (!go(b)) return false;
        return true;
      case Proc::Kind::Out:
      case Proc::Kind::In:
      case Proc::Kind::Sel:
      case Proc::Kind::Res: return go(q->cont);
      default: return true;
    }
  };
  return go(p);
}

}  // namespace mst

namespace mst {

ProcPtr erase_annotations(const ProcPtr& p) {
  std::function<ValuePtr(const ValuePtr&)> val = [&](const ValuePtr& v) -> ValuePtr {
    if (v->kind != Value::Kind::Abs) return v;
    return v_abs(v->binders, erase_annotations(v->body), v->linear);
  };
  auto vals = [&](const std::vector<ValuePtr>& vs) {
    std::vector<ValuePtr> out;
    for (auto& v : vs) out.push_back(val(v));
    return out;
  };
  switch (p->kind) {
    case Proc::Kind::Nil:
    case Proc::Kind::Var: return p;
    case Proc::Kind::Out: return p_out(p->subject, vals(p->payload), erase_annotations(p->cont));
    case Proc::Kind::In: return p_in(p->subject, p->binders, erase_annotations(p->cont));
    case Proc::Kind::Sel: return p_sel(p->subject, p->label, erase_annotations(p->cont));
    case Proc::Kind::Bra: {
      std::vector<std::pair<std::string, ProcPtr>> bs;
      for (auto& [l, b] : p->branches) bs.emplace_back(l, erase_annotations(b));
      return p_bra(p->subject, std::move(bs));
    }
    case Proc::Kind::Res: return p_res(p->subject, std::nullopt, erase_annotations(p->cont));
    case Proc::Kind::Par: return p_par(erase_annotations(p->cont), erase_annotations(p->right));
    case Proc::Kind::Rec: return p_rec(p->label, erase_annotations(p->cont));
    case Proc::Kind::App: return p_app(val(p->fun), vals(p->payload));
  }
  return p;
}

}  // namespace mst

#include "mst/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mst/syntax.hpp"

namespace mst {

ValuePtr evaluate(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Neg: {
      auto a = evaluate(v->lhs);
      return a->kind == Value::Kind::Int ? v_num(-a->num) : v_neg(a);
    }
    case Value::Kind::Succ: {
      auto a = evaluate(v->lhs);
      return a->kind == Value::Kind::Int ? v_num(a->num + 1) : v_succ(a);
    }
    case Value::Kind::Add: {
      auto a = evaluate(v->lhs), b = evaluate(v->rhs);
      if (a->kind == Value::Kind::Int && b->kind == Value::Kind::Int) return v_num(a->num + b->num);
      return v_add(a, b);
    }
    default:
      return v;
  }
}

std::string to_string(const ReductionEvent& e) {
  std::ostringstream os;
  if (e.administrative) os << "[admin] ";
  os << e.subject.str();
  if (e.kind == ReductionEvent::Kind::Select) {
    os << "+" << e.label;
  } else {
    os << "!(";
    for (std::size_t i = 0; i < e.payload.size(); ++i)
      os << (i ? ", " : "") << print_value(e.payload[i]);
    os << ")";
  }
  return os.str();
}

namespace {

bool is_prefix(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Out:
    case Proc::Kind::In:
    case Proc::Kind::Sel:
    case Proc::Kind::Bra:
      return true;
    default:
      return false;
  }
}

ProcPtr unfolding(const ProcPtr& rec) { return substitute_recvar(rec->cont, rec->label, rec); }

// Threads of a term ignoring restrictions; same order as Engine::add.
void flatten(const ProcPtr& p, std::vector<ProcPtr>& out) {
  switch (p->kind) {
    case Proc::Kind::Nil:
      return;
    case Proc::Kind::Par:
      flatten(p->cont, out);
      flatten(p->right, out);
      return;
    case Proc::Kind::Res:
      flatten(p->cont, out);
      return;
    default:
      out.push_back(p);
  }
}

bool handshake(const ProcPtr& out) {
  if (out->kind != Proc::Kind::Out || out->payload.empty()) return false;
  for (auto& v : out->payload) {
    if (v->kind != Value::Kind::Name) return false;
    const Name& n = v->name;
    if (n.base != out->subject.base || n.kind_class() != out->subject.kind_class() ||
        n.generated != out->subject.generated || n.serial != out->subject.serial)
      return false;
  }
  return true;
}

STypePtr advance(const STypePtr& s, const std::string& label) {
  STypePtr u = unfold(s);
  switch (u->kind) {
    case SType::Kind::Out:
    case SType::Kind::In:
      return u->cont;
    case SType::Kind::Select:
    case SType::Kind::Branch:
      for (auto& [l, b] : u->branches)
        if (l == label) return b;
      return s;
    default:
      return s;
  }
}

struct Candidate {
  std::size_t thread;
  int sub;
  ProcPtr proc;
  long birth;
};

}  // namespace

Engine::Engine(const ProcPtr& p) {
  for (auto& n : free_names(p)) used_.insert(n.plain());
  add(state_, p, 0);
}

void Engine::add(State& st, const ProcPtr& p, long birth) {
  switch (p->kind) {
    case Proc::Kind::Nil:
      return;
    case Proc::Kind::Par:
      add(st, p->cont, birth);
      add(st, p->right, birth);
      return;
    case Proc::Kind::Res: {
      Name n = p->subject;
      ProcPtr body = p->cont;
      if (used_.count(n.plain()) || used_.count(n.plain().co())) {
        Name f = fresh_name(n.plain());
        Subst s;
        s.bind_pair(n.plain(), f);
        body = substitute(body, s);
        n = n.dual ? f.co() : f;
      }
      n = n.plain();
      if (p->annot && (*p->annot)->kind == VType::Kind::Shared && !n.is_propagator() &&
          n.kind != NameKind::Shared) {
        // Identical shared endpoints synchronize, so occurrences need the kind.
        n.kind = NameKind::Shared;
        Subst s;
        s.bind(n, n);
        body = substitute(body, s);
      }
      used_.insert(n);
      st.restricted.push_back({n, p->annot});
      add(st, body, birth);
      return;
    }
    default:
      for (auto& n : all_names(p)) used_.insert(n.plain());
      st.threads.push_back({p, birth});
  }
}

std::vector<Redex> Engine::redexes() const {
  std::vector<Candidate> outs, ins;
  auto consider = [&](std::size_t i, int sub, const ProcPtr& q, long birth) {
    if (q->kind == Proc::Kind::Out || q->kind == Proc::Kind::Sel) outs.push_back({i, sub, q, birth});
    if (q->kind == Proc::Kind::In || q->kind == Proc::Kind::Bra) ins.push_back({i, sub, q, birth});
  };
  for (std::size_t i = 0; i < state_.threads.size(); ++i) {
    const auto& t = state_.threads[i];
    if (is_prefix(t.proc)) {
      consider(i, -1, t.proc, t.birth);
    } else if (t.proc->kind == Proc::Kind::Rec) {
      std::vector<ProcPtr> parts;
      flatten(unfolding(t.proc), parts);
      for (std::size_t u = 0; u < parts.size(); ++u)
        if (is_prefix(parts[u])) consider(i, static_cast<int>(u), parts[u], t.birth);
    }
  }
  std::vector<Redex> rs;
  for (auto& o : outs)
    for (auto& in : ins) {
      if (o.thread == in.thread && (o.sub < 0 || in.sub < 0 || o.sub == in.sub)) continue;
      bool pass = o.proc->kind == Proc::Kind::Out && in.proc->kind == Proc::Kind::In;
      bool sel = o.proc->kind == Proc::Kind::Sel && in.proc->kind == Proc::Kind::Bra;
      if (!pass && !sel) continue;
      if (!communicates(o.proc->subject, in.proc->subject)) continue;
      Redex r;
      r.sender = o.thread;
      r.receiver = in.thread;
      r.sender_sub = o.sub;
      r.receiver_sub = in.sub;
      r.out = o.proc;
      r.in = in.proc;
      r.administrative = o.proc->subject.generated || handshake(o.proc);
      r.enabled = std::max(o.birth, in.birth);
      r.prop_index = o.proc->subject.is_propagator() ? o.proc->subject.index : 0;
      rs.push_back(std::move(r));
    }
  std::stable_sort(rs.begin(), rs.end(), [](const Redex& a, const Redex& b) {
    if (a.administrative != b.administrative) return a.administrative;
    if (a.enabled != b.enabled) return a.enabled > b.enabled;
    if ((a.prop_index > 0) != (b.prop_index > 0)) return a.prop_index > 0;
    if (a.prop_index != b.prop_index) return a.prop_index > b.prop_index;
    auto ka = std::minmax(a.sender, a.receiver), kb = std::minmax(b.sender, b.receiver);
    return ka < kb;
  });
  return rs;
}

void Engine::advance_annotation(const Name& subject, const std::string& label) {
  for (auto& r : state_.restricted) {
    if (!(r.name == subject.plain())) continue;
    if (!r.annot || (*r.annot)->kind != VType::Kind::Session) return;
    r.annot = v_session(advance((*r.annot)->session, label));
    return;
  }
}

ReductionEvent Engine::fire(const Redex& r) {
  ++steps_;
  const long sender_birth = steps_, receiver_birth = steps_;

  // Expand the recursion threads taking part, keeping term order.
  std::vector<Thread> expanded;
  std::size_t s_pos = SIZE_MAX, r_pos = SIZE_MAX;
  for (std::size_t j = 0; j < state_.threads.size(); ++j) {
    const auto& t = state_.threads[j];
    bool is_s = j == r.sender, is_r = j == r.receiver;
    if (!is_s && !is_r) {
      expanded.push_back(t);
      continue;
    }
    if (t.proc->kind != Proc::Kind::Rec) {
      if (is_s) s_pos = expanded.size();
      if (is_r) r_pos = expanded.size();
      expanded.push_back(t);
      continue;
    }
    State part;
    add(part, unfolding(t.proc), t.birth);
    for (auto& res : part.restricted) state_.restricted.push_back(res);
    for (std::size_t u = 0; u < part.threads.size(); ++u) {
      if (is_s && static_cast<int>(u) == r.sender_sub) s_pos = expanded.size();
      if (is_r && static_cast<int>(u) == r.receiver_sub) r_pos = expanded.size();
      expanded.push_back(part.threads[u]);
    }
  }
  if (s_pos == SIZE_MAX || r_pos == SIZE_MAX) throw std::logic_error("redex does not match the state");
  ProcPtr out = expanded[s_pos].proc, in = expanded[r_pos].proc;

  ReductionEvent ev;
  ev.subject = out->subject;
  ev.administrative = out->subject.generated || handshake(out);
  ProcPtr out_cont, in_cont;
  if (out->kind == Proc::Kind::Out) {
    ev.kind = ReductionEvent::Kind::Pass;
    if (out->payload.size() != in->binders.size())
      throw std::runtime_error("arity mismatch on " + out->subject.str());
    Subst s;
    for (std::size_t i = 0; i < out->payload.size(); ++i) {
      ValuePtr v = evaluate(out->payload[i]);
      ev.payload.push_back(v);
      s.bind(in->binders[i], v);
    }
    out_cont = out->cont;
    in_cont = substitute(in->cont, s);
  } else {
    ev.kind = ReductionEvent::Kind::Select;
    ev.label = out->label;
    out_cont = out->cont;
    for (auto& [l, b] : in->branches)
      if (l == out->label) in_cont = b;
    if (!in_cont) throw std::runtime_error("no branch " + out->label + " on " + in->subject.str());
  }
  advance_annotation(out->subject, ev.label);

  std::vector<Thread> next;
  State cont;
  for (std::size_t j = 0; j < expanded.size(); ++j) {
    if (j == s_pos || j == r_pos) {
      cont.threads.clear();
      add(cont, j == s_pos ? out_cont : in_cont, j == s_pos ? sender_birth : receiver_birth);
      next.insert(next.end(), cont.threads.begin(), cont.threads.end());
    } else {
      next.push_back(expanded[j]);
    }
  }
  for (auto& res : cont.restricted) state_.restricted.push_back(res);
  state_.threads = std::move(next);
  return ev;
}

std::optional<ReductionEvent> Engine::step() {
  auto rs = redexes();
  if (rs.empty()) return std::nullopt;
  return fire(rs.front());
}

ProcPtr Engine::process() const {
  std::vector<ProcPtr> ps;
  NameSet live;
  for (auto& t : state_.threads) {
    ps.push_back(t.proc);
    for (auto& n : free_names(t.proc)) live.insert(n.plain());
  }
  ProcPtr body = p_par(ps);
  for (auto it = state_.restricted.rbegin(); it != state_.restricted.rend(); ++it)
    if (live.count(it->name)) body = p_res(it->name, it->annot, body);
  return body;
}

ProcPtr scong_normalize(const ProcPtr& p) {
  Engine e(p);
  State st = e.state();
  std::stable_sort(st.threads.begin(), st.threads.end(), [](const Thread& a, const Thread& b) {
    return print_process(a.proc) < print_process(b.proc);
  });
  std::vector<ProcPtr> ps;
  NameSet live;
  for (auto& t : st.threads) {
    ps.push_back(t.proc);
    for (auto& n : free_names(t.proc)) live.insert(n.plain());
  }
  ProcPtr body = p_par(ps);
  for (auto it = st.restricted.rbegin(); it != st.restricted.rend(); ++it)
    if (live.count(it->name)) body = p_res(it->name, it->annot, body);
  return body;
}

std::string canonical(const ProcPtr& p) {
  Engine e(p);
  const State& st = e.state();
  // Mask every restricted name, order threads by the masked text, then give
  // restricted names ranks by first appearance in that order.
  Subst mask;
  for (auto& r : st.restricted) mask.bind_pair(r.name, generated_name("\x01"));
  std::vector<std::pair<std::string, ProcPtr>> threads;
  for (auto& t : st.threads) threads.emplace_back(print_process(substitute(t.proc, mask)), t.proc);
  std::stable_sort(threads.begin(), threads.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });

  std::vector<std::pair<std::size_t, std::size_t>> first;  // (position, restricted index)
  std::string joined;
  {
    Subst tag;
    for (std::size_t i = 0; i < st.restricted.size(); ++i)
      tag.bind_pair(st.restricted[i].name, generated_name("\x02" + std::to_string(i) + "\x02"));
    for (auto& [m, q] : threads) joined += print_process(substitute(q, tag)) + "\n";
    for (std::size_t i = 0; i < st.restricted.size(); ++i) {
      auto pos = joined.find("\x02" + std::to_string(i) + "\x02");
      if (pos != std::string::npos) first.emplace_back(pos, i);
    }
  }
  std::sort(first.begin(), first.end());
  Subst rank;
  std::string header;
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto& r = st.restricted[first[k].second];
    rank.bind_pair(r.name, generated_name("nu" + std::to_string(k)));
    header += "nu" + std::to_string(k) + (r.annot ? ":" + to_string(*r.annot) : "") + ";";
  }
  std::string out = header + "\n";
  for (auto& [m, q] : threads) out += print_process(substitute(q, rank)) + "\n";
  return out;
}

std::vector<ReductionEvent> reduce_step(const ProcPtr& p) {
  Engine e(p);
  std::vector<ReductionEvent> out;
  for (auto& r : e.redexes()) {
    Engine copy = e;
    out.push_back(copy.fire(r));
  }
  return out;
}

Trace run(const ProcPtr& p, int budget) {
  Engine e(p);
  Trace t;
  for (int i = 0; i < budget; ++i) {
    auto ev = e.step();
    if (!ev) break;
    t.events.push_back(*ev);
  }
  t.exhausted_budget = e.steps() >= budget && !e.redexes().empty();
  t.final = e.process();
  return t;
}

std::vector<ReductionEvent> observable_trace(const ProcPtr& p, int budget) {
  std::vector<ReductionEvent> out;
  for (auto& ev : run(p, budget).events)
    if (!ev.administrative) out.push_back(ev);
  return out;
}

bool events_related(const ReductionEvent& src, const ReductionEvent& tgt) {
  if (src.kind != tgt.kind) return false;
  if (src.subject.base != tgt.subject.base || src.subject.dual != tgt.subject.dual) return false;
  if (src.kind == ReductionEvent::Kind::Select) return src.label == tgt.label;
  std::size_t j = 0;
  for (auto& v : src.payload) {
    if (v->kind == Value::Kind::Name) {
      std::size_t start = j;
      while (j < tgt.payload.size() && tgt.payload[j]->kind == Value::Kind::Name &&
             tgt.payload[j]->name.base == v->name.base && tgt.payload[j]->name.dual == v->name.dual)
        ++j;
      if (j == start) return false;
    } else {
      if (j >= tgt.payload.size() || !alpha_equal(evaluate(v), evaluate(tgt.payload[j]))) return false;
      ++j;
    }
  }
  return j == tgt.payload.size();
}

namespace {

bool is_trigger(const ValuePtr& v) {
  return v->kind == Value::Kind::Name && v->name.generated && !v->name.is_propagator() &&
         v->name.kind == NameKind::Shared;
}

// An essential event that only hands over a trigger is related through the
// values the trigger eventually delivers: follow the chain of single
// generated names until a step carries something else. Empty when the chain
// has not finished yet.
std::optional<std::vector<ValuePtr>> delivered(const std::vector<ReductionEvent>& evs, std::size_t i) {
  Name cur = evs[i].payload[0]->name;
  for (std::size_t j = i + 1; j < evs.size(); ++j) {
    const auto& e = evs[j];
    if (e.kind != ReductionEvent::Kind::Pass || !(e.subject.plain() == cur.plain())) continue;
    if (e.payload.size() == 1 && e.payload[0]->kind == Value::Kind::Name && e.payload[0]->name.generated &&
        !e.payload[0]->name.is_propagator()) {
      cur = e.payload[0]->name;
      continue;
    }
    return e.payload;
  }
  return std::nullopt;
}

// A truncated run may stop inside a trigger chain; `drop_pending` leaves such
// events out instead of comparing the bare trigger.
std::vector<ReductionEvent> essential(const std::vector<ReductionEvent>& evs, bool drop_pending = false) {
  std::vector<ReductionEvent> out;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    if (evs[i].administrative) continue;
    if (evs[i].payload.size() == 1 && is_trigger(evs[i].payload[0])) {
      auto values = delivered(evs, i);
      if (!values && drop_pending) continue;
      out.push_back(evs[i]);
      if (values) out.back().payload = *values;
      continue;
    }
    out.push_back(evs[i]);
  }
  return out;
}

bool pointwise(const std::vector<ReductionEvent>& s, const std::vector<ReductionEvent>& t) {
  if (s.size() != t.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!events_related(s[i], t[i])) return false;
  return true;
}

// Events on distinct channels may be scheduled in either order; compare the
// per-channel projections.
bool per_channel(const std::vector<ReductionEvent>& s, const std::vector<ReductionEvent>& t) {
  if (s.size() != t.size()) return false;
  std::map<std::string, std::vector<ReductionEvent>> ps, pt;
  for (auto& e : s) ps[e.subject.base].push_back(e);
  for (auto& e : t) pt[e.subject.base].push_back(e);
  if (ps.size() != pt.size()) return false;
  for (auto& [k, v] : ps) {
    auto it = pt.find(k);
    if (it == pt.end() || !pointwise(v, it->second)) return false;
  }
  return true;
}

// Bounded search over administrative interleavings of the target for a run
// whose observable trace relates to the source.
bool search_admin(const Engine& start, const std::vector<ReductionEvent>& src, int budget,
                  int& states_left) {
  struct Node {
    Engine e;
    std::vector<ReductionEvent> seen;  // every event, administrative included
    std::size_t observed = 0;
  };
  std::vector<Node> stack{{start, {}}};
  std::set<std::string> visited;
  while (!stack.empty() && states_left-- > 0) {
    Node n = std::move(stack.back());
    stack.pop_back();
    if (!visited.insert(canonical(n.e.process()) + std::to_string(n.observed)).second) continue;
    auto rs = n.e.redexes();
    if (rs.empty() || n.e.steps() >= budget) {
      if (per_channel(src, essential(n.seen))) return true;
      continue;
    }
    std::vector<Redex> choices;
    for (auto& r : rs)
      if (r.administrative) choices.push_back(r);
    if (choices.empty()) choices.push_back(rs.front());
    for (auto it = choices.rbegin(); it != choices.rend(); ++it) {
      Node m = n;
      auto ev = m.e.fire(*it);
      m.seen.push_back(ev);
      if (!ev.administrative && ++m.observed > src.size()) continue;
      stack.push_back(std::move(m));
    }
  }
  return false;
}

}  // namespace

Correspondence correspond(const ProcPtr& source, const ProcPtr& target, int budget) {
  Correspondence c;
  Trace ts = run(source, budget), tt = run(target, budget);
  c.source = essential(ts.events);
  c.target = essential(tt.events, tt.exhausted_budget);
  if (ts.exhausted_budget || tt.exhausted_budget) {
    std::size_t n = std::min(c.source.size(), c.target.size());
    std::vector<ReductionEvent> a(c.source.begin(), c.source.begin() + n),
        b(c.target.begin(), c.target.begin() + n);
    c.exact_order = pointwise(a, b);
    c.verdict = c.exact_order || per_channel(a, b) ? Verdict::Inconclusive : Verdict::Mismatch;
    c.detail = "budget exhausted after " + std::to_string(n) + " related events";
    return c;
  }
  if (pointwise(c.source, c.target)) {
    c.verdict = Verdict::Ok;
    c.exact_order = true;
    return c;
  }
  if (per_channel(c.source, c.target)) {
    c.verdict = Verdict::Ok;
    c.detail = "matches up to reordering of events on distinct channels";
    return c;
  }
  if (c.target.size() < c.source.size()) {
    int states = 2000;
    if (search_admin(Engine(target), c.source, budget, states)) {
      c.verdict = Verdict::Ok;
      c.detail = "matched by an alternative administrative interleaving";
      return c;
    }
  }
  c.verdict = Verdict::Mismatch;
  c.detail = "source has " + std::to_string(c.source.size()) + " events, target " +
             std::to_string(c.target.size());
  return c;
}

}  // namespace mst

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mst/corpus.hpp"
#include "mst/decompose.hpp"
#include "mst/env.hpp"
#include "mst/semantics.hpp"
#include "mst/syntax.hpp"
#include "mst/types.hpp"

namespace fixtures {

using namespace mst;

// Delegation of w over u: the running example of the composed decomposition.
inline const char* kDelegation =
    "(new u : !(!(Int).?(Int).end).end)(u!(w).~w?(t).~w!(succ t).0 | ~u?(x).x!(5).x?(b).0)";
inline const char* kDelegationEnv = "[delta]\nw : !(Int).?(Int).end\n~w : ?(Int).!(Int).end\n";

inline const char* kMathServerType =
    "&{add: ?(Int).?(Int).!(Int).end, neg: ?(Int).!(Int).end}";
inline const char* kMathServer =
    "(new u : &{add: ?(Int).?(Int).!(Int).end, neg: ?(Int).!(Int).end})"
    "(u&{add: u?(a).u?(b).u!(a+b).0, neg: u?(a).u!(-a).0} | ~u+add.~u!(16).~u!(26).~u?(r).0)";

inline const char* kNegateLoop = "rec X.r?(z).r!(-z).X";
inline const char* kNegateLoopEnv = "[delta]\nr : mu t.?(Int).!(Int).t\n";

inline const char* kPingPong = "rec X.r?(x).r!(succ x).X | rec Y.~r!(1).~r?(y).Y";
inline const char* kPingPongEnv = "[delta]\nr : mu t.?(Int).!(Int).t\n~r : mu t.!(Int).?(Int).t\n";

struct Source {
  ProcPtr process;
  TypeEnv env;
};

inline Source source(const std::string& proc, const std::string& env = "") {
  Source s;
  s.env = parse_env(env);
  s.process = apply_env_kinds(parse_process(proc), s.env);
  return s;
}

inline std::string corpus_dir() { return MST_CORPUS_DIR; }

inline std::vector<CorpusEntry> corpus() { return load_corpus(corpus_dir()); }

inline bool has_choice(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Sel:
    case Proc::Kind::Bra: return true;
    case Proc::Kind::Par: return has_choice(p->cont) || has_choice(p->right);
    case Proc::Kind::Out:
    case Proc::Kind::In:
    case Proc::Kind::Res:
    case Proc::Kind::Rec: return has_choice(p->cont);
    default: return false;
  }
}

inline bool has_recursion(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Rec:
    case Proc::Kind::Var: return true;
    case Proc::Kind::Par: return has_recursion(p->cont) || has_recursion(p->right);
    case Proc::Kind::Bra:
      for (auto& [l, b] : p->branches)
        if (has_recursion(b)) return true;
      return false;
    case Proc::Kind::Out:
    case Proc::Kind::In:
    case Proc::Kind::Sel:
    case Proc::Kind::Res: return has_recursion(p->cont);
    default: return false;
  }
}

// ----- milestone states of a run

// All events of a deterministic run, one per step.
inline std::vector<ReductionEvent> steps_of(const ProcPtr& p, int budget) {
  return run(p, budget).events;
}

// A step on anything but a propagator moves data between the two sides.
inline bool is_communication(const ReductionEvent& e) { return !e.subject.is_propagator(); }

inline std::vector<int> communication_steps(const std::vector<ReductionEvent>& evs) {
  std::vector<int> out;
  for (std::size_t i = 0; i < evs.size(); ++i)
    if (is_communication(evs[i])) out.push_back(static_cast<int>(i) + 1);
  return out;
}

// Cumulative step counts of the seven milestone states of the delegation
// run: the state just before each of the six communications, and the
// state right after the last one.
inline std::vector<std::optional<int>> delegation_milestones(const std::vector<ReductionEvent>& evs) {
  auto comm = communication_steps(evs);
  std::vector<std::optional<int>> out;
  for (std::size_t i = 0; i < 6; ++i) out.push_back(i < comm.size() ? std::optional<int>(comm[i] - 1) : std::nullopt);
  out.push_back(comm.size() >= 6 ? std::optional<int>(comm[5]) : std::nullopt);
  return out;
}

// The five milestone states of the math-server run:
//   1 just before the selection
//   2 right after it
//   3 the continuation names have been handed over and the chosen branch
//     started its first local propagator while the client's next propagator
//     is still waiting
//   4 right after the first integer was passed
//   5 just before the result is passed back
inline std::vector<std::optional<int>> math_server_milestones(const std::vector<ReductionEvent>& evs) {
  std::vector<std::optional<int>> out(5);
  std::vector<int> comm = communication_steps(evs);
  int select_at = 0;
  for (int c : comm)
    if (evs[c - 1].kind == ReductionEvent::Kind::Select) {
      select_at = c;
      break;
    }
  if (select_at) {
    out[0] = select_at - 1;
    out[1] = select_at;
  }
  // handshake: the first pass after the selection
  std::optional<int> handshake;
  for (int c : comm)
    if (c > select_at && select_at) {
      handshake = c;
      break;
    }
  // local propagators of the chosen branch carry a serial, the client's do not
  if (handshake && *handshake < static_cast<int>(evs.size())) {
    const auto& next = evs[*handshake];
    if (next.subject.is_propagator() && next.subject.serial > 0) out[2] = *handshake + 1;
  }
  std::vector<int> passes;
  for (int c : comm)
    if (evs[c - 1].kind == ReductionEvent::Kind::Pass && !evs[c - 1].administrative) passes.push_back(c);
  if (!passes.empty()) out[3] = passes.front();
  if (!passes.empty()) out[4] = passes.back() - 1;
  return out;
}

// ----- random generators

class TypeGen {
 public:
  explicit TypeGen(unsigned seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  VTypePtr base() { return pick(2) ? v_int() : v_bool(); }

  VTypePtr payload(int depth, bool allow_shared, bool allow_choice = true) {
    int k = pick(depth > 0 ? (allow_shared ? 4 : 3) : 2);
    if (k < 2) return base();
    if (k == 2) return v_session(finite(depth - 1, allow_shared, allow_choice));
    return v_shared({base()});
  }

  std::vector<VTypePtr> payloads(int depth, bool allow_shared, bool allow_choice = true) {
    std::vector<VTypePtr> out;
    int n = 1 + pick(2);
    for (int i = 0; i < n; ++i) out.push_back(payload(depth, allow_shared, allow_choice));
    return out;
  }

  // A finite session type with optional choices.
  STypePtr finite(int depth, bool allow_shared = true, bool allow_choice = true) {
    if (depth <= 0 || pick(5) == 0) return s_end();
    int k = pick(allow_choice ? 6 : 4);
    if (k < 2) return s_out(payloads(depth - 1, allow_shared, allow_choice), finite(depth - 1, allow_shared, allow_choice));
    if (k < 4) return s_in(payloads(depth - 1, allow_shared, allow_choice), finite(depth - 1, allow_shared, allow_choice));
    std::vector<std::pair<std::string, STypePtr>> bs;
    int n = 1 + pick(2);
    for (int i = 0; i < n; ++i) bs.push_back({"l" + std::to_string(i), finite(depth - 1, allow_shared, allow_choice)});
    return k == 4 ? s_select(bs) : s_branch(bs);
  }

  // mu t. p1 ... pn . t with 1..max_len prefixes.
  STypePtr tail_recursive(int max_len, bool allow_shared = true) {
    int n = 1 + pick(max_len);
    STypePtr body = s_var("t");
    for (int i = 0; i < n; ++i) {
      auto pay = payloads(1, allow_shared);
      body = pick(2) ? s_out(pay, body) : s_in(pay, body);
    }
    return s_rec("t", body);
  }

  // Any closed session type: finite, tail-recursive, or a finite prefix
  // chain in front of a tail-recursive one.
  STypePtr any(int depth, bool allow_choice = true) {
    switch (pick(3)) {
      case 0: return finite(depth, true, allow_choice);
      case 1: return tail_recursive(3);
      default: {
        STypePtr t = tail_recursive(3);
        int n = 1 + pick(2);
        for (int i = 0; i < n; ++i) t = pick(2) ? s_out({base()}, t) : s_in({base()}, t);
        return t;
      }
    }
  }

 private:
  std::mt19937 rng_;
};

// Peels the first `m` prefixes off the unfolding of a tail-recursive type.
inline STypePtr peel(const STypePtr& tr, int m) {
  STypePtr cur = tr;
  for (int i = 0; i < m; ++i) {
    cur = unfold(cur);
    cur = cur->cont;
  }
  return cur;
}

// Builds a well-typed closed normal form: one restricted session per pair of
// random finite types, each implemented by a sender and a receiver thread.
class ProcessGen {
 public:
  explicit ProcessGen(unsigned seed) : types_(seed), rng_(seed * 7 + 1) {}

  Source normal_form(int sessions) {
    threads_.clear();
    res_.clear();
    for (int i = 0; i < sessions; ++i) {
      Name s = user_name("s" + std::to_string(i));
      STypePtr t = types_.finite(3, false, false);
      if (is_end(t)) t = s_out({v_int()}, s_end());
      res_.push_back({s, v_session(t)});
      threads_.push_back(implement(s, t));
      threads_.push_back(implement(s.co(), dual(t)));
    }
    std::vector<ProcPtr> live;
    for (auto& th : threads_)
      if (th->kind != Proc::Kind::Nil) live.push_back(th);
    ProcPtr body = p_par(live);
    for (auto it = res_.rbegin(); it != res_.rend(); ++it) body = p_res(it->first, it->second, body);
    return {body, {}};
  }

 private:
  TypeGen types_;
  std::mt19937 rng_;
  int fresh_ = 0;
  std::vector<ProcPtr> threads_;
  std::vector<std::pair<Name, VTypePtr>> res_;

  ValuePtr literal(const VTypePtr& t) {
    if (t->kind == VType::Kind::Bool) return v_boolean(rng_() % 2);
    return v_num(static_cast<long long>(rng_() % 50));
  }

  // A session payload is a fresh top-level session whose other endpoint
  // runs as its own thread, so the result stays in normal form.
  ProcPtr implement(const Name& subject, const STypePtr& t) {
    if (is_end(t)) return p_nil();
    if (t->kind == SType::Kind::Out) {
      std::vector<ValuePtr> vals;
      for (auto& pt : t->payload) {
        if (pt->kind == VType::Kind::Session) {
          Name n = user_name("d" + std::to_string(fresh_++));
          res_.push_back({n, pt});
          vals.push_back(v_name(n));
          threads_.push_back(implement(n.co(), dual(pt->session)));
        } else {
          vals.push_back(literal(pt));
        }
      }
      return p_out(subject, vals, implement(subject, t->cont));
    }
    std::vector<Name> binders;
    for (std::size_t i = 0; i < t->payload.size(); ++i) binders.push_back(var_name("x" + std::to_string(fresh_++)));
    ProcPtr cont = implement(subject, t->cont);
    // received sessions are driven to their end by the receiver
    for (std::size_t i = 0; i < binders.size(); ++i)
      if (t->payload[i]->kind == VType::Kind::Session && !is_end(t->payload[i]->session))
        cont = cont->kind == Proc::Kind::Nil ? implement(binders[i], t->payload[i]->session)
                                             : p_par(cont, implement(binders[i], t->payload[i]->session));
    return p_in(subject, binders, cont);
  }
};

}  // namespace fixtures

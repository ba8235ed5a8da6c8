#pragma once

#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "mst/metrics.hpp"
#include "mst/typecheck.hpp"

// Property checks shared by the unit suites and the acceptance binary. Each
// returns the first counterexample it finds.
namespace properties {

using namespace mst;
using namespace fixtures;

struct Outcome {
  bool ok = true;
  int checked = 0;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

inline Outcome duality_involution(int count, unsigned seed) {
  Outcome r;
  TypeGen gen(seed);
  for (int i = 0; i < count; ++i, ++r.checked) {
    STypePtr s = gen.any(4);
    if (to_string(dual(dual(s))) != to_string(s)) {
      r.fail("dual(dual S) != S for " + to_string(s));
      break;
    }
  }
  return r;
}

// G(dual S) is the pointwise dual of G(S), for types without shared payloads.
inline Outcome decomposition_commutes_with_duality(int count, unsigned seed) {
  Outcome r;
  TypeGen gen(seed);
  for (int i = 0; i < count; ++i, ++r.checked) {
    STypePtr s = gen.pick(2) ? gen.finite(4, false) : gen.tail_recursive(4, false);
    auto a = decompose_opt(dual(s));
    auto b = decompose_opt(s);
    bool same = a.size() == b.size();
    for (std::size_t j = 0; same && j < a.size(); ++j) same = to_string(a[j]) == to_string(dual(b[j]));
    if (!same) {
      r.fail("G(dual S) differs from dual G(S) for " + to_string(s));
      break;
    }
  }
  return r;
}

// Every component of both type decompositions is minimal, and the composed
// one has as many components as the optimized one.
inline Outcome decomposed_types_minimal(int count, unsigned seed) {
  Outcome r;
  TypeGen gen(seed);
  for (int i = 0; i < count; ++i, ++r.checked) {
    STypePtr s = gen.pick(3) ? gen.finite(4, true, false) : gen.any(3, false);
    auto g = decompose_opt(s);
    auto m = decompose_composed(s);
    for (auto& t : g)
      if (!is_minimal(t)) r.fail("G component " + to_string(t) + " of " + to_string(s) + " is not minimal");
    for (auto& t : m)
      if (!is_minimal(t)) r.fail("mGt component " + to_string(t) + " of " + to_string(s) + " is not minimal");
    if (g.size() != m.size()) r.fail("component counts differ for " + to_string(s));
    if (!r.ok) break;
  }
  return r;
}

// Typing and minimality of both decompositions of every corpus entry that
// the decomposition supports.
inline Outcome decompositions_minimal(const std::vector<CorpusEntry>& entries) {
  Outcome r;
  for (auto& e : entries) {
    for (Mode mode : {Mode::Opt, Mode::Composed}) {
      if (mode == Mode::Composed && has_choice(e.process)) continue;
      ++r.checked;
      const char* m = mode == Mode::Opt ? "D" : "F";
      Decomposition d;
      try {
        d = decompose(e.process, e.env, mode);
      } catch (const std::exception& ex) {
        r.fail(std::string(m) + "(" + e.name + ") failed: " + ex.what());
        continue;
      }
      auto rep = typecheck(d.env, d.process);
      if (!rep.ok) r.fail(std::string(m) + "(" + e.name + ") does not typecheck: " + rep.failures.front().message);
      if (!check_minimality(d.env)) r.fail(std::string(m) + "(" + e.name + ") environment is not minimal");
      if (!annotations_minimal(d.process)) r.fail(std::string(m) + "(" + e.name + ") has a non-minimal annotation");
    }
  }
  return r;
}

// Along a deterministic run every state typechecks, under the current
// linear environment or one of its reducts.
inline Outcome subject_reduction(const ProcPtr& p, const TypeEnv& env, int steps, const std::string& label) {
  Outcome r;
  Engine engine(p);
  TypeEnv cur = env;
  for (int i = 0; i < steps; ++i) {
    if (!engine.step()) break;
    ++r.checked;
    ProcPtr q = engine.process();
    if (typecheck(cur, q).ok) continue;
    bool found = false;
    for (auto& d : env_reducts(cur.delta)) {
      TypeEnv next{cur.gamma, d};
      if (typecheck(next, q).ok) {
        cur = next;
        found = true;
        break;
      }
    }
    if (!found) {
      r.fail(label + ": state after step " + std::to_string(i + 1) + " does not typecheck: " + print_process(q));
      break;
    }
  }
  return r;
}

inline Outcome subject_reduction_corpus(const std::vector<CorpusEntry>& entries, int steps) {
  Outcome total;
  for (auto& e : entries) {
    auto r = subject_reduction(e.process, e.env, steps, e.name);
    total.checked += r.checked;
    if (!r.ok) total.fail(r.detail);
  }
  return total;
}

// Core fragment: no recursion and no choice.
inline bool core_fragment(const ProcPtr& p) { return !has_recursion(p) && !has_choice(p); }

// The composed breakdown equals the literal three-stage pipeline.
inline Outcome composition_oracle(const std::vector<CorpusEntry>& entries) {
  Outcome r;
  for (auto& e : entries) {
    if (!core_fragment(e.process)) continue;
    ++r.checked;
    auto prep = prepare_composed(e.process, e.env);
    ProcPtr direct = breakdown_composed(prep, prep.process, 1, {}).process;
    ProcPtr literal = encode_ho_to_pi(breakdown_ho(encode_pi_to_ho(prep.process), 1, {}));
    if (!alpha_equal(erase_annotations(direct), erase_annotations(literal)))
      r.fail(e.name + ": direct and pipeline breakdowns differ");
  }
  return r;
}

// Reference position of the channel that mimics the next action after
// `peeled` prefixes of a loop of `length` prefixes.
inline int expected_index(int peeled, int length) { return peeled % length + 1; }

inline int loop_length(const STypePtr& tr) {
  int n = 0;
  for (STypePtr b = tr->cont; b->kind != SType::Kind::Var; b = b->cont) ++n;
  return n;
}

inline Outcome index_agreement(int count, unsigned seed) {
  Outcome r;
  TypeGen gen(seed);
  for (int i = 0; i < count; ++i, ++r.checked) {
    STypePtr tr = gen.tail_recursive(5);
    int len = loop_length(tr);
    int peeled = gen.pick(2 * len + 1);
    STypePtr s = peel(tr, peeled);
    int opt = index_fn(s, Mode::Opt), comp = index_fn(s, Mode::Composed);
    if (opt != comp || opt != expected_index(peeled, len)) {
      std::ostringstream os;
      os << "index of " << to_string(s) << ": opt " << opt << ", composed " << comp << ", expected "
         << expected_index(peeled, len);
      r.fail(os.str());
      break;
    }
  }
  return r;
}

// From a state with several administrative redexes, firing any one of them
// and continuing with administrative steps only reaches a common state.
inline std::set<std::string> administrative_closure(const Engine& start, std::size_t limit) {
  std::set<std::string> seen;
  std::vector<Engine> stack{start};
  while (!stack.empty() && seen.size() < limit) {
    Engine e = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(canonical(e.process())).second) continue;
    for (auto& rd : e.redexes()) {
      if (!rd.administrative) continue;
      Engine next = e;
      next.fire(rd);
      stack.push_back(std::move(next));
    }
  }
  return seen;
}

inline Outcome administrative_confluence(const ProcPtr& p, int steps, const std::string& label) {
  Outcome r;
  Engine engine(p);
  for (int i = 0; i < steps; ++i) {
    std::vector<Redex> admin;
    for (auto& rd : engine.redexes())
      if (rd.administrative) admin.push_back(rd);
    for (std::size_t a = 0; a + 1 < admin.size(); ++a) {
      Engine left = engine, right = engine;
      left.fire(admin[a]);
      right.fire(admin[a + 1]);
      ++r.checked;
      auto l = administrative_closure(left, 4000), rr = administrative_closure(right, 4000);
      bool meet = false;
      for (auto& s : l)
        if (rr.count(s)) {
          meet = true;
          break;
        }
      if (!meet) {
        r.fail(label + ": administrative steps diverge at step " + std::to_string(i));
        return r;
      }
    }
    if (!engine.step()) break;
  }
  return r;
}

}  // namespace properties

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mst/process.hpp"

namespace mst {

struct ReductionEvent {
  enum class Kind { Pass, Select };
  Kind kind = Kind::Pass;
  Name subject;  // the sending or selecting endpoint
  std::vector<ValuePtr> payload;
  std::string label;  // Select
  bool administrative = false;
};

std::string to_string(const ReductionEvent& e);

struct Trace {
  std::vector<ReductionEvent> events;
  ProcPtr final;
  bool exhausted_budget = false;
};

// A running term: restricted names with their (advancing) annotations and
// the parallel threads. Threads never are 0, a restriction or a parallel
// composition.
struct Thread {
  ProcPtr proc;
  long birth = 0;
};

struct Restricted {
  Name name;
  std::optional<VTypePtr> annot;
};

struct State {
  std::vector<Restricted> restricted;
  std::vector<Thread> threads;
};

struct Redex {
  std::size_t sender = 0, receiver = 0;  // thread positions
  int sender_sub = -1, receiver_sub = -1;  // position in a recursion unfolding
  ProcPtr out, in;                         // the participating prefixes
  bool administrative = false;
  long enabled = 0;  // later birth of the two threads
  int prop_index = 0;
};

class Engine {
 public:
  explicit Engine(const ProcPtr& p);

  // Enabled redexes, best first under the deterministic policy.
  std::vector<Redex> redexes() const;
  ReductionEvent fire(const Redex& r);
  std::optional<ReductionEvent> step();

  const State& state() const { return state_; }
  ProcPtr process() const;
  int steps() const { return steps_; }

 private:
  State state_;
  NameSet used_;
  int steps_ = 0;

  void add(State& st, const ProcPtr& p, long birth);
  std::vector<Thread> unfold(std::size_t i, std::vector<Restricted>& res) const;
  void advance_annotation(const Name& subject, const std::string& label);
};

// Restrictions floated outward, 0 dropped, parallel flattened and sorted by
// printed form, dead restrictions removed. Recursion is not unfolded.
ProcPtr scong_normalize(const ProcPtr& p);

// Canonical text of a term up to the names of its restrictions.
std::string canonical(const ProcPtr& p);

std::vector<ReductionEvent> reduce_step(const ProcPtr& p);

Trace run(const ProcPtr& p, int budget);
std::vector<ReductionEvent> observable_trace(const ProcPtr& p, int budget);

// Closed-system correspondence between a source and its decomposition.
enum class Verdict { Ok, Mismatch, Inconclusive };
struct Correspondence {
  Verdict verdict = Verdict::Mismatch;
  bool exact_order = false;  // traces match pointwise, not only per channel
  std::vector<ReductionEvent> source, target;
  std::string detail;
};

// Subject n of the source matches any indexed name of the same base; a name
// payload matches the run of target names with its base, other values match
// literally.
bool events_related(const ReductionEvent& src, const ReductionEvent& tgt);
Correspondence correspond(const ProcPtr& source, const ProcPtr& target, int budget);

// Evaluates neg/add/succ on literals.
ValuePtr evaluate(const ValuePtr& v);

}  // namespace mst

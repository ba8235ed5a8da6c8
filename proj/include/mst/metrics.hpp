#pragma once

#include <optional>
#include <string>

#include "mst/env.hpp"

namespace mst {

// Number of propagator indices the breakdown of p consumes.
int degree(const ProcPtr& p, Mode mode);

// Bound names whose restriction annotation is tail-recursive.
int tr_bound_names(const ProcPtr& p);
// Occurrences of process variables.
int recvar_occurrences(const ProcPtr& p);

// p is (new n..)(Q1 | .. | Qn) where no Qi is 0, a restriction or a
// parallel composition.
bool in_normal_form(const ProcPtr& p);

struct Ratio {
  long long num = 0, den = 1;
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

struct MetricsReport {
  int degree_opt = 0;
  std::optional<int> degree_composed;  // absent for labeled choice
  int numprop = 0;
  std::optional<int> numpropam;
  int tr_bound_names = 0;
  int rec_free = 0;
  int recvar_occurrences = 0;
  bool normal_form = false;
  std::optional<Ratio> ratio;  // numpropam / numprop, reduced
};

MetricsReport metrics(const ProcPtr& p, const Delta& delta);

// numpropam >= 5/3 numprop, compared exactly. Throws on processes that are
// not in normal form or that the composed decomposition does not cover.
bool check_ratio_bound(const ProcPtr& p, const Delta& delta);

}  // namespace mst

#pragma once

#include <string>
#include <vector>

#include "mst/env.hpp"

namespace mst {

struct CheckFailure {
  std::string location;  // printed subterm where the rule failed
  std::string rule;
  std::string message;
};

struct CheckReport {
  bool ok = false;
  Delta residual_delta;  // final types of the linear names at the leaves
  std::vector<CheckFailure> failures;
};

// Session typing for first-order processes. Delta is split at parallel
// composition by free-name ownership; recursion checks its body under the
// current delta as snapshot.
CheckReport typecheck(const TypeEnv& env, const ProcPtr& p);

}  // namespace mst

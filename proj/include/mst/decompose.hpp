#pragma once

#include <map>
#include <string>
#include <vector>

#include "mst/env.hpp"

namespace mst {

struct DecomposeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Typing of the propagators a breakdown introduced.
using PropTable = std::map<Name, VTypePtr>;

struct Breakdown {
  ProcPtr process;
  PropTable propagators;
};

struct Decomposition {
  ProcPtr process;
  TypeEnv env;  // decomposed environment for the free names
};

// Optimized breakdown of an initialized process. `src` types the indexed
// source names visible at this point; `ctx` is the received context.
Breakdown breakdown_opt(const ProcPtr& p, int k, const std::vector<Name>& ctx, const TypeEnv& src);

// Breakdown of a recursion body whose variable is mapped to `g` (empty g
// yields replicated trios on shared propagators).
Breakdown breakdown_rec(const ProcPtr& p, int k, const std::vector<Name>& ctx, const std::string& var,
                        const std::vector<Name>& g, const TypeEnv& src);

// Every z in x contributes exactly its block to y, and y holds nothing else.
bool indexed_pred(const std::vector<Name>& y, const std::vector<Name>& x, const TypeEnv& env);

// ----- composed decomposition

// A tail-recursive free name handed around through a provider channel.
struct TrRoot {
  Name root;                  // the source name with index 0
  Name provider;              // cr@base
  std::vector<Name> block;    // its indexed names
  std::vector<VTypePtr> parts;  // their minimal types
};

// An initialized source with unique binders, expanded delegations and
// block-wise restrictions, ready for the composed breakdown.
struct PreparedComposed {
  ProcPtr process;
  std::map<Name, VTypePtr> types;  // minimal types of every name in sight
  std::vector<TrRoot> roots;
};

PreparedComposed prepare_composed(const ProcPtr& p, const TypeEnv& env);

// Composed breakdown of a prepared process at propagator k.
Breakdown breakdown_composed(const PreparedComposed& prep, const ProcPtr& p, int k, const std::vector<Name>& ctx);

// The three stages the composed breakdown agrees with on the finite
// first-order fragment: first-order into higher-order, the higher-order
// breakdown, and higher-order back into first-order.
ProcPtr encode_pi_to_ho(const ProcPtr& p);
ProcPtr breakdown_ho(const ProcPtr& p, int k, const std::vector<Name>& ctx);
int ho_degree(const ProcPtr& p);
ProcPtr encode_ho_to_pi(const ProcPtr& p);

// Context of a composed trio: free variables plus the trigger variable of
// every free process variable.
std::vector<Name> composed_context(const ProcPtr& p);

// Both decompositions check the source first and throw DecomposeError on a
// type error or an unsupported construct.
Decomposition decompose(const ProcPtr& p, const TypeEnv& env, Mode mode);

}  // namespace mst

#pragma once

#include <map>
#include <string>
#include <vector>

#include "mst/process.hpp"
#include "mst/types.hpp"

namespace mst {

using Delta = std::map<Name, STypePtr>;
using Gamma = std::map<Name, VTypePtr>;

// Shared and base-typed names live in gamma, linear session endpoints in
// delta. The two domains are disjoint.
struct TypeEnv {
  Gamma gamma;
  Delta delta;
};

// Env files have `[gamma]` and `[delta]` sections of `name : type` lines.
// Blank lines and lines starting with `//` or `%` are ignored.
TypeEnv parse_env(const std::string& text);
std::string print_env(const TypeEnv& env);

// Marks free names that gamma types as shared so that the engine lets them
// synchronize without polarity.
ProcPtr apply_env_kinds(const ProcPtr& p, const TypeEnv& env);

// Indexes every name of the environment with 1.
TypeEnv init_env(const TypeEnv& env);

// Replaces each indexed entry u_i : S by its block u_i.. typed with the
// components of the type decomposition.
TypeEnv decompose_env(const TypeEnv& env, Mode mode);

bool env_balanced(const Delta& d);
// All environments reachable by firing one dual pair.
std::vector<Delta> env_reducts(const Delta& d);
// First reduct in name order, or d itself when nothing fires.
Delta env_reduce(const Delta& d);
bool env_confluent(const Delta& a, const Delta& b, std::size_t max_states = 4096);
bool delta_equal(const Delta& a, const Delta& b);

bool check_minimality(const TypeEnv& env);
// Every restriction annotation in p is minimal.
bool annotations_minimal(const ProcPtr& p);

// Names of p whose type in delta is tail-recursive (or an unfolding of one).
NameSet rec_free_names(const ProcPtr& p, const Delta& d);

}  // namespace mst

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mst/name.hpp"
#include "mst/types.hpp"

namespace mst {

struct Value;
struct Proc;
using ValuePtr = std::shared_ptr<const Value>;
using ProcPtr = std::shared_ptr<const Proc>;

struct Value {
  enum class Kind { Name, Int, Bool, Neg, Add, Succ, Abs };
  Kind kind = Kind::Int;
  Name name;                     // Name
  long long num = 0;             // Int, Bool (0/1)
  ValuePtr lhs, rhs;             // Neg/Succ use lhs; Add both
  std::vector<Name> binders;     // Abs
  ProcPtr body;                  // Abs
  bool linear = true;            // Abs
};

struct Proc {
  enum class Kind { Out, In, Sel, Bra, Res, Par, Nil, Rec, Var, App };
  Kind kind = Kind::Nil;
  Name subject;                         // Out, In, Sel, Bra; Res: bound name
  std::vector<ValuePtr> payload;        // Out; App arguments
  std::vector<Name> binders;            // In
  std::string label;                    // Sel; Rec and Var: process variable
  std::vector<std::pair<std::string, ProcPtr>> branches;  // Bra
  std::optional<VTypePtr> annot;        // Res
  ProcPtr cont;                         // Out, In, Sel, Res, Rec; Par left
  ProcPtr right;                        // Par
  ValuePtr fun;                         // App
};

struct SyntaxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Values
ValuePtr v_name(const Name& n);
ValuePtr v_num(long long i);
ValuePtr v_boolean(bool b);
ValuePtr v_neg(ValuePtr v);
ValuePtr v_succ(ValuePtr v);
ValuePtr v_add(ValuePtr a, ValuePtr b);
ValuePtr v_abs(std::vector<Name> binders, ProcPtr body, bool linear = true);

// Processes
ProcPtr p_nil();
ProcPtr p_out(const Name& subj, std::vector<ValuePtr> payload, ProcPtr cont);
ProcPtr p_out(const Name& subj, const std::vector<Name>& payload, ProcPtr cont);
ProcPtr p_in(const Name& subj, std::vector<Name> binders, ProcPtr cont);
ProcPtr p_sel(const Name& subj, const std::string& label, ProcPtr cont);
ProcPtr p_bra(const Name& subj, std::vector<std::pair<std::string, ProcPtr>> branches);
ProcPtr p_res(const Name& n, std::optional<VTypePtr> annot, ProcPtr body);
ProcPtr p_par(ProcPtr l, ProcPtr r);
ProcPtr p_par(const std::vector<ProcPtr>& ps);  // right-nested; empty gives 0
ProcPtr p_rec(const std::string& x, ProcPtr body);
ProcPtr p_var(const std::string& x);
ProcPtr p_app(ValuePtr fun, std::vector<ValuePtr> args);

// Names: ordered, duals distinct from their co-names.
using NameSet = std::set<Name>;

NameSet free_names(const ProcPtr& p);
NameSet free_names(const ValuePtr& v);
NameSet free_vars(const ProcPtr& p);  // free names annotated as variables
std::set<std::string> free_recvars(const ProcPtr& p);
bool has_free_recvar(const ProcPtr& p);
NameSet all_names(const ProcPtr& p);  // free and bound

// Substitution keyed on exact names (polarity included). bind_pair also maps
// the co-name to the co-name of the target.
class Subst {
 public:
  void bind(const Name& from, ValuePtr to);
  void bind(const Name& from, const Name& to);
  void bind_pair(const Name& from, const Name& to);
  const ValuePtr* find(const Name& n) const;
  bool empty() const { return map_.empty(); }
  const std::map<Name, ValuePtr>& entries() const { return map_; }

 private:
  std::map<Name, ValuePtr> map_;
};

ProcPtr substitute(const ProcPtr& p, const Subst& s);
ValuePtr substitute(const ValuePtr& v, const Subst& s);
ProcPtr substitute_recvar(const ProcPtr& p, const std::string& x, const ProcPtr& by);
ProcPtr rename_recvar(const ProcPtr& p, const std::string& from, const std::string& to);

bool alpha_equal(const ProcPtr& a, const ProcPtr& b);
bool alpha_equal(const ValuePtr& a, const ValuePtr& b);

// Drops every restriction annotation, for comparisons up to typing.
ProcPtr erase_annotations(const ProcPtr& p);

// Fresh-name supply shared by transformations of one run.
Name fresh_name(const Name& like);

// Indexed-name helpers.
Subst init_subst(const std::vector<Name>& names);
Subst next_subst(const Name& n, const VTypePtr& type);
bool is_initialized(const ProcPtr& p);
std::vector<Name> fnb(const NameSet& fn, const std::vector<Name>& ctx);
std::vector<Name> fnb(const ProcPtr& p, const std::vector<Name>& ctx);
std::vector<Name> bname(const Name& n, const VTypePtr& type, Mode mode = Mode::Opt);
std::vector<Name> bname(const Name& n, const STypePtr& type, Mode mode = Mode::Opt);

// Guardedness of recursion bodies.
bool recursion_guarded(const ProcPtr& p);

}  // namespace mst

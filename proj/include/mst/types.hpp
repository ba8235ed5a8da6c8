#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mst {

struct SType;
struct VType;
using STypePtr = std::shared_ptr<const SType>;
using VTypePtr = std::shared_ptr<const VType>;

struct SType {
  enum class Kind { Out, In, Select, Branch, Rec, Var, End };
  Kind kind = Kind::End;
  std::vector<VTypePtr> payload;  // Out / In
  STypePtr cont;                  // Out / In, body of Rec
  std::vector<std::pair<std::string, STypePtr>> branches;  // Select / Branch
  std::string var;                // Rec / Var
};

struct VType {
  enum class Kind { Session, Shared, Int, Bool, Arrow };
  Kind kind = Kind::Int;
  STypePtr session;            // Session
  std::vector<VTypePtr> items;  // Shared payload tuple, Arrow arguments
  bool linear = false;         // Arrow
};

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constructors
STypePtr s_end();
STypePtr s_var(const std::string& t);
STypePtr s_rec(const std::string& t, STypePtr body);
STypePtr s_out(std::vector<VTypePtr> payload, STypePtr cont);
STypePtr s_in(std::vector<VTypePtr> payload, STypePtr cont);
STypePtr s_select(std::vector<std::pair<std::string, STypePtr>> branches);
STypePtr s_branch(std::vector<std::pair<std::string, STypePtr>> branches);
VTypePtr v_session(STypePtr s);
VTypePtr v_shared(std::vector<VTypePtr> items);
VTypePtr v_int();
VTypePtr v_bool();
VTypePtr v_arrow(std::vector<VTypePtr> args, bool linear);

// Equality up to renaming of bound type variables.
bool type_equal(const STypePtr& a, const STypePtr& b);
bool type_equal(const VTypePtr& a, const VTypePtr& b);
bool type_equal(const std::vector<VTypePtr>& a, const std::vector<VTypePtr>& b);

std::string to_string(const STypePtr& s);
std::string to_string(const VTypePtr& v);
std::string to_string(const std::vector<VTypePtr>& vs);

STypePtr dual(const STypePtr& s);
STypePtr subst_tvar(const STypePtr& s, const std::string& t, const STypePtr& by);
VTypePtr subst_tvar(const VTypePtr& v, const std::string& t, const STypePtr& by);
STypePtr unfold(const STypePtr& s);
bool is_closed(const STypePtr& s);
bool is_guarded(const STypePtr& s);

bool is_end(const STypePtr& s);
bool is_prefix(const STypePtr& s);  // ! or ?
bool is_tail_recursive(const STypePtr& s);
bool is_tail_recursive(const VTypePtr& v);
// A prefix chain (possibly empty) ending in a tail-recursive μ.
bool is_tr_unfolding(const STypePtr& s);
// Session type that is neither end nor a tail-recursive unfolding.
bool is_linear(const VTypePtr& v);

bool is_minimal(const STypePtr& s);
bool is_minimal(const VTypePtr& v);

// Optimized decomposition: G, R and R*.
std::vector<VTypePtr> decompose_opt(const VTypePtr& c);
std::vector<STypePtr> decompose_opt(const STypePtr& s);
std::vector<STypePtr> decompose_rec_body(const STypePtr& body, const std::string& t);  // R
std::vector<STypePtr> decompose_partial(const STypePtr& s);                              // R*

// Composed decomposition.
std::vector<VTypePtr> decompose_composed(const VTypePtr& c);
std::vector<STypePtr> decompose_composed(const STypePtr& s);
// The trigger type ⟨?(?(⟨?(M̃)end⟩)end)end⟩ wrapping a payload tuple.
VTypePtr trigger_type(const std::vector<VTypePtr>& payload);

enum class Mode { Opt, Composed };

// Number of channels a name of this type breaks into.
std::size_t block_size(const VTypePtr& c, Mode mode = Mode::Opt);
std::size_t block_size(const STypePtr& s, Mode mode = Mode::Opt);

// Position of the channel that mimics the next action of an unfolded
// tail-recursive type.
int index_fn(const STypePtr& s, Mode mode = Mode::Opt);

// Prefix count on the spine of a finite session type.
std::size_t spine_length(const STypePtr& s);

}  // namespace mst

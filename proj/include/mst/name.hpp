#pragma once

#include <compare>
#include <string>
#include <tuple>

namespace mst {

enum class NameKind { Shared, Session, Variable, PropLin, PropRec, PropRecVar };

// A channel name or variable. Kind is partly an annotation: shared, session
// and variable names share one identity class; propagators have their own.
struct Name {
  std::string base;
  NameKind kind = NameKind::Session;
  bool dual = false;
  int index = 0;  // 0 means unindexed
  bool generated = false;
  int serial = 0;  // disambiguates fresh and extruded names

  bool is_propagator() const {
    return kind == NameKind::PropLin || kind == NameKind::PropRec || kind == NameKind::PropRecVar;
  }
  bool indexed() const { return index > 0; }

  int kind_class() const {
    switch (kind) {
      case NameKind::PropLin: return 1;
      case NameKind::PropRec: return 2;
      case NameKind::PropRecVar: return 3;
      default: return 0;
    }
  }

  auto key() const { return std::tie(base, index, dual, generated, serial); }

  friend bool operator==(const Name& a, const Name& b) {
    return a.kind_class() == b.kind_class() && a.key() == b.key();
  }
  friend bool operator<(const Name& a, const Name& b) {
    if (a.kind_class() != b.kind_class()) return a.kind_class() < b.kind_class();
    return a.key() < b.key();
  }

  Name co() const {
    Name n = *this;
    n.dual = !n.dual;
    return n;
  }
  Name plain() const {
    Name n = *this;
    n.dual = false;
    return n;
  }
  Name with_index(int i) const {
    Name n = *this;
    n.index = i;
    return n;
  }
  // Same channel family ignoring the index: what fnb matches on.
  bool same_root(const Name& o) const {
    return kind_class() == o.kind_class() && base == o.base && dual == o.dual &&
           generated == o.generated && serial == o.serial;
  }

  std::string str() const;
};

Name user_name(const std::string& base, NameKind kind = NameKind::Session);
Name var_name(const std::string& base, int index = 0);
Name prop_lin(int k);
Name prop_rec(int k);
Name prop_rec_provider(const std::string& source_base);
Name prop_rec_var(const std::string& x);
Name generated_name(const std::string& base, int serial = 0);

// Two names synchronize when they are co-names, or identical on a channel
// that is used from both sides without polarity.
bool communicates(const Name& a, const Name& b);

}  // namespace mst

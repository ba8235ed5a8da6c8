#include "mst/name.hpp"

namespace mst {

std::string Name::str() const {
  std::string s = dual ? "~" : "";
  switch (kind) {
    case NameKind::PropLin:
      s += "c@" + std::to_string(index);
      break;
    case NameKind::PropRec:
      s += index > 0 ? "cr@" + std::to_string(index) : "cr@" + base;
      break;
    case NameKind::PropRecVar:
      s += "crX@" + base;
      break;
    default:
      if (generated) s += "_";
      s += base;
      if (index > 0) s += "@" + std::to_string(index);
      break;
  }
  if (serial > 0) s += "#" + std::to_string(serial);
  return s;
}

Name user_name(const std::string& base, NameKind kind) {
  Name n;
  n.base = base;
  n.kind = kind;
  return n;
}

Name var_name(const std::string& base, int index) {
  Name n;
  n.base = base;
  n.kind = NameKind::Variable;
  n.index = index;
  return n;
}

Name prop_lin(int k) {
  Name n;
  n.kind = NameKind::PropLin;
  n.index = k;
  n.generated = true;
  return n;
}

Name prop_rec(int k) {
  Name n;
  n.kind = NameKind::PropRec;
  n.index = k;
  n.generated = true;
  return n;
}

Name prop_rec_provider(const std::string& source_base) {
  Name n;
  n.kind = NameKind::PropRec;
  n.base = source_base;
  n.generated = true;
  return n;
}

Name prop_rec_var(const std::string& x) {
  Name n;
  n.kind = NameKind::PropRecVar;
  n.base = x;
  n.generated = true;
  return n;
}

Name generated_name(const std::string& base, int serial) {
  Name n;
  n.base = base;
  n.generated = true;
  n.serial = serial;
  return n;
}

bool communicates(const Name& a, const Name& b) {
  if (a.kind_class() != b.kind_class() || a.key() != b.co().key()) {
    if (!(a == b) || a.dual) return false;
    return a.kind == NameKind::Shared || a.kind == NameKind::PropRec || a.kind == NameKind::PropRecVar ||
           b.kind == NameKind::Shared;
  }
  return true;
}

}  // namespace mst

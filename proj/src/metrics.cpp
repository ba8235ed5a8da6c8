#include "mst/metrics.hpp"

#include <numeric>

namespace mst {

int degree(const ProcPtr& p, Mode mode) {
  const bool opt = mode == Mode::Opt;
  switch (p->kind) {
    case Proc::Kind::Nil: return 1;
    case Proc::Kind::Var: return opt ? 1 : 4;
    case Proc::Kind::Out: return (opt ? 1 : 3) + degree(p->cont, mode);
    case Proc::Kind::In: return (opt ? 1 : 5) + degree(p->cont, mode);
    case Proc::Kind::Sel:
      if (!opt) throw TypeError("unsupported: labeled choice in the composed decomposition");
      return 1 + degree(p->cont, mode);
    case Proc::Kind::Bra:
      if (!opt) throw TypeError("unsupported: labeled choice in the composed decomposition");
      return 1;
    case Proc::Kind::Res: {
      int extra = opt && p->annot && is_tail_recursive(*p->annot) ? 1 : 0;
      return extra + degree(p->cont, mode);
    }
    case Proc::Kind::Par: return degree(p->cont, mode) + degree(p->right, mode) + 1;
    case Proc::Kind::Rec: return (opt ? 1 : 4) + degree(p->cont, mode);
    case Proc::Kind::App: throw TypeError("degree is defined on first-order processes");
  }
  return 0;
}

int tr_bound_names(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Res:
      return (p->annot && is_tail_recursive(*p->annot) ? 1 : 0) + tr_bound_names(p->cont);
    case Proc::Kind::Par: return tr_bound_names(p->cont) + tr_bound_names(p->right);
    case Proc::Kind::Bra: {
      int n = 0;
      for (auto& [l, b] : p->branches) n += tr_bound_names(b);
      return n;
    }
    case Proc::Kind::Out:
    case Proc::Kind::In:
    case Proc::Kind::Sel:
    case Proc::Kind::Rec: return tr_bound_names(p->cont);
    default: return 0;
  }
}

int recvar_occurrences(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Var: return 1;
    case Proc::Kind::Par: return recvar_occurrences(p->cont) + recvar_occurrences(p->right);
    case Proc::Kind::Bra: {
      int n = 0;
      for (auto& [l, b] : p->branches) n += recvar_occurrences(b);
      return n;
    }
    case Proc::Kind::Out:
    case Proc::Kind::In:
    case Proc::Kind::Sel:
    case Proc::Kind::Res:
    case Proc::Kind::Rec: return recvar_occurrences(p->cont);
    default: return 0;
  }
}

namespace {

bool components_ok(const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Par: return components_ok(p->cont) && components_ok(p->right);
    case Proc::Kind::Nil:
    case Proc::Kind::Res: return false;
    default: return true;
  }
}

}  // namespace

bool in_normal_form(const ProcPtr& p) {
  ProcPtr q = p;
  while (q->kind == Proc::Kind::Res) q = q->cont;
  return q->kind == Proc::Kind::Nil || components_ok(q);
}

MetricsReport metrics(const ProcPtr& p, const Delta& delta) {
  MetricsReport m;
  m.degree_opt = degree(p, Mode::Opt);
  m.tr_bound_names = tr_bound_names(p);
  m.rec_free = static_cast<int>(rec_free_names(p, delta).size());
  m.recvar_occurrences = recvar_occurrences(p);
  m.normal_form = in_normal_form(p);
  m.numprop = m.degree_opt + m.recvar_occurrences;
  try {
    m.degree_composed = degree(p, Mode::Composed);
    m.numpropam = *m.degree_composed + 2 * m.tr_bound_names + m.rec_free;
    long long g = std::gcd(static_cast<long long>(*m.numpropam), static_cast<long long>(m.numprop));
    m.ratio = Ratio{*m.numpropam / g, m.numprop / g};
  } catch (const TypeError&) {
  }
  return m;
}

bool check_ratio_bound(const ProcPtr& p, const Delta& delta) {
  if (!in_normal_form(p)) throw TypeError("check_ratio_bound: process is not in normal form");
  auto m = metrics(p, delta);
  if (!m.numpropam) throw TypeError("check_ratio_bound: composed decomposition undefined for labeled choice");
  // numpropam / numprop >= 5/3  <=>  3 numpropam >= 5 numprop
  return 3LL * *m.numpropam >= 5LL * m.numprop;
}

}  // namespace mst

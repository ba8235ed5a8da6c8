#include "mst/json_export.hpp"

#include "mst/syntax.hpp"

namespace mst {

namespace {

const char* kind_name(NameKind k) {
  switch (k) {
    case NameKind::Shared: return "shared";
    case NameKind::Session: return "session";
    case NameKind::Variable: return "variable";
    case NameKind::PropLin: return "propagator";
    case NameKind::PropRec: return "rec_propagator";
    case NameKind::PropRecVar: return "recvar_propagator";
  }
  return "session";
}

template <class T>
Json array_of(const std::vector<T>& xs) {
  Json a = Json::array();
  for (auto& x : xs) a.push_back(to_json(x));
  return a;
}

}  // namespace

Json to_json(const Name& n) {
  Json j;
  j["node"] = "name";
  j["text"] = n.str();
  j["base"] = n.base;
  j["kind"] = kind_name(n.kind);
  j["dual"] = n.dual;
  if (n.index > 0) j["index"] = n.index;
  if (n.generated) j["generated"] = true;
  if (n.serial > 0) j["serial"] = n.serial;
  return j;
}

Json to_json(const ValuePtr& v) {
  Json j;
  switch (v->kind) {
    case Value::Kind::Name: return to_json(v->name);
    case Value::Kind::Int:
      j["node"] = "int";
      j["value"] = v->num;
      return j;
    case Value::Kind::Bool:
      j["node"] = "bool";
      j["value"] = v->num != 0;
      return j;
    case Value::Kind::Neg:
      j["node"] = "neg";
      j["arg"] = to_json(v->lhs);
      return j;
    case Value::Kind::Succ:
      j["node"] = "succ";
      j["arg"] = to_json(v->lhs);
      return j;
    case Value::Kind::Add:
      j["node"] = "add";
      j["lhs"] = to_json(v->lhs);
      j["rhs"] = to_json(v->rhs);
      return j;
    case Value::Kind::Abs:
      j["node"] = "abs";
      j["binders"] = array_of(v->binders);
      j["linear"] = v->linear;
      j["body"] = to_json(v->body);
      return j;
  }
  return j;
}

Json to_json(const ProcPtr& p) {
  Json j;
  switch (p->kind) {
    case Proc::Kind::Nil: j["node"] = "nil"; break;
    case Proc::Kind::Out:
      j["node"] = "out";
      j["subject"] = to_json(p->subject);
      j["payload"] = array_of(p->payload);
      j["cont"] = to_json(p->cont);
      break;
    case Proc::Kind::In:
      j["node"] = "in";
      j["subject"] = to_json(p->subject);
      j["binders"] = array_of(p->binders);
      j["cont"] = to_json(p->cont);
      break;
    case Proc::Kind::Sel:
      j["node"] = "select";
      j["subject"] = to_json(p->subject);
      j["label"] = p->label;
      j["cont"] = to_json(p->cont);
      break;
    case Proc::Kind::Bra: {
      j["node"] = "branch";
      j["subject"] = to_json(p->subject);
      Json bs = Json::array();
      for (auto& [l, b] : p->branches) bs.push_back(Json{{"label", l}, {"body", to_json(b)}});
      j["branches"] = bs;
      break;
    }
    case Proc::Kind::Res:
      j["node"] = "new";
      j["name"] = to_json(p->subject);
      if (p->annot) j["type"] = to_json(*p->annot);
      j["body"] = to_json(p->cont);
      break;
    case Proc::Kind::Par:
      j["node"] = "par";
      j["left"] = to_json(p->cont);
      j["right"] = to_json(p->right);
      break;
    case Proc::Kind::Rec:
      j["node"] = "rec";
      j["var"] = p->label;
      j["body"] = to_json(p->cont);
      break;
    case Proc::Kind::Var:
      j["node"] = "var";
      j["var"] = p->label;
      break;
    case Proc::Kind::App:
      j["node"] = "app";
      j["fun"] = to_json(p->fun);
      j["args"] = array_of(p->payload);
      break;
  }
  return j;
}

Json to_json(const STypePtr& s) {
  Json j;
  auto branches = [&](const char* node) {
    j["node"] = node;
    Json bs = Json::array();
    for (auto& [l, b] : s->branches) bs.push_back(Json{{"label", l}, {"type", to_json(b)}});
    j["branches"] = bs;
  };
  switch (s->kind) {
    case SType::Kind::End: j["node"] = "end"; break;
    case SType::Kind::Var:
      j["node"] = "tvar";
      j["var"] = s->var;
      break;
    case SType::Kind::Rec:
      j["node"] = "mu";
      j["var"] = s->var;
      j["body"] = to_json(s->cont);
      break;
    case SType::Kind::Out:
    case SType::Kind::In:
      j["node"] = s->kind == SType::Kind::Out ? "send" : "recv";
      j["payload"] = array_of(s->payload);
      j["cont"] = to_json(s->cont);
      break;
    case SType::Kind::Select: branches("select"); break;
    case SType::Kind::Branch: branches("branch"); break;
  }
  j["text"] = to_string(s);
  return j;
}

Json to_json(const VTypePtr& v) {
  Json j;
  switch (v->kind) {
    case VType::Kind::Int: j["node"] = "int"; break;
    case VType::Kind::Bool: j["node"] = "bool"; break;
    case VType::Kind::Session:
      return to_json(v->session);
    case VType::Kind::Shared:
      j["node"] = "shared";
      j["items"] = array_of(v->items);
      break;
    case VType::Kind::Arrow:
      j["node"] = "arrow";
      j["args"] = array_of(v->items);
      j["linear"] = v->linear;
      break;
  }
  j["text"] = to_string(v);
  return j;
}

Json to_json(const TypeEnv& env) {
  Json g = Json::object(), d = Json::object();
  for (auto& [n, t] : env.gamma) g[n.str()] = to_string(t);
  for (auto& [n, s] : env.delta) d[n.str()] = to_string(s);
  return Json{{"gamma", g}, {"delta", d}};
}

Json to_json(const ReductionEvent& e) {
  Json j;
  j["kind"] = e.kind == ReductionEvent::Kind::Pass ? "pass" : "select";
  j["subject"] = e.subject.str();
  if (e.kind == ReductionEvent::Kind::Select) {
    j["label"] = e.label;
    j["payload"] = Json::array();
  } else {
    Json pay = Json::array();
    for (auto& v : e.payload) pay.push_back(print_value(v));
    j["payload"] = pay;
  }
  j["administrative"] = e.administrative;
  return j;
}

Json to_json(const CheckReport& r) {
  Json j;
  j["ok"] = r.ok;
  Json fs = Json::array();
  for (auto& f : r.failures) fs.push_back(Json{{"rule", f.rule}, {"location", f.location}, {"message", f.message}});
  j["failures"] = fs;
  Json res = Json::object();
  for (auto& [n, s] : r.residual_delta) res[n.str()] = to_string(s);
  j["residual_delta"] = res;
  return j;
}

Json to_json(const MetricsReport& m) {
  Json j;
  j["degree_opt"] = m.degree_opt;
  j["degree_composed"] = m.degree_composed ? Json(*m.degree_composed) : Json(nullptr);
  j["numprop"] = m.numprop;
  j["numpropam"] = m.numpropam ? Json(*m.numpropam) : Json(nullptr);
  j["tr_bound_names"] = m.tr_bound_names;
  j["rec_free"] = m.rec_free;
  j["recvar_occurrences"] = m.recvar_occurrences;
  j["normal_form"] = m.normal_form;
  j["ratio"] = m.ratio ? Json(m.ratio->str()) : Json(nullptr);
  return j;
}

Json document(const std::string& schema, Json body) {
  Json j;
  j["schema"] = schema;
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

}  // namespace mst

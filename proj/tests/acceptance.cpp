// Acceptance runner: `acceptance N` checks criterion N and prints one line.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"
#include "mst/metrics.hpp"
#include "mst/typecheck.hpp"
#include "properties.hpp"

using namespace mst;
using namespace fixtures;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

// Wall-clock limits per criterion, in seconds.
constexpr double kTypeGoldenLimit = 1.0;
constexpr double kDegreeLimit = 1.0;
constexpr double kMinimalityLimit = 30.0;
constexpr double kCorrespondenceLimit = 10.0;
constexpr double kBoundLimit = 30.0;
constexpr double kPropertyLimit = 60.0;
constexpr double kRecursionLimit = 5.0;

constexpr int kCorrespondenceBudget = 500;
constexpr int kMinimalCorpus = 20;
constexpr int kRandomTypes = 1000;
constexpr int kRandomRecursiveTypes = 200;
constexpr int kSubjectReductionSteps = 60;

std::string join(const std::vector<std::optional<int>>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << (xs[i] ? std::to_string(*xs[i]) : "-");
  return os.str();
}

std::string printed(const std::vector<STypePtr>& ts) {
  std::string s = "(";
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + to_string(ts[i]);
  return s + ")";
}

std::string printed_expected(const std::vector<std::string>& texts) {
  std::vector<STypePtr> ts;
  for (auto& t : texts) ts.push_back(parse_session_type(t));
  return printed(ts);
}

Result type_goldens() {
  Result r;
  auto check = [&](const std::string& what, const std::vector<STypePtr>& got, const std::vector<std::string>& want) {
    if (printed(got) != printed_expected(want)) {
      r.ok = false;
      r.detail += what + " = " + printed(got) + "; ";
    }
  };
  check("G(mu t.?Int.?Bool.!Bool.t)", decompose_opt(parse_session_type("mu t.?(Int).?(Bool).!(Bool).t")),
        {"mu t.?(Int).t", "mu t.?(Bool).t", "mu t.!(Bool).t"});
  check("G(server)", decompose_opt(parse_session_type(kMathServerType)),
        {"&{add: ?(?(Int).end, ?(Int).end, !(Int).end).end, neg: ?(?(Int).end, !(Int).end).end}"});
  check("mGt(?Int.!Bool.end)", decompose_composed(parse_session_type("?(Int).!(Bool).end")),
        {"?(<?(?(<?(Int).end>).end).end>).end", "!(<?(?(<?(Bool).end>).end).end>).end"});
  if (r.ok) r.detail = "three type decompositions match";
  return r;
}

Result degree_goldens() {
  auto s = source(kDelegation, kDelegationEnv);
  int composed = degree(s.process, Mode::Composed), opt = degree(s.process, Mode::Opt);
  Result r;
  r.ok = composed == 25 && opt == 9;
  r.detail = "composed " + std::to_string(composed) + " (want 25), opt " + std::to_string(opt) + " (want 9)";
  return r;
}

Result minimality() {
  auto entries = corpus();
  auto out = properties::decompositions_minimal(entries);
  Result r;
  r.ok = out.ok && static_cast<int>(entries.size()) >= kMinimalCorpus;
  r.detail = std::to_string(entries.size()) + " entries, " + std::to_string(out.checked) + " decompositions";
  if (!out.ok) r.detail += "; " + out.detail;
  return r;
}

Result correspondence() {
  Result r;
  auto server = source(kMathServer);
  auto d = decompose(server.process, server.env, Mode::Opt);
  auto cd = correspond(server.process, d.process, kCorrespondenceBudget);
  auto dm = math_server_milestones(steps_of(d.process, kCorrespondenceBudget));
  const std::vector<std::optional<int>> want_d{4, 5, 7, 8, 13};

  auto del = source(kDelegation, kDelegationEnv);
  auto f = decompose(del.process, del.env, Mode::Composed);
  auto cf = correspond(del.process, f.process, kCorrespondenceBudget);
  auto fm = delegation_milestones(steps_of(f.process, kCorrespondenceBudget));
  const std::vector<std::optional<int>> want_f{3, 7, 8, 10, 13, 14, 15};

  r.ok = cd.verdict == Verdict::Ok && cf.verdict == Verdict::Ok && dm == want_d && fm == want_f;
  r.detail = "D: " + verdict_name(cd.verdict) + " milestones " + join(dm) + " (want " + join(want_d) + "); F: " +
             verdict_name(cf.verdict) + " milestones " + join(fm) + " (want " + join(want_f) + ")";
  return r;
}

Result ratio_bound() {
  Result r;
  auto base = source("u!(x).0", "[gamma]\nx : Int\n[delta]\nu : !(Int).end\n");
  auto m = metrics(base.process, base.env.delta);
  bool base_ok = m.numpropam == 4 && m.numprop == 2 && check_ratio_bound(base.process, base.env.delta);
  int checked = 0, failed = 0;
  std::string first;
  for (auto& e : corpus()) {
    if (has_choice(e.process) || !in_normal_form(e.process)) continue;
    ++checked;
    if (!check_ratio_bound(e.process, e.env.delta)) {
      ++failed;
      if (first.empty()) first = e.name;
    }
  }
  r.ok = base_ok && failed == 0;
  r.detail = "u!(x).0 gives (" + std::to_string(m.numpropam.value_or(-1)) + ", " + std::to_string(m.numprop) +
             "); " + std::to_string(checked - failed) + "/" + std::to_string(checked) + " normal forms";
  if (!first.empty()) r.detail += "; first failure " + first;
  return r;
}

Result property_suites() {
  auto entries = corpus();
  std::vector<std::pair<std::string, properties::Outcome>> parts{
      {"duality", properties::duality_involution(kRandomTypes, 1)},
      {"G-duality", properties::decomposition_commutes_with_duality(kRandomTypes, 2)},
      {"minimal types", properties::decomposed_types_minimal(kRandomTypes, 3)},
      {"minimal outputs", properties::decompositions_minimal(entries)},
      {"subject reduction", properties::subject_reduction_corpus(entries, kSubjectReductionSteps)},
      {"composition oracle", properties::composition_oracle(entries)},
      {"index agreement", properties::index_agreement(kRandomRecursiveTypes, 4)},
  };
  Result r;
  for (auto& [name, out] : parts) {
    r.detail += name + " " + std::to_string(out.checked) + (out.ok ? " ok" : " FAILED") + "; ";
    if (!out.ok) {
      r.ok = false;
      r.detail += "(" + out.detail + ") ";
    }
  }
  return r;
}

Result recursion_golden() {
  Result r;
  auto s = source(kNegateLoop, kNegateLoopEnv);
  auto d = decompose(s.process, s.env, Mode::Opt);
  ParseOptions gen{true};
  ProcPtr want = parse_process(
      "(new c@1)(new cr@2)(new cr@3)(new cr@4)(~c@1!(r@1, r@2).0 | (new crX@X)("
      "c@1?(y@1, y@2).~cr@2!(y@1, y@2).rec X.crX@X?(y@1, y@2).~cr@2!(y@1, y@2).X"
      " | rec X.cr@2?(y@1, y@2).y@1?(z@1).~cr@3!(y@1, y@2, z@1).X"
      " | rec X.cr@3?(y@1, y@2, z@1).y@2!(-z@1).~cr@4!(y@1, y@2).X"
      " | rec X.cr@4?(y@1, y@2).crX@X!(y@1, y@2).X))",
      gen);
  bool structure = alpha_equal(erase_annotations(d.process), erase_annotations(want));

  // Drive the loop three times from a partner on the other endpoints.
  ProcPtr partner = parse_process("~r@1!(1).~r@2?(a).~r@1!(a+10).~r@2?(b).~r@1!(b+100).~r@2?(c).0", gen);
  ProcPtr closed = p_par(d.process, partner);
  auto obs = observable_trace(closed, 200);
  bool alternating = obs.size() == 6;
  long long last_in = 0;
  for (std::size_t i = 0; alternating && i < obs.size(); ++i) {
    const auto& e = obs[i];
    bool input_side = i % 2 == 0;
    ValuePtr v = e.payload.size() == 1 ? evaluate(e.payload[0]) : nullptr;
    alternating = e.subject.base == "r" && e.subject.index == (input_side ? 1 : 2) && v &&
                  v->kind == Value::Kind::Int;
    if (!alternating) break;
    if (input_side)
      last_in = v->num;
    else
      alternating = v->num == -last_in;
  }
  r.ok = structure && alternating;
  r.detail = std::string("trios ") + (structure ? "match" : "differ") + ", run " +
             (alternating ? "alternates r@1 input / r@2 output with z, -z" : "does not alternate") + " over " +
             std::to_string(obs.size() / 2) + " iterations";
  return r;
}

struct Criterion {
  const char* title;
  double limit;
  std::function<Result()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"type-decomposition goldens", kTypeGoldenLimit, type_goldens},
      {"degree goldens", kDegreeLimit, degree_goldens},
      {"minimality of both decompositions on the corpus", kMinimalityLimit, minimality},
      {"operational correspondence with milestone step counts", kCorrespondenceLimit, correspondence},
      {"5/3 propagator bound", kBoundLimit, ratio_bound},
      {"property suites", kPropertyLimit, property_suites},
      {"recursion golden", kRecursionLimit, recursion_golden},
  };
  std::vector<int> which;
  if (argc > 1)
    which.push_back(std::stoi(argv[1]));
  else
    for (std::size_t i = 1; i <= criteria.size(); ++i) which.push_back(static_cast<int>(i));

  bool all = true;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "no criterion " << n << "\n";
      return 2;
    }
    const auto& c = criteria[n - 1];
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.limit;
    bool pass = r.ok && in_time;
    all = all && pass;
    std::cout << "criterion " << n << " [" << (pass ? "PASS" : "FAIL") << "] " << c.title << ": " << r.detail
              << " (" << std::fixed << std::setprecision(2) << secs << " s, limit " << c.limit << " s)\n";
  }
  return all ? 0 : 1;
}

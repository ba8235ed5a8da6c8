#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "mst/corpus.hpp"
#include "mst/decompose.hpp"
#include "mst/json_export.hpp"
#include "mst/metrics.hpp"
#include "mst/semantics.hpp"
#include "mst/syntax.hpp"
#include "mst/typecheck.hpp"

using namespace mst;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kInconclusive = 3;

struct Options {
  bool json = false;
  bool generated = false;
  std::string file;
  std::string env_file;
  std::string mode = "opt";
  std::string output;
  std::string trace = "text";
  std::string corpus_dir = "corpus";
  bool show_env = false;
  bool all = false;
  int steps = 100;
  int budget = 500;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Input {
  ProcPtr process;
  TypeEnv env;
};

Input load(const Options& o) {
  Input in;
  std::string env_path = o.env_file;
  if (env_path.empty()) {
    fs::path guess = fs::path(o.file).replace_extension(".env");
    if (fs::exists(guess)) env_path = guess.string();
  }
  if (!env_path.empty()) in.env = parse_env(slurp(env_path));
  ParseOptions po;
  po.generated = o.generated;
  in.process = apply_env_kinds(parse_process(slurp(o.file), po), in.env);
  return in;
}

Mode mode_of(const Options& o) { return o.mode == "compose" ? Mode::Composed : Mode::Opt; }

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_parse(const Options& o) {
  auto in = load(o);
  if (o.json)
    emit(document("mst.process/1", Json{{"process", to_json(in.process)}}));
  else
    std::cout << print_process(in.process) << "\n";
  return kOk;
}

int cmd_check(const Options& o) {
  auto in = load(o);
  auto rep = typecheck(in.env, in.process);
  if (o.json) {
    emit(document("mst.check/1", to_json(rep)));
  } else if (rep.ok) {
    std::cout << "ok\n";
  } else {
    for (auto& f : rep.failures) std::cout << f.rule << ": " << f.message << "\n  at " << f.location << "\n";
  }
  return rep.ok ? kOk : kFailed;
}

int cmd_decompose(const Options& o) {
  auto in = load(o);
  auto d = decompose(in.process, in.env, mode_of(o));
  if (!o.output.empty()) {
    std::ofstream(o.output + ".pi") << print_process(d.process) << "\n";
    std::ofstream(o.output + ".env") << print_env(d.env);
  }
  if (o.json) {
    Json body{{"mode", o.mode}, {"degree", degree(in.process, mode_of(o))},
              {"text", print_process(d.process)}, {"process", to_json(d.process)}};
    if (o.show_env) body["env"] = to_json(d.env);
    emit(document("mst.decomposition/1", body));
    return kOk;
  }
  std::cout << print_process(d.process) << "\n";
  if (o.show_env) std::cout << "\n" << print_env(d.env);
  return kOk;
}

int cmd_run(const Options& o) {
  auto in = load(o);
  auto tr = run(in.process, o.steps);
  std::vector<ReductionEvent> shown;
  for (auto& e : tr.events)
    if (o.all || !e.administrative) shown.push_back(e);
  if (o.trace == "json" || o.json) {
    Json events = Json::array();
    for (auto& e : shown) events.push_back(to_json(e));
    if (o.json)
      emit(document("mst.trace/1", Json{{"steps", tr.events.size()},
                                         {"exhausted_budget", tr.exhausted_budget},
                                         {"events", events},
                                         {"final", print_process(tr.final)}}));
    else
      emit(events);
    return kOk;
  }
  for (auto& e : shown) std::cout << (e.administrative ? "  " : "") << to_string(e) << "\n";
  std::cout << "-- " << tr.events.size() << " steps" << (tr.exhausted_budget ? " (budget exhausted)" : "") << "\n"
            << print_process(tr.final) << "\n";
  return kOk;
}

int cmd_correspond(const Options& o) {
  auto in = load(o);
  auto d = decompose(in.process, in.env, mode_of(o));
  auto c = correspond(in.process, d.process, o.budget);
  if (o.json) {
    Json src = Json::array(), tgt = Json::array();
    for (auto& e : c.source) src.push_back(to_json(e));
    for (auto& e : c.target) tgt.push_back(to_json(e));
    emit(document("mst.correspondence/1", Json{{"verdict", verdict_name(c.verdict)},
                                                {"exact_order", c.exact_order},
                                                {"detail", c.detail},
                                                {"source", src},
                                                {"target", tgt}}));
  } else {
    std::cout << verdict_name(c.verdict);
    if (!c.detail.empty()) std::cout << ": " << c.detail;
    std::cout << "\n";
  }
  switch (c.verdict) {
    case Verdict::Ok: return kOk;
    case Verdict::Inconclusive: return kInconclusive;
    case Verdict::Mismatch: return kFailed;
  }
  return kFailed;
}

int cmd_metrics(const Options& o) {
  auto in = load(o);
  emit(document("mst.metrics/1", to_json(metrics(in.process, in.env.delta))));
  return kOk;
}

std::string cell(const DecompositionCheck& d) {
  if (!d.supported) return "n/a";
  std::string s = d.typed ? "typed" : "UNTYPED";
  s += d.minimal ? ",min" : ",NONMIN";
  s += "," + verdict_name(d.verdict);
  return s;
}

int cmd_corpus(const Options& o) {
  auto entries = load_corpus(o.corpus_dir);
  std::vector<EntryResult> results;
  for (auto& e : entries) results.push_back(check_entry(e, o.budget));
  int failed = 0;
  for (auto& r : results) failed += !r.passed();

  if (o.json) {
    Json rows = Json::array();
    auto dj = [](const DecompositionCheck& d) {
      if (!d.supported) return Json{{"supported", false}, {"error", d.error}};
      return Json{{"supported", true}, {"typed", d.typed}, {"minimal", d.minimal},
                  {"correspondence", verdict_name(d.verdict)}, {"degree", d.degree}};
    };
    for (auto& r : results) {
      Json row{{"name", r.name}, {"passed", r.passed()}, {"source_typed", r.source_typed},
               {"opt", dj(r.opt)}, {"composed", dj(r.composed)}};
      if (r.metrics) row["metrics"] = to_json(*r.metrics);
      row["ratio_bound"] = r.ratio_bound ? Json(*r.ratio_bound) : Json(nullptr);
      rows.push_back(row);
    }
    emit(document("mst.corpus/1", Json{{"entries", rows}, {"failed", failed}}));
    return failed ? kFailed : kOk;
  }

  std::cout << std::left << std::setw(24) << "entry" << std::setw(8) << "source" << std::setw(26) << "opt"
            << std::setw(26) << "composed" << std::setw(8) << "5/3" << "result\n";
  for (auto& r : results) {
    std::string bound = r.ratio_bound ? (*r.ratio_bound ? "yes" : "NO") : "-";
    std::cout << std::setw(24) << r.name << std::setw(8) << (r.source_typed ? "typed" : "UNTYPED")
              << std::setw(26) << cell(r.opt) << std::setw(26) << cell(r.composed) << std::setw(8) << bound
              << (r.passed() ? "pass" : "FAIL") << "\n";
  }
  std::cout << results.size() - failed << "/" << results.size() << " passed\n";
  return failed ? kFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Session process decompositions into minimal session types"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "Machine-readable output");
  app.add_flag("--generated", o.generated, "Accept names produced by the decompositions");

  auto with_input = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "Process file")->required()->check(CLI::ExistingFile);
    sub->add_option("--env", o.env_file, "Environment file (default: FILE with .env)")->check(CLI::ExistingFile);
  };
  auto with_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "Decomposition")->check(CLI::IsMember({"opt", "compose"}));
  };

  auto* parse = app.add_subcommand("parse", "Parse and print a process");
  with_input(parse);
  auto* check = app.add_subcommand("check", "Typecheck a process");
  with_input(check);
  auto* dec = app.add_subcommand("decompose", "Decompose a process");
  with_input(dec);
  with_mode(dec);
  dec->add_flag("--show-env", o.show_env, "Print the decomposed environment");
  dec->add_option("-o,--output", o.output, "Write PREFIX.pi and PREFIX.env");
  auto* run_cmd = app.add_subcommand("run", "Reduce under the deterministic scheduler");
  with_input(run_cmd);
  run_cmd->add_option("--steps", o.steps, "Step budget")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--all", o.all, "Include administrative steps");
  run_cmd->add_option("--trace", o.trace, "Trace format")->check(CLI::IsMember({"json", "text"}));
  auto* corr = app.add_subcommand("correspond", "Compare a process with its decomposition");
  with_input(corr);
  with_mode(corr);
  corr->add_option("--budget", o.budget, "Step budget")->check(CLI::PositiveNumber);
  auto* met = app.add_subcommand("metrics", "Degrees and propagator counts");
  with_input(met);
  auto* corpus = app.add_subcommand("corpus", "Corpus runner");
  auto* corpus_run = corpus->add_subcommand("run", "Check every entry of a corpus directory");
  corpus->require_subcommand(1);
  corpus_run->add_option("--dir", o.corpus_dir, "Directory of NAME.pi / NAME.env pairs")->check(CLI::ExistingDirectory);
  corpus_run->add_option("--budget", o.budget, "Step budget per correspondence")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*parse) return cmd_parse(o);
    if (*check) return cmd_check(o);
    if (*dec) return cmd_decompose(o);
    if (*run_cmd) return cmd_run(o);
    if (*corr) return cmd_correspond(o);
    if (*met) return cmd_metrics(o);
    if (*corpus) return cmd_corpus(o);
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kUsage;
  } catch (const DecomposeError& e) {
    std::cerr << "cannot decompose: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}

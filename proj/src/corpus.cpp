#include "mst/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mst/syntax.hpp"
#include "mst/typecheck.hpp"

namespace mst {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DecompositionCheck check_decomposition(const CorpusEntry& e, Mode mode, int budget) {
  DecompositionCheck r;
  Decomposition d;
  try {
    d = decompose(e.process, e.env, mode);
  } catch (const DecomposeError& err) {
    r.error = err.what();
    return r;
  }
  r.supported = true;
  r.degree = degree(e.process, mode);
  r.typed = typecheck(d.env, d.process).ok;
  r.minimal = check_minimality(d.env) && annotations_minimal(d.process);
  r.verdict = correspond(e.process, d.process, budget).verdict;
  return r;
}

}  // namespace

CorpusEntry load_entry(const fs::path& source, const std::optional<fs::path>& env) {
  CorpusEntry e;
  e.name = source.stem().string();
  e.source_text = slurp(source);
  fs::path env_path = env ? *env : fs::path(source).replace_extension(".env");
  if (env || fs::exists(env_path)) e.env_text = slurp(env_path);
  e.env = parse_env(e.env_text);
  e.process = apply_env_kinds(parse_process(e.source_text), e.env);
  return e;
}

std::vector<CorpusEntry> load_corpus(const fs::path& dir) {
  std::vector<fs::path> files;
  for (auto& f : fs::directory_iterator(dir))
    if (f.path().extension() == ".pi") files.push_back(f.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (auto& f : files) out.push_back(load_entry(f));
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Ok: return "ok";
    case Verdict::Mismatch: return "mismatch";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "mismatch";
}

bool EntryResult::passed() const {
  auto good = [](const DecompositionCheck& d) {
    return !d.supported || (d.typed && d.minimal && d.verdict != Verdict::Mismatch);
  };
  return source_typed && opt.supported && good(opt) && good(composed) && ratio_bound.value_or(true);
}

EntryResult check_entry(const CorpusEntry& e, int budget) {
  EntryResult r;
  r.name = e.name;
  r.source_typed = typecheck(e.env, e.process).ok;
  if (!r.source_typed) return r;
  r.opt = check_decomposition(e, Mode::Opt, budget);
  r.composed = check_decomposition(e, Mode::Composed, budget);
  r.metrics = metrics(e.process, e.env.delta);
  if (r.composed.supported && in_normal_form(e.process))
    r.ratio_bound = check_ratio_bound(e.process, e.env.delta);
  return r;
}

}  // namespace mst

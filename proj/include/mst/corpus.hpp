#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mst/decompose.hpp"
#include "mst/metrics.hpp"
#include "mst/semantics.hpp"

namespace mst {

// A source process and its environment, loaded from NAME.pi and NAME.env.
struct CorpusEntry {
  std::string name;
  std::string source_text;
  std::string env_text;
  ProcPtr process;  // parsed, with environment kinds applied
  TypeEnv env;
};

// The environment file defaults to the source path with extension .env; a
// missing file means an empty environment.
CorpusEntry load_entry(const std::filesystem::path& source, const std::optional<std::filesystem::path>& env = {});
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir);

// Outcome of one decomposition of an entry. `supported` is false when the
// decomposition rejects the construct; the remaining fields are then unset.
struct DecompositionCheck {
  bool supported = false;
  std::string error;
  bool typed = false;
  bool minimal = false;
  Verdict verdict = Verdict::Mismatch;
  int degree = 0;
};

struct EntryResult {
  std::string name;
  bool source_typed = false;
  DecompositionCheck opt, composed;
  std::optional<MetricsReport> metrics;
  std::optional<bool> ratio_bound;  // only for normal forms

  // Inconclusive correspondence does not count as a failure: recursive
  // processes never terminate.
  bool passed() const;
};

EntryResult check_entry(const CorpusEntry& e, int budget);

std::string verdict_name(Verdict v);

}  // namespace mst

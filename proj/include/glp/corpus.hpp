#pragma once

#include "glp/engine.hpp"
#include "glp/parser.hpp"
#include "glp/trace.hpp"

#include <string>
#include <vector>

namespace glp {

// One expected run from a `.expect` file: run(Goal, Status, Checks).
// Checks are `Var = Pattern` (variables in Pattern match anything) or
// `interleaving(Var, Lists)`.
struct RunExpectation {
  Term goal;
  std::string status;  // success | deadlock | failed | fuel
  std::vector<Term> checks;
  uint64_t nvars = 0;  // template ids used by goal and checks
  std::vector<std::string> names;
  std::string text;  // source text of the descriptor, for reports
};

struct CorpusEntry {
  std::string name;
  std::string path;
  std::string source;
  std::vector<std::string> loci;  // listing captions covered by this entry
  std::vector<std::string> uses;  // other entries loaded alongside
  std::string notes;              // normalization notes; empty if verbatim
  std::vector<RunExpectation> runs;
  Module module;
};

struct ExpectationResult {
  bool ok = false;
  std::string detail;
  RunStatus status = RunStatus::Running;
  std::vector<TraceRecord> trace;
};

std::string default_corpus_dir();

// Every `<name>.glp` with a matching `<name>.expect` under `dir`, sorted by name.
std::vector<CorpusEntry> load_corpus(const std::string& dir = default_corpus_dir());
const CorpusEntry& find_entry(const std::vector<CorpusEntry>& corpus, const std::string& name);

// Module paths for an entry: its own file first, then the files it uses.
std::vector<std::string> entry_paths(const CorpusEntry& e, const std::vector<CorpusEntry>& corpus);

ExpectationResult run_expectation(const CorpusEntry& e, const RunExpectation& r, const std::vector<CorpusEntry>& corpus,
                                  uint64_t fuel = 5000);

// Captions of every program listing the corpus must cover.
const std::vector<std::string>& listing_captions();

// Structural match: variables in `pattern` match any subterm.
bool pattern_match(const Term& pattern, const Term& actual);
// `actual` is a ground list that interleaves all `lists`, preserving each one's order.
bool is_interleaving(const Term& actual, const Term& lists);

// Verbatim clauses of the response-processing listing that break the single-writer rule.
std::string defects_path(const std::string& dir = default_corpus_dir());

struct DefectReport {
  std::string clause;  // source text with layout removed and without the final period
  std::vector<SrswViolation> violations;
};

// Clauses of the module at `path` that break the single-reader/single-writer rule.
std::vector<DefectReport> srsw_defects(const std::string& path);

}  // namespace glp

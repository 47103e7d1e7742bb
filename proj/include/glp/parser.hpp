#pragma once

#include "glp/lexer.hpp"
#include "glp/term.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace glp {

// A clause template. Variables carry clause-local ids 1..nvars; rename_apart maps them
// onto fresh global pairs.
struct Clause {
  Term head;
  std::vector<Term> guard;
  std::vector<Term> body;
  bool has_guard = false;
  int line = 0;
  int col = 0;
  uint64_t nvars = 0;
  std::vector<std::string> names;  // names[id] = source name hint
};

struct SrswViolation {
  size_t clause = 0;
  int line = 0;
  std::string var;
  bool reader = false;
  int count = 0;
  std::string str() const;
};

struct Module {
  std::string name;
  std::vector<Clause> clauses;
  std::string hash;
  std::vector<SrswViolation> srsw;
  bool writer_violations() const;
};

struct ParsedTerm {
  Term term;
  std::map<std::string, uint64_t> names;  // source name -> template id
  uint64_t nvars = 0;
};

// Parse a module; `name` is normally the file stem.
Module parse_module(std::string_view text, const std::string& name);
Module load_module_file(const std::string& path);

// Parse a single term. In canonical mode `_W<n>` denotes pair id n verbatim and
// other named variables are rejected; otherwise variables get template ids.
ParsedTerm parse_term(std::string_view text, bool canonical = false);
// Parse `t1. t2. ...` sequences of canonical terms (no clause structure).
std::vector<Term> parse_canonical_terms(std::string_view text);

std::vector<SrswViolation> srsw_check(const Module& m);
std::vector<SrswViolation> srsw_check_clause(const Clause& c, size_t index);

std::string print_clause(const Clause& c);
std::string print_module(const Module& m);
std::string module_hash(const Module& m);
std::string sha256_hex(std::string_view bytes);

}  // namespace glp

#pragma once

#include "glp/parser.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace glp {

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Guard calls handled by the runtime rather than by clauses, with their arities.
bool is_builtin_guard(const std::string& name, size_t arity);
bool builtin_guard_name(const std::string& name);
// Body goals executed as primitive reductions.
bool is_body_builtin(const std::string& name, size_t arity);

// Clauses present in every program unless the user defines the same procedure.
extern const char* const kPreludeSource;

// One or more modules merged into a single namespace, plus the prelude.
class Program {
public:
  static Program build(std::vector<Module> modules);
  static Program from_files(const std::vector<std::string>& paths);
  static Program from_source(const std::string& text, const std::string& name = "main");

  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(size_t i) const { return clauses_[i]; }
  // Clause indices of a procedure in source order, or nullptr if undefined.
  const std::vector<size_t>* procedure(const std::string& indicator) const;
  bool is_guard_predicate(const std::string& indicator) const { return guard_preds_.count(indicator) != 0; }
  // Hash of the first (primary) module; this is what module/1 reports.
  const std::string& hash() const { return hash_; }
  const std::vector<Module>& modules() const { return modules_; }
  std::vector<SrswViolation> srsw_violations() const;
  bool has_writer_violations() const;

private:
  std::vector<Module> modules_;
  std::vector<Clause> clauses_;
  std::map<std::string, std::vector<size_t>> procs_;
  std::set<std::string> guard_preds_;
  std::string hash_;
};

}  // namespace glp

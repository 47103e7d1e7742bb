#pragma once

#include "glp/engine.hpp"
#include "glp/program.hpp"
#include "glp/trace.hpp"

#include <string>
#include <vector>

namespace glp {

// Single-agent interpreter without a binding store: every committed substitution (and
// its reader counterpart) is applied to the whole resolvent at once. Scheduling, clause
// order and trace records follow the engine, so the two traces can be compared.
struct RewriteResult {
  RunStatus status = RunStatus::Running;
  std::vector<TraceRecord> trace;
};

RewriteResult rewrite_run(const Program& program, const std::string& goal_text, uint64_t fuel);
// `goal` is a template whose variables use ids 1..nvars.
RewriteResult rewrite_run(const Program& program, const Term& goal, uint64_t nvars, uint64_t fuel);

// The same run on the binding-store engine, with its trace.
RewriteResult engine_run(const Program& program, const std::string& goal_text, uint64_t fuel);
RewriteResult engine_run(const Program& program, const Term& goal, uint64_t nvars, uint64_t fuel);

// Trace lines with sigma values fully resolved and variable ids renumbered by first
// occurrence. Two interpreters agree when these are equal.
std::vector<std::string> normalize_trace(const std::vector<TraceRecord>& trace);

}  // namespace glp

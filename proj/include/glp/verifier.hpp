#pragma once

#include "glp/program.hpp"
#include "glp/trace.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace glp {

struct Verdict {
  std::string check;
  bool ok = true;
  uint64_t step = 0;   // first counterexample step, when !ok
  std::string detail;  // what went wrong, or a short summary when ok
  std::string str() const;
};

// Programs by agent name; `fallback` serves agents not listed (single-agent traces use
// agent "local").
struct ProgramSet {
  std::map<std::string, const Program*> by_agent;
  const Program* fallback = nullptr;
  const Program* of(const std::string& agent) const;
};

Verdict verify_srsw(const std::vector<TraceRecord>& trace);
Verdict verify_acyclic(const std::vector<TraceRecord>& trace);
Verdict verify_deduction(const std::vector<TraceRecord>& trace, const ProgramSet& programs);
Verdict verify_monotonicity(const std::vector<TraceRecord>& trace, const ProgramSet& programs, uint64_t samples = 16,
                            uint64_t seed = 0);
Verdict verify_streams(const std::vector<TraceRecord>& trace);
Verdict verify_grassroots_interaction(const std::vector<TraceRecord>& trace, const std::set<std::string>& group);

// Names accepted by run_checks: srsw, acyclic, deduction, monotonicity, streams.
const std::vector<std::string>& check_names();
std::vector<Verdict> run_checks(const std::vector<TraceRecord>& trace, const ProgramSet& programs,
                                const std::vector<std::string>& checks, uint64_t seed = 0);

// Hand-forged traces, each breaking exactly the property its check guards.
struct PlantedTrace {
  std::string check;
  std::string description;
  std::vector<TraceRecord> trace;
};
// `merge` should hold the fair merge program; the deduction and monotonicity plants use it.
std::vector<PlantedTrace> planted_counterexamples(const Program& merge);

}  // namespace glp

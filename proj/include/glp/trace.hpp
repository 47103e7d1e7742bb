#pragma once

#include "glp/term.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace glp {

// One transaction: `step=<n> agent=<id> kind=<k>` followed by kind-specific fields whose
// values are canonical terms (or plain tokens).
struct TraceRecord {
  uint64_t step = 0;
  std::string agent;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  TraceRecord& set(const std::string& key, std::string value);
  TraceRecord& set(const std::string& key, const Term& value) { return set(key, to_string(value)); }
  const std::string* get(const std::string& key) const;
  // Field value; throws std::runtime_error if missing.
  const std::string& at(const std::string& key) const;
  bool has(const std::string& key) const { return get(key) != nullptr; }
  std::string str() const;
};

TraceRecord parse_record(std::string_view line);
std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace_file(const std::string& path);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

// Convenience for list-valued fields.
std::string list_field(const std::vector<Term>& items);

}  // namespace glp

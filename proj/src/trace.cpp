#include "glp/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace glp {

TraceRecord& TraceRecord::set(const std::string& key, std::string value) {
  for (auto& [k, v] : fields)
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  fields.emplace_back(key, std::move(value));
  return *this;
}

const std::string* TraceRecord::get(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return &v;
  return nullptr;
}

const std::string& TraceRecord::at(const std::string& key) const {
  const std::string* v = get(key);
  if (!v) throw std::runtime_error("trace record at step " + std::to_string(step) + " lacks field " + key);
  return *v;
}

std::string TraceRecord::str() const {
  std::string out = "step=" + std::to_string(step) + " agent=" + agent + " kind=" + kind;
  for (const auto& [k, v] : fields) out += " " + k + "=" + v;
  return out;
}

namespace {

// Split on spaces that are outside quotes and brackets.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  int depth = 0;
  char quote = 0;
  size_t start = 0;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') quote = c;
    else if (c == '(' || c == '[') ++depth;
    else if (c == ')' || c == ']') --depth;
    else if (c == ' ' && depth == 0) {
      if (i > start) out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < line.size()) out.push_back(line.substr(start));
  return out;
}

}  // namespace

TraceRecord parse_record(std::string_view line) {
  TraceRecord r;
  auto parts = split_fields(line);
  if (parts.size() < 3) throw std::runtime_error("malformed trace line: " + std::string(line));
  for (size_t i = 0; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw std::runtime_error("malformed trace field: " + std::string(parts[i]));
    std::string key(parts[i].substr(0, eq));
    std::string value(parts[i].substr(eq + 1));
    if (i == 0) {
      if (key != "step") throw std::runtime_error("trace line must start with step=");
      r.step = std::stoull(value);
    } else if (i == 1) {
      if (key != "agent") throw std::runtime_error("trace line lacks agent=");
      r.agent = value;
    } else if (i == 2) {
      if (key != "kind") throw std::runtime_error("trace line lacks kind=");
      r.kind = value;
    } else {
      r.fields.emplace_back(std::move(key), std::move(value));
    }
  }
  return r;
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_record(line));
  }
  return out;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  return read_trace(in);
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const auto& r : records) out << r.str() << '\n';
}

std::string list_field(const std::vector<Term>& items) { return to_string(Term::list(items)); }

}  // namespace glp

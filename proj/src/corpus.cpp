#include "glp/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace glp {

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The leading comment block, when it records normalizations.
std::string header_notes(const std::string& source) {
  std::istringstream in(source);
  std::string line, block;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '%') break;
    block += line + "\n";
  }
  return block.find("normalized") == std::string::npos ? std::string() : block;
}

std::vector<Term> list_items(const Term& t) {
  std::vector<Term> out;
  Term cur = t;
  while (cur.is_cons()) {
    out.push_back(cur.arg(0));
    cur = cur.arg(1);
  }
  if (!cur.is_nil()) throw std::runtime_error("expected a proper list: " + to_string(t));
  return out;
}

std::string clause_text(const std::string& source, const Clause& c, const Clause* next) {
  // the descriptor text runs from its line to the line before the next one
  std::istringstream in(source);
  std::string line, out;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n < c.line) continue;
    if (next && n >= next->line) break;
    if (!out.empty()) out += ' ';
    out += line;
  }
  return out;
}

void parse_expect(CorpusEntry& e, const std::string& path) {
  std::string text = slurp(path);
  Module m = parse_module(text, e.name + ".expect");
  for (size_t i = 0; i < m.clauses.size(); ++i) {
    const Clause& c = m.clauses[i];
    const Term& h = c.head;
    std::string where = path + ":" + std::to_string(c.line);
    if (c.has_guard || !c.body.empty()) throw std::runtime_error(where + ": descriptors are facts");
    if (h.is_compound() && h.name() == "locus" && h.arity() == 1 && h.arg(0).is_constant()) {
      e.loci.push_back(h.arg(0).name());
    } else if (h.is_compound() && h.name() == "uses" && h.arity() == 1) {
      for (const auto& u : list_items(h.arg(0))) {
        if (!u.is_constant()) throw std::runtime_error(where + ": uses/1 takes entry names");
        e.uses.push_back(u.name());
      }
    } else if (h.is_compound() && h.name() == "run" && h.arity() == 3) {
      RunExpectation r;
      r.goal = h.arg(0);
      if (!h.arg(1).is_constant()) throw std::runtime_error(where + ": status must be an atom");
      r.status = h.arg(1).name();
      static const std::vector<std::string> statuses = {"success", "deadlock", "failed", "fuel"};
      if (std::find(statuses.begin(), statuses.end(), r.status) == statuses.end())
        throw std::runtime_error(where + ": unknown status " + r.status);
      r.checks = list_items(h.arg(2));
      r.nvars = c.nvars;
      r.names = c.names;
      r.text = clause_text(text, c, i + 1 < m.clauses.size() ? &m.clauses[i + 1] : nullptr);
      e.runs.push_back(std::move(r));
    } else {
      throw std::runtime_error(where + ": unknown descriptor " + h.indicator());
    }
  }
}

const char* status_word(RunStatus s) {
  switch (s) {
    case RunStatus::QuiescentSuccess: return "success";
    case RunStatus::Deadlock: return "deadlock";
    case RunStatus::Failed: return "failed";
    case RunStatus::FuelExhausted: return "fuel";
    case RunStatus::Running: break;
  }
  return "running";
}

}  // namespace

std::string default_corpus_dir() {
#ifdef GLP_SOURCE_DIR
  return std::string(GLP_SOURCE_DIR) + "/corpus";
#else
  return "corpus";
#endif
}

std::string defects_path(const std::string& dir) { return dir + "/defects/response_processing.glp"; }

namespace {

// Drop layout and comments outside quotes, and the clause's closing period.
std::string compact(const std::string& text) {
  std::string out;
  char quote = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) out.push_back(text[++i]);
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '\'' || c == '"') quote = c;
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace

std::vector<DefectReport> srsw_defects(const std::string& path) {
  std::string source = slurp(path);
  Module m = parse_module(source, fs::path(path).stem().string());
  std::vector<DefectReport> out;
  for (size_t i = 0; i < m.clauses.size(); ++i) {
    auto v = srsw_check_clause(m.clauses[i], i);
    if (v.empty()) continue;
    const Clause* next = i + 1 < m.clauses.size() ? &m.clauses[i + 1] : nullptr;
    out.push_back({compact(clause_text(source, m.clauses[i], next)), std::move(v)});
  }
  return out;
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<CorpusEntry> out;
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.is_regular_file() && de.path().extension() == ".glp") files.push_back(de.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    fs::path expect = f;
    expect.replace_extension(".expect");
    if (!fs::exists(expect)) throw std::runtime_error("corpus file without .expect: " + f.string());
    CorpusEntry e;
    e.name = f.stem().string();
    e.path = f.string();
    e.source = slurp(e.path);
    e.notes = header_notes(e.source);
    e.module = parse_module(e.source, e.name);
    parse_expect(e, expect.string());
    out.push_back(std::move(e));
  }
  for (const auto& e : out)
    for (const auto& u : e.uses) find_entry(out, u);
  return out;
}

const CorpusEntry& find_entry(const std::vector<CorpusEntry>& corpus, const std::string& name) {
  for (const auto& e : corpus)
    if (e.name == name) return e;
  throw std::runtime_error("no corpus entry named " + name);
}

std::vector<std::string> entry_paths(const CorpusEntry& e, const std::vector<CorpusEntry>& corpus) {
  std::vector<std::string> paths{e.path};
  for (const auto& u : e.uses) paths.push_back(find_entry(corpus, u).path);
  return paths;
}

bool pattern_match(const Term& pattern, const Term& actual) {
  if (pattern.is_var()) return true;
  if (actual.is_var()) return false;
  if (pattern.kind() != actual.kind()) return false;
  if (pattern.is_constant()) return pattern.name() == actual.name();
  if (pattern.is_number()) return pattern.num() == actual.num();
  if (pattern.name() != actual.name() || pattern.arity() != actual.arity()) return false;
  for (size_t i = 0; i < pattern.arity(); ++i)
    if (!pattern_match(pattern.arg(i), actual.arg(i))) return false;
  return true;
}

bool is_interleaving(const Term& actual, const Term& lists) {
  std::vector<Term> items;
  Term cur = actual;
  while (cur.is_cons()) {
    items.push_back(cur.arg(0));
    cur = cur.arg(1);
  }
  if (!cur.is_nil()) return false;
  std::vector<std::vector<Term>> srcs;
  size_t total = 0;
  for (const auto& l : list_items(lists)) {
    srcs.push_back(list_items(l));
    total += srcs.back().size();
  }
  if (total != items.size()) return false;
  std::vector<size_t> pos(srcs.size(), 0);
  // depth-first over which source supplies each element; the inputs are small
  std::function<bool(size_t)> go = [&](size_t k) {
    if (k == items.size()) return true;
    for (size_t s = 0; s < srcs.size(); ++s) {
      if (pos[s] < srcs[s].size() && to_string(srcs[s][pos[s]]) == to_string(items[k])) {
        ++pos[s];
        if (go(k + 1)) return true;
        --pos[s];
      }
    }
    return false;
  };
  return go(0);
}

ExpectationResult run_expectation(const CorpusEntry& e, const RunExpectation& r, const std::vector<CorpusEntry>& corpus,
                                  uint64_t fuel) {
  ExpectationResult res;
  Program program = Program::from_files(entry_paths(e, corpus));
  IdSource ids;
  Engine engine(program, ids, "local");
  uint64_t base = ids.peek();
  if (r.nvars) ids.observe(base + r.nvars - 1);
  engine.spawn_conjunction(rename_term(r.goal, base));
  res.status = engine.run(fuel, &res.trace);
  std::ostringstream why;
  if (status_word(res.status) != r.status)
    why << "status " << status_word(res.status) << ", expected " << r.status << "; ";
  for (const auto& c : r.checks) {
    Term check = rename_term(c, base);
    if (check.is_compound() && check.name() == "=" && check.arity() == 2 && check.arg(0).is_var()) {
      Term actual = engine.resolve(Term::writer(check.arg(0).id()));
      if (!pattern_match(check.arg(1), actual))
        why << to_string(c.arg(0)) << " = " << to_string(actual) << ", expected " << to_string(c.arg(1)) << "; ";
    } else if (check.is_compound() && check.name() == "interleaving" && check.arity() == 2 && check.arg(0).is_var()) {
      Term actual = engine.resolve(Term::writer(check.arg(0).id()));
      if (!is_interleaving(actual, check.arg(1)))
        why << to_string(actual) << " does not interleave " << to_string(c.arg(1)) << "; ";
    } else {
      why << "unknown check " << to_string(c) << "; ";
    }
  }
  res.detail = why.str();
  res.ok = res.detail.empty();
  return res;
}

const std::vector<std::string>& listing_captions() {
  static const std::vector<std::string> captions = {
      "GLP Fair Stream Merger",
      "Concurrent Monitor",
      "Dynamic Stream Merger",
      "Concurrent Stream Distribution",
      "Network switch, representative clause",
      "Social Graph Initialization",
      "Social Graph Cold-Call Befriending Protocol",
      "Response Processing",
      "Friend-Mediated Introduction Protocol",
      "Direct Messaging Channel Establishment",
      "Authenticated Feed Distribution",
      "Group Formation Protocol",
      "Group Messaging",
      "Channel Operations",
      "Stream-Channel Relay",
      "Stream Tagging",
      "Concurrent Observer",
      "Cooperative Producers",
      "3-Way Network Switch",
      "Non-Ground Term Replicator",
      "Interlaced Streams (Blocklace)",
      "GLP plain metainterpreter",
      "GLP fail-safe metainterpreter",
      "GLP metainterpreter with run control",
      "GLP termination-detecting metainterpreter",
      "GLP metainterpreter with run control and snapshot collection",
      "GLP a tracing metainterpreter",
      "GLP metainterpreter with runtime control",
  };
  return captions;
}

}  // namespace glp

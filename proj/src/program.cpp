#include "glp/program.hpp"

namespace glp {

const char* const kPreludeSource =
    "X? := E :- ground(E) | evaluate(E?, X).\n"
    // relay for a requested reader that leaves the agent: forwards the value once it arrives
    "export_reader(Y, Z?) :- known(Y) | Z = Y?.\n";

bool builtin_guard_name(const std::string& name) {
  static const std::set<std::string> names = {"ground", "known", "unknown", "writer", "reader", "otherwise",
                                              "=",      "=\\=",  "<",       ">",      "=<",     ">=",
                                              "=:=",    "attestation", "module"};
  return names.count(name) != 0;
}

bool is_builtin_guard(const std::string& name, size_t arity) {
  if (name == "otherwise") return arity == 0;
  if (name == "ground" || name == "known" || name == "unknown" || name == "writer" || name == "reader" ||
      name == "module")
    return arity == 1;
  if (name == "=" || name == "=\\=" || name == "<" || name == ">" || name == "=<" || name == ">=" || name == "=:=" ||
      name == "attestation")
    return arity == 2;
  return false;
}

bool is_body_builtin(const std::string& name, size_t arity) {
  return (name == "=" && arity == 2) || (name == "evaluate" && arity == 2) || (name == "current_time" && arity == 1) ||
         (name == "variable_name" && arity == 2);
}

Program Program::build(std::vector<Module> modules) {
  Program p;
  std::set<std::string> names;
  for (const auto& m : modules)
    if (!names.insert(m.name).second) throw LoadError("duplicate module name: " + m.name);
  p.modules_ = std::move(modules);
  p.hash_ = p.modules_.empty() ? std::string("m_empty") : p.modules_.front().hash;

  for (const auto& m : p.modules_)
    for (const auto& c : m.clauses) {
      p.procs_[c.head.indicator()].push_back(p.clauses_.size());
      p.clauses_.push_back(c);
    }
  Module prelude = parse_module(kPreludeSource, "prelude");
  for (const auto& c : prelude.clauses) {
    std::string ind = c.head.indicator();
    if (p.procs_.count(ind)) continue;
    p.procs_[ind].push_back(p.clauses_.size());
    p.clauses_.push_back(c);
  }

  for (const auto& [ind, idx] : p.procs_) {
    bool units = true;
    for (size_t i : idx)
      if (p.clauses_[i].has_guard || !p.clauses_[i].body.empty()) units = false;
    if (units) p.guard_preds_.insert(ind);
  }

  for (const auto& c : p.clauses_) {
    for (const auto& g : c.guard) {
      std::string where = " (line " + std::to_string(c.line) + ")";
      if (g.is_var() || g.is_number()) throw LoadError("guard call is not an atom" + where);
      if (builtin_guard_name(g.name())) {
        if (!is_builtin_guard(g.name(), g.arity()))
          throw LoadError("guard " + g.indicator() + " has the wrong arity" + where);
        continue;
      }
      std::string ind = g.indicator();
      if (!p.procs_.count(ind)) throw LoadError("unknown guard predicate " + ind + where);
      if (!p.guard_preds_.count(ind))
        throw LoadError("guard predicate " + ind + " must be defined by unit clauses only" + where);
    }
  }
  return p;
}

Program Program::from_files(const std::vector<std::string>& paths) {
  std::vector<Module> mods;
  for (const auto& path : paths) mods.push_back(load_module_file(path));
  return build(std::move(mods));
}

Program Program::from_source(const std::string& text, const std::string& name) {
  return build({parse_module(text, name)});
}

const std::vector<size_t>* Program::procedure(const std::string& indicator) const {
  auto it = procs_.find(indicator);
  return it == procs_.end() ? nullptr : &it->second;
}

std::vector<SrswViolation> Program::srsw_violations() const {
  std::vector<SrswViolation> out;
  for (const auto& m : modules_) out.insert(out.end(), m.srsw.begin(), m.srsw.end());
  return out;
}

bool Program::has_writer_violations() const {
  for (const auto& m : modules_)
    if (m.writer_violations()) return true;
  return false;
}

}  // namespace glp

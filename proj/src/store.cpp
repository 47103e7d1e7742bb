#include "glp/store.hpp"

#include <algorithm>

namespace glp {

void Substitution::bind(const Term& var, Term value) {
  if (!var.is_var()) throw ContractViolation("substitution binds a non-variable");
  map_[key_of(var)] = std::move(value);
}

const Term* Substitution::lookup(VarKey k) const {
  auto it = map_.find(k);
  return it == map_.end() ? nullptr : &it->second;
}

bool Substitution::is_writer_substitution() const {
  for (const auto& [k, v] : map_) {
    if (k.reader) return false;
    if (v.is_writer()) return false;
    if (occurs(k.id, v)) {
      // X? in X sigma, or X in X sigma
      return false;
    }
  }
  return true;
}

const Term* BindingStore::lookup(uint64_t id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second;
}

void BindingStore::bind(uint64_t id, Term value) {
  auto [it, inserted] = map_.emplace(id, std::move(value));
  if (!inserted) throw InternalCorruption("variable _W" + std::to_string(id) + " assigned twice");
}

const Term* View::lookup(uint64_t id) const {
  if (tentative_) {
    auto it = tentative_->find(id);
    if (it != tentative_->end()) return &it->second;
  }
  return store_->lookup(id);
}

Term View::deref(Term t) const {
  size_t guard = 0;
  while (t.is_var()) {
    const Term* v = lookup(t.id());
    if (!v) break;
    t = *v;
    if (++guard > 10'000'000) throw InternalCorruption("dereference does not terminate");
  }
  return t;
}

namespace {

Term resolve_rec(const Term& t, const View& view, std::unordered_set<uint64_t>& path) {
  if (t.is_var()) {
    const Term* v = view.lookup(t.id());
    if (!v) return t;
    if (!path.insert(t.id()).second)
      throw InternalCorruption("cyclic binding through _W" + std::to_string(t.id()));
    Term r = resolve_rec(*v, view, path);
    path.erase(t.id());
    return r;
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(resolve_rec(a, view, path));
    if (!args.back().same_node(a)) changed = true;
  }
  if (!changed) return t;
  return Term::compound(t.name(), std::move(args));
}

}  // namespace

Term View::resolve(const Term& t) const {
  std::unordered_set<uint64_t> path;
  return resolve_rec(t, *this, path);
}

namespace {

Term apply_rec(const Term& t, const Substitution& s, const BindingStore* store,
               std::unordered_set<uint64_t>& path) {
  if (t.is_var()) {
    const Term* v = s.lookup(key_of(t));
    if (!v && store) v = store->lookup(t.id());
    if (!v) return t;
    if (!path.insert(t.id()).second)
      throw InternalCorruption("cyclic substitution through _W" + std::to_string(t.id()));
    Term r = apply_rec(*v, s, store, path);
    path.erase(t.id());
    return r;
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply_rec(a, s, store, path));
    if (!args.back().same_node(a)) changed = true;
  }
  if (!changed) return t;
  return Term::compound(t.name(), std::move(args));
}

}  // namespace

Term apply(const Term& t, const Substitution& subst, const BindingStore& store) {
  std::unordered_set<uint64_t> path;
  return apply_rec(t, subst, &store, path);
}

Term apply(const Term& t, const Substitution& subst) {
  std::unordered_set<uint64_t> path;
  return apply_rec(t, subst, nullptr, path);
}

Substitution reader_counterpart(const Substitution& sigma) {
  if (!sigma.is_writer_substitution()) throw ContractViolation("reader_counterpart of a non-writer substitution");
  Substitution out;
  for (const auto& [k, v] : sigma.entries()) out.bind(Term::reader(k.id), v);
  return out;
}

Status classify(const Term& t, const View& view) {
  Term d = view.deref(t);
  if (d.is_writer()) return Status::UnboundWriter;
  if (d.is_reader()) return Status::UnboundReader;
  return is_ground(d, view) ? Status::Ground : Status::KnownNonground;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Ground: return "ground";
    case Status::KnownNonground: return "known-nonground";
    case Status::UnboundWriter: return "unbound-writer";
    case Status::UnboundReader: return "unbound-reader";
  }
  return "?";
}

bool is_ground(const Term& t, const View& view) {
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = view.deref(stack.back());
    stack.pop_back();
    if (cur.is_var()) return false;
    if (cur.is_compound())
      for (const auto& a : cur.args()) stack.push_back(a);
  }
  return true;
}

void frontier_readers(const Term& t, const View& view, std::vector<Term>& out) {
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = view.deref(stack.back());
    stack.pop_back();
    if (cur.is_reader()) {
      bool dup = std::any_of(out.begin(), out.end(), [&](const Term& o) { return o.id() == cur.id(); });
      if (!dup) out.push_back(cur);
    } else if (cur.is_compound()) {
      for (auto it = cur.args().rbegin(); it != cur.args().rend(); ++it) stack.push_back(*it);
    }
  }
}

}  // namespace glp

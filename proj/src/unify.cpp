#include "glp/unify.hpp"

#include <algorithm>

namespace glp {

const char* fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::Clash: return "clash";
    case FailReason::Cycle: return "cycle";
    case FailReason::WriterWriter: return "writer-writer";
    case FailReason::ReaderNeedsValue: return "reader-needs-value";
  }
  return "?";
}

Substitution UnifyOutcome::substitution() const {
  Substitution s;
  for (const auto& [id, v] : bindings) s.bind(Term::writer(id), v);
  return s;
}

namespace {

// Regular mgu over readers and writers as distinct variables, oriented so that a writer
// mgu is found whenever one exists.
class Mgu {
public:
  Mgu(const View& view) : view_(view) {}

  Term walk(Term t) const {
    for (;;) {
      t = view_.deref(t);
      if (!t.is_var()) return t;
      auto it = local_.find(key_of(t));
      if (it == local_.end()) return t;
      t = it->second;
    }
  }

  bool occurs_key(VarKey k, const Term& t) const {
    Term w = walk(t);
    if (w.is_var()) return key_of(w) == k;
    if (!w.is_compound()) return false;
    for (const auto& a : w.args())
      if (occurs_key(k, a)) return true;
    return false;
  }

  bool unify(const Term& a0, const Term& b0) {
    std::vector<std::pair<Term, Term>> work{{a0, b0}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      Term a = walk(x), b = walk(y);
      if (a.is_var() && b.is_var() && key_of(a) == key_of(b)) continue;
      if (a.is_var() || b.is_var()) {
        if (!bind_oriented(a, b)) return false;
        continue;
      }
      if (a.kind() != b.kind()) return false;
      if (a.is_constant()) {
        if (a.name() != b.name()) return false;
        continue;
      }
      if (a.is_number()) {
        if (!(a.num() == b.num())) return false;
        continue;
      }
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (size_t i = a.arity(); i-- > 0;) work.emplace_back(a.arg(i), b.arg(i));
    }
    return true;
  }

  bool bind_oriented(const Term& a, const Term& b) {
    // a or b is an unbound variable (after walk)
    Term var, val;
    if (a.is_writer() && !b.is_writer()) {
      var = a, val = b;
    } else if (b.is_writer() && !a.is_writer()) {
      var = b, val = a;
    } else if (a.is_writer() && b.is_writer()) {
      writer_writer_ = true;
      var = a, val = b;
    } else if (a.is_reader() && !b.is_var()) {
      var = a, val = b;
    } else if (b.is_reader() && !a.is_var()) {
      var = b, val = a;
    } else {
      reader_reader_ = true;
      var = a, val = b;
    }
    if (occurs_key(key_of(var), val)) return false;
    local_.emplace(key_of(var), val);
    order_.push_back(key_of(var));
    return true;
  }

  // Fully resolve a term through the local substitution and the view.
  Term resolve(const Term& t, int depth = 0) const {
    if (depth > 100000) throw InternalCorruption("resolve depth exceeded in unification");
    Term w = walk(t);
    if (!w.is_compound()) return w;
    std::vector<Term> args;
    args.reserve(w.arity());
    bool changed = false;
    for (const auto& x : w.args()) {
      args.push_back(resolve(x, depth + 1));
      if (!args.back().same_node(x)) changed = true;
    }
    return changed ? Term::compound(w.name(), std::move(args)) : w;
  }

  UnifyOutcome outcome(UnifyOptions opts) const {
    bool cycle = false;
    bool fresh_reader = false;
    std::vector<Term> blockers;
    for (const auto& k : order_) {
      const Term& v = local_.at(k);
      if (!k.reader) {
        if (!v.is_var() && occurs_key(VarKey{k.id, true}, resolve(v))) cycle = true;
        if (v.is_var() && v.is_reader() && v.id() == k.id) cycle = true;
        continue;
      }
      if (v.is_var()) continue;  // reader-to-reader, not a suspension
      if (opts.local_from != 0 && k.id >= opts.local_from) {
        fresh_reader = true;
        continue;
      }
      blockers.push_back(Term::reader(k.id));
    }
    bool reader_bound = std::any_of(order_.begin(), order_.end(), [](const VarKey& k) { return k.reader; });
    if (!reader_bound && !writer_writer_ && !cycle) {
      UnifyOutcome o;
      o.kind = UnifyOutcome::Kind::Success;
      for (const auto& k : order_) o.bindings.emplace_back(k.id, local_.at(k));
      return o;
    }
    if (!blockers.empty()) {
      UnifyOutcome o;
      o.kind = UnifyOutcome::Kind::Suspend;
      o.blockers = std::move(blockers);
      return o;
    }
    if (cycle) return UnifyOutcome::fail(FailReason::Cycle);
    if (writer_writer_) return UnifyOutcome::fail(FailReason::WriterWriter);
    (void)fresh_reader;
    return UnifyOutcome::fail(FailReason::ReaderNeedsValue);
  }

private:
  const View& view_;
  std::map<VarKey, Term> local_;
  std::vector<VarKey> order_;
  bool writer_writer_ = false;
  bool reader_reader_ = false;
};

}  // namespace

UnifyOutcome unify_equations(const std::vector<std::pair<Term, Term>>& eqs, const View& view,
                             UnifyOptions opts) {
  Mgu m(view);
  for (const auto& [a, b] : eqs)
    if (!m.unify(a, b)) return UnifyOutcome::fail(FailReason::Clash);
  return m.outcome(opts);
}

UnifyOutcome writer_unify(const Term& a, const Term& b, const View& view, UnifyOptions opts) {
  return unify_equations({{a, b}}, view, opts);
}

}  // namespace glp

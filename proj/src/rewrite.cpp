#include "glp/rewrite.hpp"

#include "glp/arith.hpp"
#include "glp/parser.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace glp {

namespace {

using Bindings = std::vector<std::pair<uint64_t, Term>>;
using K = TryOutcome::Kind;

const BindingStore& empty_store() {
  static const BindingStore s;
  return s;
}

Term renamed(const Term& t, uint64_t base) {
  if (t.is_writer()) return Term::writer(base + t.id() - 1);
  if (t.is_reader()) return Term::reader(base + t.id() - 1);
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(renamed(a, base));
  return Term::compound(t.name(), std::move(args));
}

// Apply a writer substitution and its reader counterpart.
Term subst(const Term& t, const std::map<uint64_t, Term>& s) {
  if (s.empty()) return t;
  if (t.is_var()) {
    auto it = s.find(t.id());
    return it == s.end() ? t : subst(it->second, s);
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(subst(a, s));
  return Term::compound(t.name(), std::move(args));
}

std::map<uint64_t, Term> as_map(const Bindings& b) { return std::map<uint64_t, Term>(b.begin(), b.end()); }

void add_unique(std::vector<Term>& into, const std::vector<Term>& from) {
  for (const auto& t : from)
    if (std::none_of(into.begin(), into.end(), [&](const Term& o) { return o.id() == t.id(); })) into.push_back(t);
}

Term sigma_list(const Bindings& b) {
  std::vector<Term> eqs;
  for (const auto& [id, v] : b) eqs.push_back(Term::compound("=", {Term::writer(id), v}));
  return Term::list(eqs);
}

struct Attempt {
  K kind = K::Fail;
  Bindings bindings;
  std::vector<Term> blockers;
  Term head, guard;
  std::vector<Term> body;
  uint64_t max_id = 0;
};

class Rewriter {
public:
  Rewriter(const Program& p) : p_(p) {}

  void start(const Term& goal, uint64_t nvars) {
    uint64_t base = next_id_;
    if (nvars) next_id_ = std::max(next_id_, base + nvars);
    std::vector<Term> stack{renamed(goal, base)};
    while (!stack.empty()) {
      Term g = stack.back();
      stack.pop_back();
      if (g.is_compound() && g.name() == "," && g.arity() == 2) {
        stack.push_back(g.arg(1));
        stack.push_back(g.arg(0));
      } else {
        spawn(g);
      }
    }
  }

  RewriteResult run(uint64_t fuel) {
    RewriteResult out;
    for (uint64_t gid : queue_) {
      TraceRecord r;
      r.step = 0;
      r.agent = "local";
      r.kind = "inject";
      r.set("gid", std::to_string(gid));
      r.set("boot", atoms_.at(gid));
      out.trace.push_back(std::move(r));
    }
    uint64_t steps = 0;
    while (!queue_.empty() && steps < fuel) {
      ++steps;
      out.trace.push_back(step(steps));
    }
    if (!queue_.empty()) out.status = RunStatus::FuelExhausted;
    else if (failed_) out.status = RunStatus::Failed;
    else if (!suspended_.empty()) out.status = RunStatus::Deadlock;
    else out.status = RunStatus::QuiescentSuccess;
    return out;
  }

private:
  void spawn(const Term& atom) {
    uint64_t gid = next_gid_++;
    atoms_.emplace(gid, atom);
    queue_.push_back(gid);
  }

  bool is_bound(uint64_t id) const { return bound_.count(id) != 0; }
  bool is_abandoned(VarKey k) const { return abandoned_.count(k) != 0; }

  std::vector<Term> live(const std::vector<Term>& blockers) const {
    std::vector<Term> out;
    for (const auto& b : blockers)
      if (!is_abandoned(VarKey{b.id(), true}) && !is_bound(b.id())) out.push_back(b);
    return out;
  }

  static std::vector<Term> outside(const Term& t, uint64_t local_from) {
    std::vector<Term> all, out;
    frontier_readers(t, empty_store(), all);
    for (const auto& r : all)
      if (r.id() < local_from) out.push_back(r);
    return out;
  }

  struct GuardOut {
    K kind = K::Commit;
    std::vector<Term> blockers;
    Bindings bindings;
  };

  static GuardOut from_unify(const UnifyOutcome& u) {
    GuardOut r;
    r.kind = u.success() ? K::Commit : u.suspended() ? K::Suspend : K::Fail;
    if (u.success()) r.bindings = u.bindings;
    if (u.suspended()) r.blockers = u.blockers;
    return r;
  }

  GuardOut guard(const Term& call, uint64_t local_from, uint64_t& next_local, const std::vector<Attempt>& earlier) const {
    GuardOut r;
    const std::string& name = call.name();
    size_t n = call.arity();
    auto blocked = [&](std::vector<Term> b) {
      r.kind = b.empty() ? K::Fail : K::Suspend;
      r.blockers = std::move(b);
      return r;
    };
    UnifyOptions opts{local_from};
    if (name == "otherwise" && n == 0) {
      for (const auto& e : earlier)
        if (e.kind == K::Suspend) {
          r.kind = K::Suspend;
          add_unique(r.blockers, e.blockers);
        }
      return r;
    }
    if (n == 1 && (name == "ground" || name == "known" || name == "unknown" || name == "writer" || name == "reader")) {
      const Term& d = call.arg(0);
      if (name == "ground") return is_ground(d, empty_store()) ? r : blocked(outside(d, local_from));
      if (name == "known") {
        if (!d.is_var()) return r;
        if (d.is_reader() && d.id() < local_from) return blocked({d});
        r.kind = K::Fail;
        return r;
      }
      bool ok = name == "unknown" ? d.is_var() : name == "writer" ? d.is_writer() : d.is_reader();
      r.kind = ok ? K::Commit : K::Fail;
      return r;
    }
    if (n == 2 && name == "=") return from_unify(writer_unify(call.arg(0), call.arg(1), empty_store(), opts));
    if (n == 2 && name == "=\\=") {
      GuardOut u = from_unify(writer_unify(call.arg(0), call.arg(1), empty_store(), opts));
      if (u.kind == K::Suspend) return u;
      r.kind = u.kind == K::Commit ? K::Fail : K::Commit;
      return r;
    }
    if (n == 2 && is_comparison(name)) {
      const Term &a = call.arg(0), &b = call.arg(1);
      if (!is_ground(a, empty_store()) || !is_ground(b, empty_store())) {
        auto bl = outside(a, local_from);
        add_unique(bl, outside(b, local_from));
        return blocked(std::move(bl));
      }
      auto x = eval_arith(a), y = eval_arith(b);
      r.kind = x && y && compare_numbers(name, *x, *y) ? K::Commit : K::Fail;
      return r;
    }
    if (n == 2 && name == "attestation") {
      if (call.arg(0).is_var()) {
        r.kind = K::Fail;
        return r;
      }
      Term att = Term::compound("att", {Term::constant("self"), Term::constant(p_.hash())});
      return from_unify(writer_unify(call.arg(1), att, empty_store(), opts));
    }
    if (n == 1 && name == "module")
      return from_unify(writer_unify(call.arg(0), Term::constant(p_.hash()), empty_store(), opts));
    const auto* proc = p_.procedure(call.indicator());
    if (!proc) {
      r.kind = K::Fail;
      return r;
    }
    std::vector<Term> bl;
    for (size_t ci : *proc) {
      const Clause& c = p_.clause(ci);
      UnifyOutcome u = writer_unify(call, renamed(c.head, next_local), empty_store(), opts);
      if (u.success()) {
        next_local += c.nvars;
        r.bindings = u.bindings;
        return r;
      }
      if (u.suspended()) add_unique(bl, u.blockers);
    }
    return blocked(std::move(bl));
  }

  Attempt attempt(const Term& goal, size_t ci, const std::vector<Attempt>& earlier) const {
    const Clause& c = p_.clause(ci);
    uint64_t base = next_id_;
    Attempt a;
    a.head = renamed(c.head, base);
    std::vector<Term> guards;
    for (const auto& g : c.guard) guards.push_back(renamed(g, base));
    for (const auto& b : c.body) a.body.push_back(renamed(b, base));
    a.guard = Term::list(guards);
    uint64_t next_local = base + c.nvars;
    UnifyOutcome u = writer_unify(goal, a.head, empty_store(), UnifyOptions{base});
    if (u.failed()) return a;
    if (u.suspended()) {
      a.kind = K::Suspend;
      a.blockers = u.blockers;
      return a;
    }
    a.bindings = u.bindings;
    std::map<uint64_t, Term> sofar = as_map(a.bindings);
    bool suspended = false;
    for (const auto& g : guards) {
      GuardOut r = guard(subst(g, sofar), base, next_local, earlier);
      if (r.kind == K::Fail) {
        a.kind = K::Fail;
        a.blockers.clear();
        return a;
      }
      if (r.kind == K::Suspend) {
        suspended = true;
        add_unique(a.blockers, r.blockers);
        continue;
      }
      for (auto& [id, v] : r.bindings) {
        a.bindings.emplace_back(id, v);
        sofar.emplace(id, v);
      }
    }
    a.max_id = next_local - 1;
    a.kind = suspended ? K::Suspend : K::Commit;
    if (suspended) a.bindings.clear();
    return a;
  }

  std::vector<uint64_t> wake(uint64_t id) {
    std::vector<uint64_t> out;
    auto it = waiting_.find(id);
    if (it == waiting_.end()) return out;
    for (uint64_t gid : it->second)
      if (suspended_.count(gid)) out.push_back(gid);
    waiting_.erase(it);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void requeue(std::vector<uint64_t> woken) {
    std::sort(woken.begin(), woken.end());
    woken.erase(std::unique(woken.begin(), woken.end()), woken.end());
    for (uint64_t gid : woken) {
      if (!suspended_.count(gid)) continue;
      suspended_.erase(gid);
      queue_.push_back(gid);
    }
  }

  // The whole-resolvent rewrite: goals, new body goals, everything sees sigma at once.
  void commit(TraceRecord& rec, uint64_t gid, const Term& goal, const Bindings& b, const std::vector<Term>& body) {
    std::map<uint64_t, Term> s = as_map(b);
    atoms_.erase(gid);
    for (auto& [g, atom] : atoms_) atom = subst(atom, s);
    std::vector<uint64_t> woken;
    for (const auto& [id, v] : b) {
      bound_.insert(id);
      auto w = wake(id);
      woken.insert(woken.end(), w.begin(), w.end());
    }
    rec.set("first", std::to_string(next_gid_));
    std::vector<Term> new_body;
    for (const auto& x : body) {
      new_body.push_back(subst(x, s));
      spawn(new_body.back());
    }

    std::vector<Term> before_vars;
    collect_vars(goal, before_vars);
    std::set<uint64_t> goal_ids;
    for (const auto& v : before_vars) goal_ids.insert(v.id());
    std::vector<Term> vars;
    for (const auto& x : new_body) collect_vars(x, vars);
    for (const auto& [id, v] : b)
      if (goal_ids.count(id)) collect_vars(subst(v, s), vars);
    std::unordered_set<VarKey, VarKeyHash> survivors;
    for (const auto& v : vars) survivors.insert(key_of(v));
    std::vector<Term> ab;
    for (const auto& v : before_vars) {
      VarKey k = key_of(v);
      if (is_bound(k.id) || survivors.count(k)) continue;
      VarKey other{k.id, !k.reader};
      if (is_abandoned(other)) continue;
      abandoned_.insert(other);
      ab.push_back(other.reader ? Term::reader(other.id) : Term::writer(other.id));
      if (other.reader) {
        auto w = wake(k.id);
        woken.insert(woken.end(), w.begin(), w.end());
      }
    }
    requeue(std::move(woken));
    rec.set("sigma", sigma_list(b));
    rec.set("abandoned", list_field(ab));
  }

  void suspend(TraceRecord& rec, uint64_t gid, std::vector<Term> blockers) {
    rec.kind = "suspend";
    for (const auto& b : blockers) waiting_[b.id()].push_back(gid);
    rec.set("blockers", list_field(blockers));
    suspended_.insert(gid);
  }

  void fail(TraceRecord& rec, uint64_t gid, const std::string& reason) {
    rec.kind = "fail";
    failed_ = true;
    std::vector<Term> vars;
    collect_vars(atoms_.at(gid), vars);
    atoms_.erase(gid);
    std::vector<Term> ab;
    std::vector<uint64_t> woken;
    for (const auto& v : vars) {
      VarKey other{v.id(), !v.is_reader()};
      if (is_abandoned(other)) continue;
      abandoned_.insert(other);
      ab.push_back(other.reader ? Term::reader(other.id) : Term::writer(other.id));
      if (other.reader) {
        auto w = wake(v.id());
        woken.insert(woken.end(), w.begin(), w.end());
      }
    }
    requeue(std::move(woken));
    rec.set("reason", reason);
    rec.set("abandoned", list_field(ab));
  }

  TraceRecord builtin(uint64_t gid, const Term& g, uint64_t stepno, TraceRecord rec) {
    rec.set("clause", "builtin");
    const std::string& name = g.name();
    UnifyOutcome u;
    if (name == "=") {
      u = writer_unify(g.arg(0), g.arg(1), empty_store());
    } else if (name == "evaluate") {
      const Term& e = g.arg(0);
      if (!is_ground(e, empty_store())) {
        std::vector<Term> readers;
        frontier_readers(e, empty_store(), readers);
        readers = live(readers);
        if (readers.empty()) fail(rec, gid, "evaluate-non-ground");
        else suspend(rec, gid, std::move(readers));
        return rec;
      }
      std::string why;
      auto val = eval_arith(e, &why);
      if (!val) {
        fail(rec, gid, why);
        return rec;
      }
      u = writer_unify(g.arg(1), Term::number(*val), empty_store());
    } else if (name == "current_time") {
      u = writer_unify(g.arg(0), Term::number(static_cast<long>(stepno)), empty_store());
    } else {
      if (!g.arg(0).is_var()) {
        fail(rec, gid, "not-a-variable");
        return rec;
      }
      u = writer_unify(g.arg(1), Term::constant(to_string(g.arg(0))), empty_store());
    }
    if (u.success()) {
      commit(rec, gid, g, u.bindings, {});
      rec.set("body", "[]");
    } else if (u.suspended()) {
      auto b = live(u.blockers);
      if (b.empty()) fail(rec, gid, "abandoned");
      else suspend(rec, gid, std::move(b));
    } else {
      fail(rec, gid, fail_reason_name(u.reason));
    }
    return rec;
  }

  TraceRecord step(uint64_t stepno) {
    uint64_t gid = queue_.front();
    queue_.pop_front();
    Term g = atoms_.at(gid);
    TraceRecord rec;
    rec.step = stepno;
    rec.agent = "local";
    rec.kind = "reduce";
    rec.set("gid", std::to_string(gid));
    rec.set("goal", g);
    bool callable = g.is_compound() || g.is_constant();
    if (callable && is_body_builtin(g.name(), g.arity())) return builtin(gid, g, stepno, std::move(rec));
    const auto* proc = callable ? p_.procedure(g.indicator()) : nullptr;
    if (!proc) {
      fail(rec, gid, "unknown-procedure");
      return rec;
    }
    std::vector<Attempt> earlier;
    for (size_t ci : *proc) {
      Attempt a = attempt(g, ci, earlier);
      if (a.kind == K::Commit) {
        next_id_ = std::max(next_id_, a.max_id + 1);
        rec.set("clause", std::to_string(ci));
        rec.set("head", a.head);
        rec.set("guard", a.guard);
        rec.set("body", Term::list(a.body));
        commit(rec, gid, g, a.bindings, a.body);
        return rec;
      }
      earlier.push_back(std::move(a));
    }
    std::vector<Term> blockers;
    for (const auto& a : earlier)
      if (a.kind == K::Suspend) add_unique(blockers, a.blockers);
    auto l = live(blockers);
    if (!l.empty()) suspend(rec, gid, std::move(l));
    else fail(rec, gid, blockers.empty() ? "no-clause" : "abandoned");
    return rec;
  }

  const Program& p_;
  std::map<uint64_t, Term> atoms_;  // live goals, always fully rewritten
  std::deque<uint64_t> queue_;
  std::set<uint64_t> suspended_;
  std::unordered_map<uint64_t, std::vector<uint64_t>> waiting_;
  std::unordered_set<uint64_t> bound_;
  std::unordered_set<VarKey, VarKeyHash> abandoned_;
  bool failed_ = false;
  uint64_t next_gid_ = 1;
  uint64_t next_id_ = 1;
};

// Rebuild ids so that the n-th distinct id met in the trace becomes n.
class Renumber {
public:
  Term operator()(const Term& t) {
    if (t.is_var()) {
      auto [it, fresh] = ids_.emplace(t.id(), ids_.size() + 1);
      return t.is_reader() ? Term::reader(it->second) : Term::writer(it->second);
    }
    if (!t.is_compound()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back((*this)(a));
    return Term::compound(t.name(), std::move(args));
  }

private:
  std::map<uint64_t, uint64_t> ids_;
};

}  // namespace

RewriteResult rewrite_run(const Program& program, const Term& goal, uint64_t nvars, uint64_t fuel) {
  Rewriter r(program);
  r.start(goal, nvars);
  return r.run(fuel);
}

RewriteResult rewrite_run(const Program& program, const std::string& goal_text, uint64_t fuel) {
  ParsedTerm pt = parse_term(goal_text);
  return rewrite_run(program, pt.term, pt.nvars, fuel);
}

RewriteResult engine_run(const Program& program, const Term& goal, uint64_t nvars, uint64_t fuel) {
  IdSource ids;
  if (nvars) ids.observe(nvars);
  Engine e(program, ids);
  e.spawn_conjunction(goal);
  RewriteResult out;
  out.status = e.run(fuel, &out.trace);
  return out;
}

RewriteResult engine_run(const Program& program, const std::string& goal_text, uint64_t fuel) {
  ParsedTerm pt = parse_term(goal_text);
  return engine_run(program, pt.term, pt.nvars, fuel);
}

std::vector<std::string> normalize_trace(const std::vector<TraceRecord>& trace) {
  std::map<std::string, BindingStore> stores;
  Renumber ren;
  std::vector<std::string> out;
  for (const auto& r : trace) {
    std::string line = "step=" + std::to_string(r.step) + " agent=" + r.agent + " kind=" + r.kind;
    BindingStore& store = stores[r.agent];
    for (const auto& [key, value] : r.fields) {
      Term t;
      try {
        t = parse_term(value, true).term;
      } catch (const std::exception&) {
        line += " " + key + "=" + value;
        continue;
      }
      if (key == "sigma") {
        Substitution s;
        for (Term c = t; c.is_cons(); c = c.arg(1)) {
          s.bind(c.arg(0).arg(0), c.arg(0).arg(1));
          s.bind(Term::reader_of(c.arg(0).arg(0)), c.arg(0).arg(1));
        }
        std::vector<Term> eqs;
        for (Term c = t; c.is_cons(); c = c.arg(1)) {
          const Term& w = c.arg(0).arg(0);
          eqs.push_back(Term::compound("=", {w, apply(c.arg(0).arg(1), s, store)}));
        }
        for (const auto& e : eqs)
          if (!store.bound(e.arg(0).id())) store.bind(e.arg(0).id(), e.arg(1));
        t = Term::list(eqs);
      }
      line += " " + key + "=" + to_string(ren(t));
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace glp

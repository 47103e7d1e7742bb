#include "glp/engine.hpp"

#include "glp/arith.hpp"

#include <algorithm>
#include <unordered_set>

namespace glp {

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::QuiescentSuccess: return "quiescent-success";
    case RunStatus::Deadlock: return "deadlock";
    case RunStatus::Failed: return "failed";
    case RunStatus::FuelExhausted: return "fuel-exhausted";
  }
  return "?";
}

Term rename_term(const Term& t, uint64_t base) {
  switch (t.kind()) {
    case Kind::Writer: return Term::writer(base + t.id() - 1);
    case Kind::Reader: return Term::reader(base + t.id() - 1);
    case Kind::Compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const auto& a : t.args()) args.push_back(rename_term(a, base));
      return Term::compound(t.name(), std::move(args));
    }
    default: return t;
  }
}

std::vector<Term> srsw_term_violations(const Term& t) {
  std::map<VarKey, int> counts;
  std::vector<Term> stack{t}, order;
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (cur.is_var()) {
      if (++counts[key_of(cur)] == 2) order.push_back(cur);
    } else if (cur.is_compound()) {
      for (const auto& a : cur.args()) stack.push_back(a);
    }
  }
  return order;
}

namespace {

using Tentative = std::unordered_map<uint64_t, Term>;

class SelfAttestation : public AttestationSource {
public:
  explicit SelfAttestation(std::string hash) : hash_(std::move(hash)) {}
  std::optional<Term> attestation(const Term& resolved, const View&) const override {
    if (resolved.is_var()) return std::nullopt;
    return Term::compound("att", {Term::constant("self"), Term::constant(hash_)});
  }

private:
  std::string hash_;
};

void append_unique(std::vector<Term>& into, const std::vector<Term>& from) {
  for (const auto& t : from)
    if (std::none_of(into.begin(), into.end(), [&](const Term& o) { return o.id() == t.id(); })) into.push_back(t);
}

Term sigma_term(const std::vector<std::pair<uint64_t, Term>>& bindings) {
  std::vector<Term> eqs;
  for (const auto& [id, v] : bindings) eqs.push_back(Term::compound("=", {Term::writer(id), v}));
  return Term::list(eqs);
}

Term var_of_key(VarKey k) { return k.reader ? Term::reader(k.id) : Term::writer(k.id); }

}  // namespace

Engine::Engine(const Program& program, IdSource& ids, std::string agent)
    : program_(&program), ids_(&ids), agent_(std::move(agent)) {}

uint64_t Engine::spawn(const Term& atom) {
  uint64_t gid = next_gid_++;
  queue_.push_back(Goal{gid, atom});
  return gid;
}

std::vector<uint64_t> Engine::spawn_conjunction(const Term& goal) {
  std::vector<uint64_t> gids;
  std::vector<Term> stack{goal};
  while (!stack.empty()) {
    Term g = stack.back();
    stack.pop_back();
    if (g.is_compound() && g.name() == "," && g.arity() == 2) {
      stack.push_back(g.arg(1));
      stack.push_back(g.arg(0));
    } else {
      gids.push_back(spawn(g));
    }
  }
  return gids;
}

std::map<std::string, Term> Engine::spawn_text(const std::string& text) {
  ParsedTerm pt = parse_term(text);
  uint64_t base = ids_->peek();
  if (pt.nvars) ids_->observe(base + pt.nvars - 1);
  Term goal = rename_term(pt.term, base);
  std::map<std::string, Term> vars;
  for (const auto& [name, id] : pt.names) vars.emplace(name, Term::writer(base + id - 1));
  spawn_conjunction(goal);
  return vars;
}

std::vector<Term> Engine::outside_readers(const Term& t, const View& v, uint64_t local_from) const {
  std::vector<Term> all, out;
  frontier_readers(t, v, all);
  for (const auto& r : all)
    if (r.id() < local_from) out.push_back(r);
  return out;
}

Engine::GuardResult Engine::unify_guard(const Term& a, const Term& b, const Tentative& tentative,
                                        uint64_t local_from) const {
  GuardResult r;
  UnifyOutcome u = writer_unify(a, b, View(store_, &tentative), UnifyOptions{local_from});
  if (u.success()) {
    r.kind = TryOutcome::Kind::Commit;
    r.bindings = std::move(u.bindings);
  } else if (u.suspended()) {
    r.kind = TryOutcome::Kind::Suspend;
    r.blockers = std::move(u.blockers);
  } else {
    r.kind = TryOutcome::Kind::Fail;
  }
  return r;
}

Engine::GuardResult Engine::eval_guard(const Term& call, Tentative& tentative, uint64_t local_from,
                                       uint64_t& next_local, const std::vector<TryOutcome>& earlier) const {
  using K = TryOutcome::Kind;
  View v(store_, &tentative);
  GuardResult r;
  const std::string& name = call.name();
  size_t n = call.arity();
  auto suspend_or_fail = [&](std::vector<Term> blockers) {
    r.kind = blockers.empty() ? K::Fail : K::Suspend;
    r.blockers = std::move(blockers);
    return r;
  };

  if (name == "otherwise" && n == 0) {
    bool any_suspend = false;
    for (const auto& o : earlier)
      if (o.kind == K::Suspend) {
        any_suspend = true;
        append_unique(r.blockers, o.blockers);
      }
    r.kind = any_suspend ? K::Suspend : K::Commit;
    return r;
  }
  if (n == 1 && (name == "ground" || name == "known" || name == "unknown" || name == "writer" || name == "reader")) {
    Term d = v.deref(call.arg(0));
    if (name == "ground") {
      if (is_ground(d, v)) return r;
      return suspend_or_fail(outside_readers(d, v, local_from));
    }
    if (name == "known") {
      if (!d.is_var()) return r;
      if (d.is_reader() && d.id() < local_from) return suspend_or_fail({d});
      r.kind = K::Fail;
      return r;
    }
    bool ok = name == "unknown" ? d.is_var() : name == "writer" ? d.is_writer() : d.is_reader();
    r.kind = ok ? K::Commit : K::Fail;
    return r;
  }
  if (n == 2 && name == "=") return unify_guard(call.arg(0), call.arg(1), tentative, local_from);
  if (n == 2 && name == "=\\=") {
    GuardResult u = unify_guard(call.arg(0), call.arg(1), tentative, local_from);
    if (u.kind == K::Suspend) return u;
    r.kind = u.kind == K::Commit ? K::Fail : K::Commit;
    return r;
  }
  if (n == 2 && is_comparison(name)) {
    Term a = v.resolve(call.arg(0)), b = v.resolve(call.arg(1));
    if (!is_ground(a, v) || !is_ground(b, v)) {
      auto blockers = outside_readers(a, v, local_from);
      append_unique(blockers, outside_readers(b, v, local_from));
      return suspend_or_fail(std::move(blockers));
    }
    auto x = eval_arith(a), y = eval_arith(b);
    r.kind = x && y && compare_numbers(name, *x, *y) ? K::Commit : K::Fail;
    return r;
  }
  if (n == 2 && name == "attestation") {
    Term x = v.resolve(call.arg(0));
    SelfAttestation self(program_->hash());
    auto att = attest_ ? attest_->attestation(x, v) : self.attestation(x, v);
    if (!att) {
      r.kind = K::Fail;
      return r;
    }
    return unify_guard(call.arg(1), *att, tentative, local_from);
  }
  if (n == 1 && name == "module") return unify_guard(call.arg(0), Term::constant(program_->hash()), tentative, local_from);

  // Defined guard predicate: fold its unit clauses in order.
  const auto* proc = program_->procedure(call.indicator());
  if (!proc) {
    r.kind = K::Fail;
    return r;
  }
  std::vector<Term> blockers;
  for (size_t ci : *proc) {
    const Clause& c = program_->clause(ci);
    Term head = rename_term(c.head, next_local);
    UnifyOutcome u = writer_unify(call, head, v, UnifyOptions{local_from});
    if (u.success()) {
      next_local += c.nvars;
      r.kind = K::Commit;
      r.bindings = std::move(u.bindings);
      return r;
    }
    if (u.suspended()) append_unique(blockers, u.blockers);
  }
  return suspend_or_fail(std::move(blockers));
}

TryOutcome Engine::try_clause(const Term& goal, size_t clause_index, const std::vector<TryOutcome>& earlier) const {
  using K = TryOutcome::Kind;
  const Clause& c = program_->clause(clause_index);
  uint64_t base = ids_->peek();
  TryOutcome out;
  out.head = rename_term(c.head, base);
  std::vector<Term> guards;
  for (const auto& g : c.guard) guards.push_back(rename_term(g, base));
  for (const auto& b : c.body) out.body_goals.push_back(rename_term(b, base));
  out.guard = Term::list(guards);
  out.body = Term::list(out.body_goals);
  uint64_t next_local = base + c.nvars;
  out.max_id = next_local - 1;

  UnifyOutcome u = writer_unify(goal, out.head, View(store_), UnifyOptions{base});
  if (u.failed()) {
    out.kind = K::Fail;
    out.reason = std::string("head-") + fail_reason_name(u.reason);
    return out;
  }
  if (u.suspended()) {
    out.kind = K::Suspend;
    out.blockers = std::move(u.blockers);
    return out;
  }
  Tentative tentative;
  for (const auto& [id, val] : u.bindings) tentative.emplace(id, val);
  out.bindings = std::move(u.bindings);
  bool suspended = false;
  for (const auto& g : guards) {
    GuardResult r = eval_guard(g, tentative, base, next_local, earlier);
    if (r.kind == K::Fail) {
      out.kind = K::Fail;
      out.reason = "guard-" + g.name();
      out.blockers.clear();
      return out;
    }
    if (r.kind == K::Suspend) {
      suspended = true;
      append_unique(out.blockers, r.blockers);
      continue;
    }
    for (auto& [id, val] : r.bindings) {
      tentative.emplace(id, val);
      out.bindings.emplace_back(id, val);
    }
  }
  out.max_id = next_local - 1;
  out.kind = suspended ? K::Suspend : K::Commit;
  if (suspended) out.bindings.clear();
  return out;
}

std::vector<size_t> Engine::committable(const Term& goal) const {
  std::vector<size_t> out;
  const auto* proc = program_->procedure(goal.indicator());
  if (!proc) return out;
  std::vector<TryOutcome> earlier;
  for (size_t ci : *proc) {
    TryOutcome o = try_clause(goal, ci, earlier);
    if (o.kind == TryOutcome::Kind::Commit) out.push_back(ci);
    earlier.push_back(std::move(o));
  }
  return out;
}

std::vector<Term> Engine::filter_blockers(const std::vector<Term>& blockers) const {
  std::vector<Term> out;
  for (const auto& b : blockers)
    if (!store_.is_abandoned(VarKey{b.id(), true}) && !store_.bound(b.id())) out.push_back(b);
  return out;
}

std::vector<uint64_t> Engine::wake(uint64_t id) {
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

void Engine::commit(StepInfo& info, const std::vector<std::pair<uint64_t, Term>>& bindings,
                    const std::vector<Term>& body, const std::vector<VarKey>& before) {
  info.kind = StepInfo::Kind::Reduce;
  info.bindings = bindings;
  for (const auto& [id, val] : bindings) store_.bind(id, val);
  std::vector<uint64_t> woken;
  for (const auto& [id, val] : bindings) {
    auto w = wake(id);
    woken.insert(woken.end(), w.begin(), w.end());
  }
  info.record.set("first", std::to_string(next_gid_));
  for (const auto& b : body) spawn(b);

  // Abandonment: a variable of the goal that is neither instantiated nor carried into the
  // body or into a value handed out through the goal's own writers has vanished.
  std::unordered_set<VarKey, VarKeyHash> survivors;
  std::unordered_set<uint64_t> goal_ids;
  for (const auto& k : before) goal_ids.insert(k.id);
  std::vector<Term> vars;
  for (const auto& b : body) collect_vars(resolve(b), vars);
  for (const auto& [id, val] : bindings)
    if (goal_ids.count(id)) collect_vars(resolve(Term::writer(id)), vars);
  for (const auto& v : vars) survivors.insert(key_of(v));
  for (const auto& k : before) {
    if (store_.bound(k.id) || survivors.count(k)) continue;
    VarKey other{k.id, !k.reader};
    if (store_.is_abandoned(other)) continue;
    store_.abandon(other);
    info.abandoned.push_back(other);
    if (other.reader) {
      auto w = wake(k.id);
      woken.insert(woken.end(), w.begin(), w.end());
    }
  }
  std::sort(woken.begin(), woken.end());
  woken.erase(std::unique(woken.begin(), woken.end()), woken.end());
  for (uint64_t gid : woken) {
    auto it = suspended_.find(gid);
    if (it == suspended_.end()) continue;
    queue_.push_back(it->second.first);
    suspended_.erase(it);
  }
  ++reductions_;
  std::vector<Term> ab;
  for (const auto& k : info.abandoned) ab.push_back(var_of_key(k));
  info.record.set("sigma", sigma_term(bindings));
  info.record.set("abandoned", list_field(ab));
}

void Engine::suspend(StepInfo& info, const Goal& g, std::vector<Term> blockers) {
  info.kind = StepInfo::Kind::Suspend;
  info.record.kind = "suspend";
  for (const auto& b : blockers) waiting_[b.id()].push_back(g.gid);
  info.record.set("blockers", list_field(blockers));
  info.blockers = blockers;
  suspended_.emplace(g.gid, std::make_pair(g, std::move(blockers)));
}

void Engine::fail(StepInfo& info, const Goal& g, const std::string& reason) {
  info.kind = StepInfo::Kind::Fail;
  info.record.kind = "fail";
  failed_.emplace_back(g, reason);
  std::vector<Term> vars;
  collect_vars(resolve(g.atom), vars);
  std::vector<Term> ab;
  std::vector<uint64_t> woken;
  for (const auto& v : vars) {
    VarKey other{v.id(), !v.is_reader()};
    if (store_.is_abandoned(other)) continue;
    store_.abandon(other);
    info.abandoned.push_back(other);
    ab.push_back(var_of_key(other));
    if (other.reader) {
      auto w = wake(v.id());
      woken.insert(woken.end(), w.begin(), w.end());
    }
  }
  std::sort(woken.begin(), woken.end());
  for (uint64_t gid : woken) {
    auto it = suspended_.find(gid);
    if (it == suspended_.end()) continue;
    queue_.push_back(it->second.first);
    suspended_.erase(it);
  }
  info.record.set("reason", reason);
  info.record.set("abandoned", list_field(ab));
}

StepInfo Engine::reduce_builtin(const Goal& g, const Term& resolved, uint64_t stepno) {
  StepInfo info;
  info.goal = g;
  info.record.step = stepno;
  info.record.agent = agent_;
  info.record.kind = "reduce";
  info.record.set("gid", std::to_string(g.gid));
  info.record.set("goal", resolved);
  info.record.set("clause", "builtin");
  std::vector<Term> before_vars;
  collect_vars(resolved, before_vars);
  std::vector<VarKey> before;
  for (const auto& v : before_vars) before.push_back(key_of(v));

  const std::string& name = g.atom.name();
  View v(store_);
  UnifyOutcome u;
  if (name == "=") {
    u = writer_unify(g.atom.arg(0), g.atom.arg(1), v);
  } else if (name == "evaluate") {
    Term e = resolved.arg(0);
    if (!is_ground(e, v)) {
      std::vector<Term> readers;
      frontier_readers(e, v, readers);
      readers = filter_blockers(readers);
      if (readers.empty()) fail(info, g, "evaluate-non-ground");
      else suspend(info, g, std::move(readers));
      return info;
    }
    std::string why;
    auto val = eval_arith(e, &why);
    if (!val) {
      fail(info, g, why);
      return info;
    }
    u = writer_unify(g.atom.arg(1), Term::number(*val), v);
  } else if (name == "current_time") {
    u = writer_unify(g.atom.arg(0), Term::number(static_cast<long>(stepno)), v);
  } else {
    Term d = v.deref(g.atom.arg(0));
    if (!d.is_var()) {
      fail(info, g, "not-a-variable");
      return info;
    }
    u = writer_unify(g.atom.arg(1), Term::constant(to_string(d)), v);
  }
  if (u.success()) {
    commit(info, u.bindings, {}, before);
    info.record.set("body", "[]");
  } else if (u.suspended()) {
    auto b = filter_blockers(u.blockers);
    if (b.empty()) fail(info, g, "abandoned");
    else suspend(info, g, std::move(b));
  } else {
    fail(info, g, fail_reason_name(u.reason));
  }
  return info;
}

StepInfo Engine::step(uint64_t stepno) {
  using K = TryOutcome::Kind;
  Goal g = queue_.front();
  queue_.pop_front();
  clock_ = stepno;
  Term resolved = resolve(g.atom);
  if ((g.atom.is_compound() || g.atom.is_constant()) && is_body_builtin(g.atom.name(), g.atom.arity()))
    return reduce_builtin(g, resolved, stepno);

  StepInfo info;
  info.goal = g;
  info.record.step = stepno;
  info.record.agent = agent_;
  info.record.kind = "reduce";
  info.record.set("gid", std::to_string(g.gid));
  info.record.set("goal", resolved);

  const auto* proc = (g.atom.is_compound() || g.atom.is_constant()) ? program_->procedure(g.atom.indicator()) : nullptr;
  if (!proc) {
    fail(info, g, "unknown-procedure");
    return info;
  }
  std::vector<TryOutcome> earlier;
  for (size_t ci : *proc) {
    TryOutcome o = try_clause(g.atom, ci, earlier);
    if (o.kind == K::Commit) {
      if (o.max_id >= ids_->peek()) ids_->observe(o.max_id);
      std::vector<Term> before_vars;
      collect_vars(resolved, before_vars);
      std::vector<VarKey> before;
      for (const auto& v : before_vars) before.push_back(key_of(v));
      info.record.set("clause", std::to_string(ci));
      info.record.set("head", o.head);
      info.record.set("guard", o.guard);
      info.record.set("body", o.body);
      commit(info, o.bindings, o.body_goals, before);
      return info;
    }
    earlier.push_back(std::move(o));
  }
  std::vector<Term> blockers;
  std::string reason = "no-clause";
  for (const auto& o : earlier) {
    if (o.kind == K::Suspend) append_unique(blockers, o.blockers);
  }
  auto live = filter_blockers(blockers);
  if (!live.empty()) {
    suspend(info, g, std::move(live));
  } else {
    if (!blockers.empty()) reason = "abandoned";
    fail(info, g, reason);
  }
  return info;
}

std::vector<uint64_t> Engine::deliver(uint64_t id, const Term& value) {
  store_.bind(id, value);
  auto woken = wake(id);
  for (uint64_t gid : woken) {
    auto it = suspended_.find(gid);
    queue_.push_back(it->second.first);
    suspended_.erase(it);
  }
  return woken;
}

std::vector<uint64_t> Engine::abandon(VarKey k) {
  std::vector<uint64_t> woken;
  if (store_.is_abandoned(k)) return woken;
  store_.abandon(k);
  if (!k.reader) return woken;
  woken = wake(k.id);
  for (uint64_t gid : woken) {
    auto it = suspended_.find(gid);
    queue_.push_back(it->second.first);
    suspended_.erase(it);
  }
  return woken;
}

std::vector<Goal> Engine::resolvent() const {
  std::vector<Goal> out(queue_.begin(), queue_.end());
  for (const auto& [gid, entry] : suspended_) out.push_back(entry.first);
  return out;
}

RunStatus Engine::status() const {
  if (!queue_.empty()) return RunStatus::Running;
  if (!failed_.empty()) return RunStatus::Failed;
  if (!suspended_.empty()) return RunStatus::Deadlock;
  return RunStatus::QuiescentSuccess;
}

RunStatus Engine::run(uint64_t fuel, std::vector<TraceRecord>* trace) {
  if (trace && clock_ == 0) {
    for (const auto& g : queue_) {
      TraceRecord r;
      r.step = 0;
      r.agent = agent_;
      r.kind = "inject";
      r.set("gid", std::to_string(g.gid));
      r.set("boot", resolve(g.atom));
      trace->push_back(std::move(r));
    }
  }
  uint64_t steps = 0;
  while (!queue_.empty() && steps < fuel) {
    ++steps;
    StepInfo info = step(clock_ + 1);
    if (trace) trace->push_back(std::move(info.record));
  }
  if (!queue_.empty()) return RunStatus::FuelExhausted;
  return status();
}

}  // namespace glp

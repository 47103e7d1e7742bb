#include "glp/verifier.hpp"

#include "glp/arith.hpp"
#include "glp/engine.hpp"
#include "glp/lp_oracle.hpp"
#include "glp/parser.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace glp {

std::string Verdict::str() const {
  std::string out = "check=" + check + " result=" + (ok ? "pass" : "fail");
  if (!ok) out += " step=" + std::to_string(step);
  out += " detail=" + quote_atom(detail);
  return out;
}

const Program* ProgramSet::of(const std::string& agent) const {
  auto it = by_agent.find(agent);
  return it != by_agent.end() ? it->second : fallback;
}

namespace {

using Store = std::unordered_map<uint64_t, Term>;

struct Malformed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A record with every field that reads as a canonical term already parsed.
struct Rec {
  const TraceRecord* r = nullptr;
  std::map<std::string, Term> t;

  const Term* get(const std::string& k) const {
    auto it = t.find(k);
    return it == t.end() ? nullptr : &it->second;
  }
  const Term& at(const std::string& k) const {
    auto* v = get(k);
    if (!v) throw Malformed("step " + std::to_string(r->step) + ": " + r->kind + " record lacks " + k);
    return *v;
  }
  uint64_t num(const std::string& k) const {
    const Term& v = at(k);
    if (!v.is_number()) throw Malformed("step " + std::to_string(r->step) + ": field " + k + " is not a number");
    return std::stoull(v.num().str());
  }
};

std::vector<Rec> parse_all(const std::vector<TraceRecord>& trace) {
  std::vector<Rec> out;
  out.reserve(trace.size());
  for (const auto& r : trace) {
    Rec p;
    p.r = &r;
    for (const auto& [k, v] : r.fields) {
      try {
        p.t.emplace(k, parse_term(v, true).term);
      } catch (const std::exception&) {
        // plain tokens such as module hashes stay unparsed
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Term> list_items(const Term& t) {
  std::vector<Term> out;
  Term c = t;
  while (c.is_cons()) {
    out.push_back(c.arg(0));
    c = c.arg(1);
  }
  return out;
}

std::vector<std::pair<uint64_t, Term>> equations(const Term& sigma) {
  std::vector<std::pair<uint64_t, Term>> out;
  for (const auto& e : list_items(sigma)) {
    if (!(e.is_compound() && e.name() == "=" && e.arity() == 2 && e.arg(0).is_var()))
      throw Malformed("sigma entry " + to_string(e) + " is not Var = Term");
    out.emplace_back(e.arg(0).id(), e.arg(1));
  }
  return out;
}

std::string var_str(VarKey k) { return to_string(k.reader ? Term::reader(k.id) : Term::writer(k.id)); }

// Dereference through a store, noting any cycle instead of looping.
Term resolve(const Term& t, const Store& s, bool& cycle, std::unordered_set<uint64_t>& path) {
  if (t.is_var()) {
    auto it = s.find(t.id());
    if (it == s.end()) return t;
    if (!path.insert(t.id()).second) {
      cycle = true;
      return t;
    }
    Term r = resolve(it->second, s, cycle, path);
    path.erase(t.id());
    return r;
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(resolve(a, s, cycle, path));
  return Term::compound(t.name(), std::move(args));
}

Term resolve(const Term& t, const Store& s, bool* cycle = nullptr) {
  bool c = false;
  std::unordered_set<uint64_t> path;
  Term r = resolve(t, s, c, path);
  if (cycle) *cycle = c;
  return r;
}

// Unbound occurrences per variable half, dereferencing through the store.
void count_occurrences(const Term& t, const Store& s, std::map<VarKey, int>& counts, std::unordered_set<uint64_t>& path,
                       bool& cycle) {
  if (t.is_var()) {
    auto it = s.find(t.id());
    if (it == s.end()) {
      ++counts[key_of(t)];
      return;
    }
    if (!path.insert(t.id()).second) {
      cycle = true;
      return;
    }
    count_occurrences(it->second, s, counts, path, cycle);
    path.erase(t.id());
    return;
  }
  if (t.is_compound())
    for (const auto& a : t.args()) count_occurrences(a, s, counts, path, cycle);
}

struct AgentState {
  std::map<uint64_t, Term> goals;  // live goals by gid, as introduced
  Store store;
  std::set<VarKey> abandoned;
  std::map<VarKey, int> counts;  // from the last scan
};

struct Conflict {
  uint64_t step;
  uint64_t id;
  std::string agent;
};

// Rebuilds every agent's resolvent and store from the records alone.
class Replay {
public:
  std::map<std::string, AgentState> agents;
  std::vector<Conflict> conflicts;  // a second binding for an already bound id in one store
  uint64_t max_id = 0;              // largest variable id in the records applied so far

  void apply(const Rec& p) {
    const TraceRecord& r = *p.r;
    AgentState& a = agents[r.agent];
    const std::string& kind = r.kind;
    if (kind == "inject") {
      if (p.get("gid")) a.goals[p.num("gid")] = p.at("boot");
      if (auto* s = p.get("sigma")) bind_all(a, r, *s);
    } else if (kind == "reduce") {
      uint64_t gid = p.num("gid");
      if (!a.goals.erase(gid)) throw Malformed("step " + std::to_string(r.step) + ": reduce of unknown goal " + std::to_string(gid));
      bind_all(a, r, p.at("sigma"));
      auto body = list_items(p.at("body"));
      uint64_t first = body.empty() && !p.get("first") ? 0 : p.num("first");
      for (size_t i = 0; i < body.size(); ++i) a.goals[first + i] = body[i];
    } else if (kind == "suspend") {
      if (!a.goals.count(p.num("gid")))
        throw Malformed("step " + std::to_string(r.step) + ": suspend of unknown goal " + std::to_string(p.num("gid")));
    } else if (kind == "fail") {
      if (!a.goals.erase(p.num("gid")))
        throw Malformed("step " + std::to_string(r.step) + ": fail of unknown goal " + std::to_string(p.num("gid")));
    } else if (kind == "communicate") {
      if (auto* s = p.get("sigma")) bind_all(a, r, *s);
    }
    if (auto* ab = p.get("abandoned"))
      for (const auto& v : list_items(*ab))
        if (v.is_var()) a.abandoned.insert(key_of(v));
    if (auto* ret = p.get("returned"))
      for (const auto& e : list_items(*ret)) {
        if (e.is_compound() && e.name() == "=" && e.arity() == 2) bind(a, r, e.arg(0).id(), e.arg(1));
        else if (e.is_compound() && e.name() == "abandoned" && e.arity() == 1) a.abandoned.insert(key_of(e.arg(0)));
      }
    if (auto* sp = p.get("spawned"))
      for (const auto& s : list_items(*sp)) {
        if (!(s.is_compound() && s.name() == "spawn" && s.arity() == 2 && s.arg(0).is_number()))
          throw Malformed("step " + std::to_string(r.step) + ": bad spawned entry");
        a.goals[std::stoull(s.arg(0).num().str())] = s.arg(1);
      }
    for (const auto& [k, t] : p.t) max_id = std::max(max_id, lp::max_var_id(t));
  }

  // Recount unbound occurrences in one agent's goals; false on a cyclic binding.
  bool scan(AgentState& a) const {
    a.counts.clear();
    bool cycle = false;
    std::unordered_set<uint64_t> path;
    for (const auto& [gid, g] : a.goals) count_occurrences(g, a.store, a.counts, path, cycle);
    return !cycle;
  }

  // Halves held unbound more than once across all agents' goals, among those in `a`.
  std::vector<std::pair<VarKey, int>> duplicates(const AgentState& a) const {
    std::vector<std::pair<VarKey, int>> out;
    for (const auto& [k, n] : a.counts) {
      int total = 0;
      for (const auto& [name, other] : agents) {
        auto it = other.counts.find(k);
        if (it != other.counts.end()) total += it->second;
      }
      if (total > 1) out.emplace_back(k, total);
    }
    return out;
  }

private:
  void bind(AgentState& a, const TraceRecord& r, uint64_t id, const Term& v) {
    if (!a.store.emplace(id, v).second) conflicts.push_back({r.step, id, r.agent});
  }
  void bind_all(AgentState& a, const TraceRecord& r, const Term& sigma) {
    for (const auto& [id, v] : equations(sigma)) bind(a, r, id, v);
  }
};

Verdict pass(const std::string& check, std::string detail) { return Verdict{check, true, 0, std::move(detail)}; }
Verdict failure(const std::string& check, uint64_t step, std::string detail) {
  return Verdict{check, false, step, std::move(detail)};
}

// Structural template/instance match: returns the offset that maps template ids onto the
// instance, or nullopt if the two do not line up.
bool find_base(const Term& tmpl, const Term& inst, std::optional<uint64_t>& base) {
  if (tmpl.is_var()) {
    if (!inst.is_var() || inst.kind() != tmpl.kind()) return false;
    if (inst.id() < tmpl.id()) return false;
    uint64_t b = inst.id() - tmpl.id() + 1;
    if (!base) base = b;
    return *base == b;
  }
  if (tmpl.kind() != inst.kind()) return false;
  if (!tmpl.is_compound()) return tmpl == inst;
  if (tmpl.name() != inst.name() || tmpl.arity() != inst.arity()) return false;
  for (size_t i = 0; i < tmpl.arity(); ++i)
    if (!find_base(tmpl.arg(i), inst.arg(i), base)) return false;
  return true;
}

Term renamed(const Term& t, uint64_t base) {
  if (t.is_writer()) return Term::writer(base + t.id() - 1);
  if (t.is_reader()) return Term::reader(base + t.id() - 1);
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(renamed(a, base));
  return Term::compound(t.name(), std::move(args));
}

void var_ids(const Term& t, std::set<uint64_t>& out) {
  if (t.is_var()) out.insert(t.id());
  else if (t.is_compound())
    for (const auto& a : t.args()) var_ids(a, out);
}

bool is_test_guard(const std::string& name, size_t n) {
  if (n == 0) return name == "otherwise" || name == "true";
  if (n == 1) return name == "ground" || name == "known" || name == "unknown" || name == "writer" || name == "reader";
  return n == 2 && (name == "=\\=" || is_comparison(name));
}

// One reduce record as an LP resolution step under the pure logic variant.
std::string check_reduction(const Rec& p, const Term& goal, const Program& prog, const Store& store, uint64_t seen_max) {
  const TraceRecord& r = *p.r;
  auto sigma = equations(p.at("sigma"));
  lp::Subst theta;
  // Values may mention variables bound by earlier steps; those are read through the store.
  for (const auto& [id, v] : sigma)
    if (!theta.emplace(id, lp::pure(resolve(v, store))).second) return "sigma binds _W" + std::to_string(id) + " twice";
  std::vector<std::pair<Term, Term>> eqs;
  std::vector<Term> parts{lp::pure(goal)};

  const std::string& clause = r.at("clause");
  if (clause == "builtin") {
    const std::string& name = goal.name();
    if (name == "=" && goal.arity() == 2) {
      eqs.emplace_back(lp::pure(goal.arg(0)), lp::pure(goal.arg(1)));
    } else if (name == "evaluate" && goal.arity() == 2) {
      auto val = eval_arith(goal.arg(0));
      if (!val) return "evaluate committed on an expression without a value";
      eqs.emplace_back(lp::pure(goal.arg(1)), Term::number(*val));
    } else if ((name == "current_time" && goal.arity() == 1) || (name == "variable_name" && goal.arity() == 2)) {
      // system predicates are axioms: whatever they bind, they bind in their own argument
      const Term& out = goal.arg(goal.arity() - 1);
      for (const auto& [id, v] : sigma)
        if (!out.is_var() || id != out.id()) return name + " bound a variable outside its output argument";
      return {};
    } else {
      return "builtin reduction of " + goal.indicator();
    }
  } else {
    size_t ci = std::stoull(clause);
    if (ci >= prog.clauses().size()) return "clause index " + clause + " out of range";
    const Clause& c = prog.clause(ci);
    if (c.head.indicator() != goal.indicator()) return "clause " + clause + " does not define " + goal.indicator();
    const Term& head = p.at("head");
    auto guard = list_items(p.at("guard"));
    auto body = list_items(p.at("body"));
    std::optional<uint64_t> base;
    bool lined_up = find_base(c.head, head, base) && guard.size() == c.guard.size() && body.size() == c.body.size();
    for (size_t i = 0; lined_up && i < guard.size(); ++i) lined_up = find_base(c.guard[i], guard[i], base);
    for (size_t i = 0; lined_up && i < body.size(); ++i) lined_up = find_base(c.body[i], body[i], base);
    if (!lined_up) return "recorded clause is not a renaming of clause " + clause;
    uint64_t b = base.value_or(seen_max + 1);
    if (c.nvars && b <= seen_max) return "clause variables _W" + std::to_string(b) + ".. were not fresh";
    if (renamed(c.head, b) != head) return "recorded head is not the renamed clause head";

    eqs.emplace_back(lp::pure(goal), lp::pure(head));
    parts.push_back(lp::pure(head));
    uint64_t next_local = b + c.nvars;
    for (const auto& g : guard) {
      const std::string& name = g.name();
      size_t n = g.arity();
      parts.push_back(lp::pure(g));
      if (is_test_guard(name, n)) continue;
      if (name == "=" && n == 2) {
        eqs.emplace_back(lp::pure(g.arg(0)), lp::pure(g.arg(1)));
      } else if (name == "module" && n == 1) {
        eqs.emplace_back(lp::pure(g.arg(0)), Term::constant(prog.hash()));
      } else if (name == "attestation" && n == 2) {
        // the attestation is an axiom supplied by the runtime
        eqs.emplace_back(lp::pure(g.arg(1)), lp::apply(lp::pure(g.arg(1)), theta));
      } else if (const auto* proc = prog.procedure(g.indicator())) {
        bool found = false;
        for (size_t gi : *proc) {
          const Clause& gc = prog.clause(gi);
          Term gh = lp::pure(renamed(gc.head, next_local));
          auto trial = eqs;
          trial.emplace_back(lp::pure(g), gh);
          if (!lp::mgu_all(trial)) continue;
          eqs = std::move(trial);
          parts.push_back(gh);
          next_local += gc.nvars;
          found = true;
          break;
        }
        if (!found) return "guard " + to_string(g) + " has no unifying clause";
      } else {
        return "guard " + to_string(g) + " is not defined";
      }
    }
    for (const auto& x : body) parts.push_back(lp::pure(x));
  }

  auto mu = lp::mgu_all(eqs);
  if (!mu) return "goal and clause have no unifier";
  for (const auto& [a, b] : eqs)
    if (lp::apply(a, theta) != lp::apply(b, theta)) return "sigma does not unify " + to_string(a) + " with " + to_string(b);
  Term config = Term::compound("config", parts);
  std::set<uint64_t> ids;
  var_ids(config, ids);
  for (const auto& [id, v] : theta)
    if (!ids.count(id)) return "sigma binds _W" + std::to_string(id) + ", which the step does not mention";
  if (!lp::is_variant(lp::apply(config, theta), lp::apply(config, *mu))) return "sigma is not a most general unifier";
  return {};
}

std::vector<size_t> sample_positions(size_t n, uint64_t samples, uint64_t seed) {
  std::vector<size_t> all(n);
  for (size_t i = 0; i < n; ++i) all[i] = i;
  if (n <= samples) return all;
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(samples);
  std::sort(all.begin(), all.end());
  return all;
}

Term block_payload_edges(const Term& cell, std::vector<std::string>& tips) {
  const Term& block = cell.arg(0);
  for (const auto& t : list_items(block.arg(1)))
    if (t.is_compound() && t.name() == "block" && t.arity() == 2) tips.push_back(to_string(t.arg(0)));
  return block.arg(0);
}

}  // namespace

Verdict verify_srsw(const std::vector<TraceRecord>& trace) {
  const std::string name = "srsw";
  try {
    auto recs = parse_all(trace);
    Replay rp;
    for (const auto& p : recs) {
      rp.apply(p);
      AgentState& a = rp.agents[p.r->agent];
      rp.scan(a);
      auto d = rp.duplicates(a);
      if (!d.empty())
        return failure(name, p.r->step,
                       var_str(d.front().first) + " occurs " + std::to_string(d.front().second) + " times unbound");
    }
    return pass(name, std::to_string(trace.size()) + " records");
  } catch (const std::exception& e) {
    return failure(name, 0, std::string("malformed trace: ") + e.what());
  }
}

Verdict verify_acyclic(const std::vector<TraceRecord>& trace) {
  const std::string name = "acyclic";
  try {
    auto recs = parse_all(trace);
    Replay rp;
    for (const auto& p : recs) {
      rp.apply(p);
      AgentState& a = rp.agents[p.r->agent];
      if (auto* s = p.get("sigma"))
        for (const auto& [id, v] : equations(*s)) {
          bool cycle = false;
          Term val = resolve(v, a.store, &cycle);
          if (cycle || occurs(id, val)) return failure(name, p.r->step, "_W" + std::to_string(id) + " is bound to a term containing itself");
        }
      if (!rp.scan(a)) return failure(name, p.r->step, "a goal of " + p.r->agent + " reaches a cyclic binding");
    }
    return pass(name, std::to_string(trace.size()) + " records");
  } catch (const std::exception& e) {
    return failure(name, 0, std::string("malformed trace: ") + e.what());
  }
}

Verdict verify_deduction(const std::vector<TraceRecord>& trace, const ProgramSet& programs) {
  const std::string name = "deduction";
  try {
    auto recs = parse_all(trace);
    Replay rp;
    size_t reductions = 0, messages = 0;
    for (const auto& p : recs) {
      const TraceRecord& r = *p.r;
      AgentState& a = rp.agents[r.agent];
      if (r.kind == "reduce") {
        const Program* prog = programs.of(r.agent);
        if (!prog) return failure(name, r.step, "no program for agent " + r.agent);
        uint64_t gid = p.num("gid");
        auto g = a.goals.find(gid);
        if (g == a.goals.end()) return failure(name, r.step, "reduce of unknown goal " + std::to_string(gid));
        bool cycle = false;
        Term goal = resolve(g->second, a.store, &cycle);
        if (cycle || goal != p.at("goal")) return failure(name, r.step, "recorded goal differs from the replayed resolvent");
        std::string why = check_reduction(p, goal, *prog, a.store, rp.max_id);
        if (!why.empty()) return failure(name, r.step, why);
        ++reductions;
      } else if (r.kind == "communicate" && p.get("sigma")) {
        // A delivered value must agree, as a logic term, with the sender's own assignment.
        const std::string& from = r.at("from");
        AgentState& sender = rp.agents[from];
        for (const auto& [id, v] : equations(p.at("sigma"))) {
          auto it = sender.store.find(id);
          if (it == sender.store.end()) continue;
          Term sent = lp::pure(resolve(it->second, sender.store));
          Term got = lp::pure(resolve(v, a.store));
          if (!lp::mgu(sent, got)) return failure(name, r.step, "delivered value for _W" + std::to_string(id) + " contradicts the sender");
        }
        ++messages;
      } else if (r.kind == "network" && p.get("payload")) {
        if (!lp::mgu(lp::pure(p.at("element")), lp::pure(p.at("payload"))))
          return failure(name, r.step, "network payload is not the stream element");
        ++messages;
      }
      rp.apply(p);
    }
    return pass(name, std::to_string(reductions) + " reductions, " + std::to_string(messages) + " messages");
  } catch (const std::exception& e) {
    return failure(name, 0, std::string("malformed trace: ") + e.what());
  }
}

Verdict verify_monotonicity(const std::vector<TraceRecord>& trace, const ProgramSet& programs, uint64_t samples,
                            uint64_t seed) {
  const std::string name = "monotonicity";
  try {
    auto recs = parse_all(trace);
    auto at = sample_positions(recs.size(), samples, seed);
    Replay rp;
    std::map<std::pair<std::string, uint64_t>, std::vector<size_t>> seen;
    size_t next = 0, checked = 0;
    for (size_t i = 0; i < recs.size(); ++i) {
      rp.apply(recs[i]);
      if (next >= at.size() || at[next] != i) continue;
      ++next;
      for (auto& [agent, a] : rp.agents) {
        const Program* prog = programs.of(agent);
        if (!prog) continue;
        IdSource ids;
        ids.observe(rp.max_id + 1);
        Engine e(*prog, ids, agent);
        for (const auto& [id, v] : a.store) e.deliver(id, v);
        for (const auto& k : a.abandoned) e.abandon(k);
        for (const auto& [gid, g] : a.goals) {
          if (!(g.is_compound() || g.is_constant()) || is_body_builtin(g.name(), g.arity())) continue;
          auto now = e.committable(g);
          auto& before = seen[{agent, gid}];
          for (size_t c : before)
            if (std::find(now.begin(), now.end(), c) == now.end())
              return failure(name, recs[i].r->step,
                             "goal " + std::to_string(gid) + " of " + agent + " lost clause " + std::to_string(c) + ": " +
                                 to_string(e.resolve(g)));
          before = std::move(now);
          ++checked;
        }
      }
    }
    return pass(name, std::to_string(at.size()) + " samples, " + std::to_string(checked) + " goal checks");
  } catch (const std::exception& e) {
    return failure(name, 0, std::string("malformed trace: ") + e.what());
  }
}

Verdict verify_streams(const std::vector<TraceRecord>& trace) {
  const std::string name = "streams";
  try {
    auto recs = parse_all(trace);
    Replay rp;
    std::map<uint64_t, uint64_t> assigned;  // id -> step of its assignment by a reduction
    std::set<uint64_t> tails;               // pairs that are the tail of some list cell
    std::map<std::string, uint64_t> created;
    std::map<std::string, std::vector<std::string>> edges;
    size_t envelopes = 0;
    for (const auto& p : recs) {
      const TraceRecord& r = *p.r;
      rp.apply(p);
      if (!rp.conflicts.empty()) {
        const Conflict& c = rp.conflicts.front();
        return failure(name, c.step, "immutability: _W" + std::to_string(c.id) + " assigned twice at " + c.agent);
      }
      AgentState& a = rp.agents[r.agent];
      if (r.kind == "reduce" || (r.kind == "inject" && p.get("sigma"))) {
        for (const auto& [id, v] : equations(p.at("sigma"))) {
          auto [it, fresh] = assigned.emplace(id, r.step);
          if (!fresh)
            return failure(name, r.step,
                           "immutability: _W" + std::to_string(id) + " already assigned at step " + std::to_string(it->second));
        }
      }
      if (auto* s = p.get("sigma")) {
        for (const auto& [id, v] : equations(*s)) {
          Term val = resolve(v, a.store);
          if (!val.is_cons()) continue;
          if (val.arg(1).is_var()) tails.insert(val.arg(1).id());
          const Term& h = val.arg(0);
          if (h.is_compound() && h.name() == "block" && h.arity() == 2) {
            std::vector<std::string> tips;
            std::string payload = to_string(block_payload_edges(val, tips));
            if (created.count(payload)) continue;
            for (const auto& t : tips) {
              auto c = created.find(t);
              if (c == created.end() || c->second >= r.step)
                return failure(name, r.step, "block " + payload + " references " + t + " before it was delivered");
            }
            created.emplace(payload, r.step);
            edges[payload] = tips;
          }
        }
      }
      if (r.kind == "communicate") {
        ++envelopes;
        if (r.at("signers") != "1" || r.at("signer") != r.at("from"))
          return failure(name, r.step, "non-repudiation: message from " + r.at("from") + " verified for " + r.at("signer"));
      }
      rp.scan(a);
      for (const auto& [k, n] : rp.duplicates(a))
        if (!k.reader && tails.count(k.id))
          return failure(name, r.step, "unforkability: stream tail " + var_str(k) + " has " + std::to_string(n) + " writers");
    }
    // Kahn's algorithm over the block reference graph.
    std::map<std::string, int> indeg;
    for (const auto& [b, ts] : edges) {
      indeg.emplace(b, 0);
      for (const auto& t : ts) ++indeg[t];
    }
    std::deque<std::string> ready;
    for (const auto& [b, d] : indeg)
      if (d == 0) ready.push_back(b);
    size_t visited = 0, nedges = 0;
    while (!ready.empty()) {
      std::string b = ready.front();
      ready.pop_front();
      ++visited;
      for (const auto& t : edges[b]) {
        ++nedges;
        if (--indeg[t] == 0) ready.push_back(t);
      }
    }
    if (visited != indeg.size()) return failure(name, trace.empty() ? 0 : trace.back().step, "block references form a cycle");
    std::ostringstream d;
    d << assigned.size() << " assignments, " << tails.size() << " stream tails, " << envelopes << " envelopes, "
      << created.size() << " blocks, " << nedges << " references";
    return pass(name, d.str());
  } catch (const std::exception& e) {
    return failure(name, 0, std::string("malformed trace: ") + e.what());
  }
}

Verdict verify_grassroots_interaction(const std::vector<TraceRecord>& trace, const std::set<std::string>& group) {
  const std::string name = "grassroots";
  try {
    auto recs = parse_all(trace);
    std::set<std::string> everyone;
    for (const auto& r : trace) everyone.insert(r.agent);
    bool outsiders = std::any_of(everyone.begin(), everyone.end(), [&](const auto& a) { return !group.count(a); });
    if (!outsiders) return failure(name, 0, "vacuous: every agent of the run is in the group, so nothing is alien");
    std::unordered_map<uint64_t, std::string> creator;  // the agent whose record first mentions the id
    Replay rp;
    for (const auto& p : recs) {
      const TraceRecord& r = *p.r;
      for (const auto& [k, t] : p.t) {
        std::set<uint64_t> ids;
        var_ids(t, ids);
        for (uint64_t id : ids) creator.emplace(id, r.agent);
      }
      rp.apply(p);
      if (r.kind != "communicate" || !group.count(r.agent) || group.count(r.at("from"))) continue;
      const Term* value = p.get("value");
      if (!value) continue;
      std::set<uint64_t> ids;
      var_ids(*value, ids);
      for (uint64_t id : ids) {
        const std::string& c = creator.at(id);
        if (group.count(c)) continue;
        // The alien pair must now be part of the receiver's state.
        const AgentState& a = rp.agents[r.agent];
        bool held = false;
        for (const auto& [sid, v] : a.store) {
          std::set<uint64_t> in;
          var_ids(v, in);
          if (in.count(id)) held = true;
        }
        for (const auto& [gid, g] : a.goals) {
          std::set<uint64_t> in;
          var_ids(g, in);
          if (in.count(id)) held = true;
        }
        if (held)
          return pass(name, r.agent + " holds _W" + std::to_string(id) + " created by " + c + " (step " +
                                std::to_string(r.step) + ")");
      }
    }
    return failure(name, 0, "not interactive in this run: no agent of the group received a variable from outside");
  } catch (const std::exception& e) {
    return failure(name, 0, std::string("malformed trace: ") + e.what());
  }
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"srsw", "acyclic", "deduction", "monotonicity", "streams"};
  return names;
}

std::vector<Verdict> run_checks(const std::vector<TraceRecord>& trace, const ProgramSet& programs,
                                const std::vector<std::string>& checks, uint64_t seed) {
  std::vector<Verdict> out;
  for (const auto& c : checks) {
    if (c == "srsw") out.push_back(verify_srsw(trace));
    else if (c == "acyclic") out.push_back(verify_acyclic(trace));
    else if (c == "deduction") out.push_back(verify_deduction(trace, programs));
    else if (c == "monotonicity") out.push_back(verify_monotonicity(trace, programs, 16, seed));
    else if (c == "streams") out.push_back(verify_streams(trace));
    else throw std::invalid_argument("unknown check " + c);
  }
  return out;
}

namespace {

TraceRecord record(uint64_t step, const std::string& kind, std::vector<std::pair<std::string, std::string>> fields) {
  TraceRecord r;
  r.step = step;
  r.agent = "local";
  r.kind = kind;
  r.fields = std::move(fields);
  return r;
}

}  // namespace

std::vector<PlantedTrace> planted_counterexamples(const Program& merge) {
  std::vector<PlantedTrace> out;

  out.push_back({"srsw", "two goals hold the writer _W1",
                 {record(0, "inject", {{"gid", "1"}, {"boot", "merge([1],[a],_W1)"}}),
                  record(0, "inject", {{"gid", "2"}, {"boot", "merge([2],[b],_W1)"}})}});

  out.push_back({"acyclic", "_W1 is bound to f(_W1?)",
                 {record(0, "inject", {{"gid", "1"}, {"boot", "'='(_W1,f(_W1?))"}}),
                  record(0, "inject", {{"gid", "2"}, {"boot", "p(_W1?)"}}),
                  record(1, "reduce",
                         {{"gid", "1"}, {"goal", "'='(_W1,f(_W1?))"}, {"clause", "builtin"}, {"first", "3"},
                          {"sigma", "['='(_W1,f(_W1?))]"}, {"abandoned", "[]"}, {"body", "[]"}})}});

  // A real merge run with one binding too many in its first reduction.
  {
    IdSource ids;
    Engine e(merge, ids);
    e.spawn_text("merge([1,2],[a,b],Zs)");
    std::vector<TraceRecord> t;
    e.run(100, &t);
    for (auto& r : t) {
      if (r.kind != "reduce" || r.at("clause") == "builtin") continue;
      Term body = parse_term(r.at("body"), true).term;
      Term sigma = parse_term(r.at("sigma"), true).term;
      std::set<uint64_t> bound;
      for (const auto& [id, v] : equations(sigma)) bound.insert(id);
      std::vector<Term> vars;
      collect_vars(body, vars);
      for (const auto& v : vars) {
        if (!v.is_writer() || bound.count(v.id())) continue;
        auto items = list_items(sigma);
        items.push_back(Term::compound("=", {v, Term::nil()}));
        r.set("sigma", list_field(items));
        break;
      }
      break;
    }
    out.push_back({"deduction", "a merge reduction whose sigma also binds a body writer to []", std::move(t)});
  }

  out.push_back({"monotonicity", "an outside assignment to the goal's own writer removes its only clause",
                 {record(0, "inject", {{"gid", "1"}, {"boot", "merge([a],[],_W1)"}}),
                  record(1, "communicate", {{"from", "local"}, {"sigma", "['='(_W1,foo)]"}})}});

  out.push_back({"streams", "two reductions assign _W1",
                 {record(0, "inject", {{"gid", "1"}, {"boot", "'='(_W1,a)"}}),
                  record(0, "inject", {{"gid", "2"}, {"boot", "'='(_W1,b)"}}),
                  record(1, "reduce",
                         {{"gid", "1"}, {"goal", "'='(_W1,a)"}, {"clause", "builtin"}, {"first", "3"},
                          {"sigma", "['='(_W1,a)]"}, {"abandoned", "[]"}, {"body", "[]"}}),
                  record(2, "reduce",
                         {{"gid", "2"}, {"goal", "'='(_W1,b)"}, {"clause", "builtin"}, {"first", "3"},
                          {"sigma", "['='(_W1,b)]"}, {"abandoned", "[]"}, {"body", "[]"}})}});
  return out;
}

}  // namespace glp

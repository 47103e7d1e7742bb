#include "glp/multiagent.hpp"

#include "glp/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace glp {

namespace {

bool same_mod_polarity(const Term& stored, const Term& query, const View& view) {
  Term a = view.deref(stored);
  if (a.is_var() || query.is_var()) return a.is_var() && query.is_var() && a.id() == query.id();
  if (a.kind() != query.kind()) return false;
  if (!a.is_compound()) return a == query;
  if (a.name() != query.name() || a.arity() != query.arity()) return false;
  for (size_t i = 0; i < a.arity(); ++i)
    if (!same_mod_polarity(a.arg(i), query.arg(i), view)) return false;
  return true;
}

void compound_subterms(const Term& t, std::vector<Term>& out) {
  if (!t.is_compound()) return;
  out.push_back(t);
  for (const auto& a : t.args()) compound_subterms(a, out);
}

Term eq(uint64_t id, const Term& v) { return Term::compound("=", {Term::writer(id), v}); }

std::string payload_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

}  // namespace

const char* table_status_name(TableEntry::Status s) {
  switch (s) {
    case TableEntry::Status::NoValue: return "novalue";
    case TableEntry::Status::Requester: return "requester";
    case TableEntry::Status::RequestSent: return "request-sent";
    case TableEntry::Status::Value: return "value";
  }
  return "?";
}

void Provenance::add(const Term& t, const std::string& agent, const std::string& module) {
  Term att = Term::compound("att", {Term::constant(agent), Term::constant(module)});
  std::vector<Term> subs;
  compound_subterms(t, subs);
  for (const auto& s : subs) records_.emplace_back(s, att);
}

std::optional<Term> Provenance::attestation(const Term& resolved, const View& view) const {
  if (resolved.is_var()) return std::nullopt;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it)
    if (same_mod_polarity(it->first, resolved, view)) return it->second;
  return Term::compound("att", {Term::constant("self"), Term::constant(own_hash_)});
}

bool match_pattern(const Term& pattern, const Term& t, const View& view, const std::map<uint64_t, std::string>& names,
                   std::map<std::string, Term>& captures) {
  Term x = view.deref(t);
  if (pattern.is_var()) {
    auto n = names.find(pattern.id());
    if (n == names.end()) return true;
    auto [it, fresh] = captures.emplace(n->second, view.resolve(x));
    return fresh || it->second == view.resolve(x);
  }
  if (x.is_var()) return false;
  if (!pattern.is_compound()) return pattern == x;
  if (!x.is_compound() || pattern.name() != x.name() || pattern.arity() != x.arity()) return false;
  for (size_t i = 0; i < pattern.arity(); ++i)
    if (!match_pattern(pattern.arg(i), x.arg(i), view, names, captures)) return false;
  return true;
}

World::World(const Scenario& scenario) : scenario_(scenario), crypto_(make_provider(scenario.crypto)) {
  rng_.seed(scenario.seed);
  programs_.push_back(std::make_unique<Program>(Program::from_files(scenario.modules)));
  std::vector<AgentConfig> configs = scenario.agents;
  std::sort(configs.begin(), configs.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  for (const auto& ac : configs) {
    auto a = std::make_unique<Agent>();
    a->name = ac.name;
    a->keys = crypto_->keypair(ac.key_seed);
    a->identity = a->keys.identity();
    for (const auto& other : agents_)
      if (other->identity == a->identity) throw ScenarioError("agents " + other->name + " and " + a->name + " share a key seed");
    if (ac.modules.empty()) {
      a->program = programs_.front().get();
    } else {
      programs_.push_back(std::make_unique<Program>(Program::from_files(ac.modules)));
      a->program = programs_.back().get();
    }
    if (a->program->has_writer_violations())
      throw LoadError("agent " + a->name + ": module has single-writer violations");
    a->engine = std::make_unique<Engine>(*a->program, ids_, a->name);
    a->provenance = std::make_unique<Provenance>(a->program->hash());
    a->engine->set_attestation_source(a->provenance.get());
    auto rules = scenario.scripts.find(ac.name);
    if (rules != scenario.scripts.end()) a->rules = rules->second;
    a->fired.assign(a->rules.size(), false);
    known_keys_.push_back(a->keys.pub);
    agents_.push_back(std::move(a));
  }
}

Agent& World::agent(const std::string& name) {
  for (auto& a : agents_)
    if (a->name == name) return *a;
  throw std::out_of_range("no agent " + name);
}

const Agent& World::agent(const std::string& name) const {
  for (const auto& a : agents_)
    if (a->name == name) return *a;
  throw std::out_of_range("no agent " + name);
}

std::string World::name_of(const std::string& identity) const {
  for (const auto& a : agents_)
    if (a->identity == identity) return a->name;
  return {};
}

std::string World::substitute_names(const Agent& p, const std::string& text) const {
  std::string out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '$') {
      out.push_back(text[i]);
      continue;
    }
    size_t j = i + 1;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
    std::string name = text.substr(i + 1, j - i - 1);
    if (name == "self") {
      out += p.identity;
    } else {
      bool found = false;
      for (const auto& a : agents_)
        if (a->name == name) {
          out += a->identity;
          found = true;
        }
      if (!found) throw ScenarioError("unknown agent reference $" + name);
    }
    i = j - 1;
  }
  return out;
}

void World::boot() {
  for (auto& a : agents_) {
    ids_.set_owner(a->name);
    uint64_t first = a->engine->next_gid();
    auto vars = a->engine->spawn_text(substitute_names(*a, scenario_.boot));
    auto get = [&](const char* n) { return vars.count(n) ? vars.at(n) : Term(); };
    a->user_in = get("UserIn");
    a->net_in = get("NetIn");
    if (Term t = get("UserOut"); t.valid()) a->user_out = Term::reader_of(t);
    if (Term t = get("NetOut"); t.valid()) a->net_out = Term::reader_of(t);
    for (const auto& g : a->engine->queue()) {
      if (g.gid < first) continue;
      TraceRecord r;
      r.step = 0;
      r.agent = a->name;
      r.kind = "inject";
      r.set("gid", std::to_string(g.gid));
      r.set("boot", g.atom);
      trace_.push_back(std::move(r));
    }
  }
}

std::vector<World::Tx> World::enabled() {
  std::vector<Tx> out;
  for (auto& a : agents_)
    if (a->engine->has_active()) out.push_back({TxKind::Reduce, a.get(), nullptr});
  for (auto& [pair, q] : inflight_)
    if (!q.empty()) out.push_back({TxKind::Deliver, &agent(pair.first), &agent(pair.second)});
  for (auto& a : agents_)
    if (a->net_out.valid() && a->engine->view().deref(a->net_out).is_cons())
      out.push_back({TxKind::Network, a.get(), nullptr});
  for (auto& a : agents_)
    if (a->user_out.valid() && a->engine->view().deref(a->user_out).is_cons())
      out.push_back({TxKind::Observe, a.get(), nullptr});
  for (auto& a : agents_)
    if (!a->pending.empty()) out.push_back({TxKind::Inject, a.get(), nullptr});
  return out;
}

bool World::fire_idle_rule() {
  for (auto& a : agents_)
    for (size_t i = 0; i < a->rules.size(); ++i)
      if (a->rules[i].trigger == ScriptRule::Trigger::OnIdle && !a->fired[i]) {
        a->fired[i] = true;
        a->pending.emplace_back(a->rules[i].inject, std::map<std::string, Term>{});
        return true;
      }
  return false;
}

bool World::step() {
  for (auto& a : agents_)
    for (size_t i = 0; i < a->rules.size(); ++i)
      if (a->rules[i].trigger == ScriptRule::Trigger::OnStep && !a->fired[i] && a->rules[i].step <= clock_) {
        a->fired[i] = true;
        a->pending.emplace_back(a->rules[i].inject, std::map<std::string, Term>{});
      }
  auto txs = enabled();
  if (txs.empty()) {
    if (!fire_idle_rule()) return false;
    txs = enabled();
  }
  const Tx& tx = txs[rng_() % txs.size()];
  ++clock_;
  apply(tx);
  return true;
}

WorldResult World::run() {
  if (trace_.empty()) boot();
  WorldResult r;
  while (clock_ < scenario_.fuel && step()) {
  }
  r.transactions = clock_;
  r.quiescent = clock_ < scenario_.fuel || enabled().empty();
  for (const auto& a : agents_) r.status[a->name] = a->engine->status();
  return r;
}

void World::apply(const Tx& tx) {
  switch (tx.kind) {
    case TxKind::Reduce: reduce_tx(*tx.a); break;
    case TxKind::Deliver: deliver_tx(*tx.a, *tx.b); break;
    case TxKind::Network: network_tx(*tx.a); break;
    case TxKind::Observe: observe_tx(*tx.a); break;
    case TxKind::Inject: inject_tx(*tx.a); break;
  }
  // Relay goals started while exporting belong to this transaction's record.
  if (!spawned_.empty()) {
    trace_.back().set("spawned", list_field(spawned_));
    spawned_.clear();
  }
  if (!returned_.empty()) {
    trace_.back().set("returned", list_field(returned_));
    returned_.clear();
  }
}

void World::reduce_tx(Agent& p) {
  ids_.set_owner(p.name);
  StepInfo info = p.engine->step(clock_);
  trace_.push_back(info.record);
  switch (info.kind) {
    case StepInfo::Kind::Reduce:
      after_bindings(p, info.bindings);
      after_abandon(p, info.abandoned);
      break;
    case StepInfo::Kind::Suspend: request_blockers(p, info.blockers); break;
    case StepInfo::Kind::Fail: after_abandon(p, info.abandoned); break;
  }
}

void World::send(Agent& from, Agent& to, const Term& payload) {
  Bytes wire = seal(*crypto_, to_bytes(to_string(payload)), from.program->hash(), from.keys, to.keys.pub, clock_);
  ++sealed_;
  if (scenario_.tamper_envelope && *scenario_.tamper_envelope == sealed_) wire.back() ^= 0x01;
  inflight_[{from.name, to.name}].push_back(InFlight{std::move(wire)});
}

void World::after_bindings(Agent& p, const std::vector<std::pair<uint64_t, Term>>& bindings) {
  for (const auto& [id, value] : bindings) {
    auto w = p.table.find(VarKey{id, false});
    if (w != p.table.end() && w->second.creator != p.name) {
      // Imported writer: the value goes home to the creator.
      Agent& c = agent(w->second.creator);
      p.table.erase(w);
      Term v = export_term(p, value);
      send(p, c, Term::compound("assign", {Term::reader(id), v}));
      continue;
    }
    auto r = p.table.find(VarKey{id, true});
    if (r == p.table.end() || r->second.creator != p.name) continue;
    if (r->second.status == TableEntry::Status::Requester) {
      Agent& q = agent(r->second.requester);
      p.table.erase(r);
      Term v = export_term(p, value);
      send(p, q, Term::compound("assign", {Term::reader(id), v}));
    } else {
      r->second.status = TableEntry::Status::Value;
      r->second.value = value;
    }
  }
}

void World::after_abandon(Agent& p, const std::vector<VarKey>& abandoned) {
  for (const auto& k : abandoned) {
    if (k.reader) {
      auto w = p.table.find(VarKey{k.id, false});
      if (w != p.table.end() && w->second.creator != p.name) {
        Agent& c = agent(w->second.creator);
        p.table.erase(w);
        send(p, c, Term::compound("assign_abandoned", {Term::reader(k.id)}));
        continue;
      }
      auto r = p.table.find(VarKey{k.id, true});
      if (r == p.table.end() || r->second.creator != p.name) continue;
      if (r->second.status == TableEntry::Status::Requester) {
        Agent& q = agent(r->second.requester);
        p.table.erase(r);
        send(p, q, Term::compound("assign_abandoned", {Term::reader(k.id)}));
      } else {
        r->second.status = TableEntry::Status::Value;
        r->second.value = Term();
      }
    } else {
      auto r = p.table.find(VarKey{k.id, true});
      if (r != p.table.end() && r->second.creator != p.name) {
        Agent& c = agent(r->second.creator);
        p.table.erase(r);
        send(p, c, Term::compound("request_abandoned", {Term::reader(k.id)}));
        continue;
      }
      auto w = p.table.find(VarKey{k.id, false});
      if (w != p.table.end() && w->second.creator == p.name) p.table.erase(w);
    }
  }
}

void World::request_blockers(Agent& p, const std::vector<Term>& blockers) {
  for (const auto& b : blockers) {
    auto r = p.table.find(VarKey{b.id(), true});
    if (r == p.table.end() || r->second.creator == p.name || r->second.status != TableEntry::Status::NoValue) continue;
    r->second.status = TableEntry::Status::RequestSent;
    send(p, agent(r->second.creator), Term::compound("request", {Term::reader(b.id()), Term::constant(p.identity)}));
  }
}

Term World::export_term(Agent& p, const Term& t) {
  Term resolved = p.engine->resolve(t);
  std::vector<Term> vars;
  collect_vars(resolved, vars);
  std::map<uint64_t, Term> replace;  // reader id -> relay reader
  for (const auto& v : vars) {
    const std::string& creator = ids_.creator(v.id());
    if (creator == p.name) {
      p.table.emplace(key_of(v), TableEntry{p.name, TableEntry::Status::NoValue, {}, {}});
      continue;
    }
    auto it = p.table.find(key_of(v));
    if (it == p.table.end()) continue;
    if (v.is_reader() && it->second.status == TableEntry::Status::RequestSent) {
      // The value is already on its way here; forward it through a relay goal.
      ids_.set_owner(p.name);
      auto [z, zr] = ids_.fresh_pair();
      Term goal = Term::compound("export_reader", {v, z});
      uint64_t gid = p.engine->spawn(goal);
      spawned_.push_back(Term::compound("spawn", {Term::number(static_cast<long>(gid)), goal}));
      p.table.emplace(key_of(zr), TableEntry{p.name, TableEntry::Status::NoValue, {}, {}});
      replace.emplace(v.id(), zr);
    } else {
      p.table.erase(it);
    }
  }
  if (replace.empty()) return resolved;
  std::function<Term(const Term&)> sub = [&](const Term& x) -> Term {
    if (x.is_reader()) {
      auto r = replace.find(x.id());
      return r == replace.end() ? x : r->second;
    }
    if (!x.is_compound()) return x;
    std::vector<Term> args;
    for (const auto& a : x.args()) args.push_back(sub(a));
    return Term::compound(x.name(), std::move(args));
  };
  return sub(resolved);
}

void World::import_term(Agent& q, const Term& t, const Agent& from) {
  std::vector<Term> vars;
  collect_vars(t, vars);
  for (const auto& v : vars) {
    const std::string& creator = ids_.creator(v.id());
    if (creator != q.name) {
      q.table[key_of(v)] = TableEntry{creator, TableEntry::Status::NoValue, {}, {}};
      continue;
    }
    // A half coming home: it is local again.
    auto it = q.table.find(key_of(v));
    if (it == q.table.end()) continue;
    if (v.is_reader() && it->second.status == TableEntry::Status::Value && !q.engine->store().bound(v.id())) {
      if (it->second.value.valid()) {
        q.engine->deliver(v.id(), it->second.value);
        returned_.push_back(eq(v.id(), it->second.value));
      } else {
        q.engine->abandon(VarKey{v.id(), true});
        returned_.push_back(Term::compound("abandoned", {v}));
      }
    }
    q.table.erase(it);
  }
  (void)from;
}

void World::append_stream(Agent& p, Term& tail, const Term& item, TraceRecord& rec) {
  ids_.set_owner(p.name);
  auto [w, wr] = ids_.fresh_pair();
  Term cell = Term::cons(item, wr);
  uint64_t id = tail.id();
  p.engine->deliver(id, cell);
  rec.set("sigma", Term::list({eq(id, cell)}));
  tail = w;
}

void World::route_assignment(Agent& to, uint64_t id, const Term& value, TraceRecord& rec) {
  bool abandoned = !value.valid();
  auto r = to.table.find(VarKey{id, true});
  if (r != to.table.end() && r->second.creator != to.name) {
    to.table.erase(r);
  } else if (r != to.table.end()) {
    // The reader lives elsewhere: forward or keep until it is requested.
    to.table.erase(VarKey{id, false});
    r = to.table.find(VarKey{id, true});
    if (r->second.status == TableEntry::Status::Requester) {
      Agent& q = agent(r->second.requester);
      to.table.erase(r);
      if (abandoned) send(to, q, Term::compound("assign_abandoned", {Term::reader(id)}));
      else send(to, q, Term::compound("assign", {Term::reader(id), export_term(to, value)}));
      rec.set("forward", q.name);
    } else {
      r->second.status = TableEntry::Status::Value;
      r->second.value = value;
      rec.set("held", "1");
    }
    return;
  } else {
    to.table.erase(VarKey{id, false});
  }
  if (abandoned) {
    to.engine->abandon(VarKey{id, true});
    rec.set("abandoned", list_field({Term::reader(id)}));
  } else if (!to.engine->store().bound(id)) {
    to.engine->deliver(id, value);
    rec.set("sigma", Term::list({eq(id, value)}));
  }
}

void World::deliver_tx(Agent& from, Agent& to) {
  auto& q = inflight_[{from.name, to.name}];
  InFlight msg = std::move(q.front());
  q.pop_front();
  TraceRecord rec;
  rec.step = clock_;
  rec.agent = to.name;
  Opened o = open_envelope(*crypto_, msg.wire, to.keys, known_keys_);
  rec.set("from", from.name);
  if (!o.ok) {
    ++rejects_;
    rec.kind = "reject";
    rec.set("stage", o.stage);
    trace_.push_back(std::move(rec));
    return;
  }
  auto env = decode_envelope(msg.wire);
  size_t signers = verifying_keys(*crypto_, *env, o.payload, known_keys_);
  const std::string sender_id = KeyPair{"", 0, o.sender, {}}.identity();
  Term m = parse_term(payload_string(o.payload), true).term;
  rec.kind = "communicate";
  rec.set("signer", name_of(sender_id));
  rec.set("signers", std::to_string(signers));
  rec.set("module", o.module_hash);
  const std::string& type = m.name();
  rec.set("type", type);
  if (type == "assign" || type == "assign_abandoned") {
    uint64_t id = m.arg(0).id();
    rec.set("var", m.arg(0));
    Term value;
    if (type == "assign") {
      value = m.arg(1);
      rec.set("value", value);
      import_term(to, value, from);
      to.provenance->add(value, sender_id, o.module_hash);
    }
    route_assignment(to, id, value, rec);
  } else if (type == "request" || type == "request_abandoned") {
    uint64_t id = m.arg(0).id();
    rec.set("var", m.arg(0));
    auto r = to.table.find(VarKey{id, true});
    if (type == "request_abandoned") {
      if (r != to.table.end() && r->second.creator == to.name) to.table.erase(r);
      rec.set("abandoned", list_field({Term::writer(id)}));
    } else {
      std::string requester = name_of(m.arg(1).name());
      rec.set("requester", requester);
      Agent& req = agent(requester);
      if (r != to.table.end() && r->second.status == TableEntry::Status::Value) {
        Term value = r->second.value;
        to.table.erase(r);
        if (value.valid()) send(to, req, Term::compound("assign", {Term::reader(id), export_term(to, value)}));
        else send(to, req, Term::compound("assign_abandoned", {Term::reader(id)}));
        rec.set("reply", "1");
      } else if (r == to.table.end() && to.engine->store().bound(id)) {
        send(to, req, Term::compound("assign", {Term::reader(id), export_term(to, Term::writer(id))}));
        rec.set("reply", "1");
      } else {
        TableEntry& e = to.table[VarKey{id, true}];
        if (e.creator.empty()) e.creator = to.name;
        e.status = TableEntry::Status::Requester;
        e.requester = requester;
      }
    }
  } else if (type == "net") {
    Term x = m.arg(0);
    rec.set("value", x);
    import_term(to, x, from);
    to.provenance->add(x, sender_id, o.module_hash);
    if (to.net_in.valid()) append_stream(to, to.net_in, x, rec);
    else rec.set("dropped", "no-network-input");
  } else {
    rec.set("dropped", "unknown-payload");
  }
  trace_.push_back(std::move(rec));
}

void World::network_tx(Agent& p) {
  TraceRecord rec;
  rec.step = clock_;
  rec.agent = p.name;
  rec.kind = "network";
  Term cell = p.engine->view().deref(p.net_out);
  p.net_out = cell.arg(1);
  Term e = p.engine->resolve(cell.arg(0));
  rec.set("element", e);
  Term dest, content;
  if (e.is_compound() && e.name() == "msg" && e.arity() == 2) {
    dest = e.arg(0);
    content = e.arg(1);
  } else if (e.is_compound() && e.name() == "msg" && e.arity() == 3) {
    dest = e.arg(1);
    content = e;
  }
  std::string to = dest.valid() && dest.is_constant() ? name_of(dest.name()) : "";
  if (to.empty()) {
    rec.set("dropped", dest.valid() ? "unknown-destination" : "not-a-message");
    trace_.push_back(std::move(rec));
    return;
  }
  Term x = export_term(p, content);
  rec.set("to", to);
  rec.set("payload", x);
  trace_.push_back(std::move(rec));
  send(p, agent(to), Term::compound("net", {x}));
}

void World::observe_tx(Agent& p) {
  TraceRecord rec;
  rec.step = clock_;
  rec.agent = p.name;
  rec.kind = "observe";
  Term cell = p.engine->view().deref(p.user_out);
  p.user_out = cell.arg(1);
  Term e = p.engine->resolve(cell.arg(0));
  p.observed.push_back(e);
  rec.set("term", e);
  size_t matched = 0;
  for (const auto& rule : p.rules) {
    if (rule.trigger != ScriptRule::Trigger::OnMatch) continue;
    ParsedTerm pt = parse_term(substitute_names(p, rule.pattern));
    std::map<uint64_t, std::string> names;
    for (const auto& [n, id] : pt.names) names.emplace(id, n);
    std::map<std::string, Term> captures;
    if (match_pattern(pt.term, e, p.engine->view(), names, captures)) {
      p.pending.emplace_back(rule.inject, std::move(captures));
      ++matched;
    }
  }
  rec.set("matched", std::to_string(matched));
  trace_.push_back(std::move(rec));
}

Term World::instantiate(Agent& p, const std::string& text, const std::map<std::string, Term>& captures) {
  ParsedTerm pt = parse_term(substitute_names(p, text));
  std::map<uint64_t, std::string> names;
  for (const auto& [n, id] : pt.names) names.emplace(id, n);
  ids_.set_owner(p.name);
  std::map<uint64_t, uint64_t> fresh;
  std::function<Term(const Term&)> sub = [&](const Term& x) -> Term {
    if (x.is_var()) {
      auto n = names.find(x.id());
      if (n != names.end()) {
        auto c = captures.find(n->second);
        if (c != captures.end()) return x.is_reader() ? Term::reader_of(c->second) : c->second;
      }
      auto [it, added] = fresh.emplace(x.id(), 0);
      if (added) it->second = ids_.fresh();
      return x.is_reader() ? Term::reader(it->second) : Term::writer(it->second);
    }
    if (!x.is_compound()) return x;
    std::vector<Term> args;
    for (const auto& a : x.args()) args.push_back(sub(a));
    return Term::compound(x.name(), std::move(args));
  };
  return sub(pt.term);
}

void World::inject_tx(Agent& p) {
  auto [text, captures] = std::move(p.pending.front());
  p.pending.pop_front();
  TraceRecord rec;
  rec.step = clock_;
  rec.agent = p.name;
  rec.kind = "inject";
  Term t = instantiate(p, text, captures);
  rec.set("payload", t);
  if (p.user_in.valid()) append_stream(p, p.user_in, t, rec);
  else rec.set("dropped", "no-user-input");
  trace_.push_back(std::move(rec));
}

std::vector<std::string> World::friends(const std::string& name) const {
  const Agent& a = agent(name);
  std::vector<std::string> out;
  for (const auto& g : a.engine->resolvent()) {
    if (!g.atom.is_compound() || g.atom.name() != "social_graph" || g.atom.arity() != 3) continue;
    Term fs = a.engine->resolve(g.atom.arg(2));
    while (fs.is_cons()) {
      const Term& entry = fs.arg(0);
      if (entry.is_compound() && entry.name() == "," && entry.arity() == 2 && entry.arg(0).is_constant())
        out.push_back(entry.arg(0).name());
      fs = fs.arg(1);
    }
  }
  return out;
}

}  // namespace glp

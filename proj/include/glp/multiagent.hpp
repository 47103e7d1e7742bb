#pragma once

#include "glp/engine.hpp"
#include "glp/scenario.hpp"
#include "glp/security.hpp"

#include <deque>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace glp {

// Attestation records for terms delivered through verified envelopes.
class Provenance : public AttestationSource {
public:
  explicit Provenance(std::string own_hash) : own_hash_(std::move(own_hash)) {}
  // Records `t` and each of its compound subterms as attested by (agent, module).
  void add(const Term& t, const std::string& agent, const std::string& module);
  std::optional<Term> attestation(const Term& resolved, const View& view) const override;
  size_t size() const { return records_.size(); }

private:
  std::vector<std::pair<Term, Term>> records_;
  std::string own_hash_;
};

// One side's knowledge about a pair whose other half lives elsewhere. Keyed by the half
// the entry describes: exported halves at their creator, imported halves at the importer.
struct TableEntry {
  enum class Status { NoValue, Requester, RequestSent, Value };
  std::string creator;
  Status status = Status::NoValue;
  std::string requester;
  Term value;  // invalid term means the writer was abandoned
};

const char* table_status_name(TableEntry::Status s);

struct Agent {
  std::string name;
  KeyPair keys;
  std::string identity;
  const Program* program = nullptr;
  std::unique_ptr<Engine> engine;
  std::unique_ptr<Provenance> provenance;
  std::map<VarKey, TableEntry> table;
  Term user_in, net_in;    // writer tails held by the runtime
  Term user_out, net_out;  // reader cursors held by the runtime
  std::vector<ScriptRule> rules;
  std::vector<bool> fired;
  std::deque<std::pair<std::string, std::map<std::string, Term>>> pending;  // injections with captures
  std::vector<Term> observed;
};

struct WorldResult {
  uint64_t transactions = 0;
  bool quiescent = false;
  std::map<std::string, RunStatus> status;
};

class World {
public:
  explicit World(const Scenario& scenario);

  void boot();
  // Applies one enabled transaction; false when nothing is enabled.
  bool step();
  WorldResult run();

  const std::vector<TraceRecord>& trace() const { return trace_; }
  const Scenario& scenario() const { return scenario_; }
  Agent& agent(const std::string& name);
  const Agent& agent(const std::string& name) const;
  const std::vector<std::unique_ptr<Agent>>& agents() const { return agents_; }
  const IdSource& ids() const { return ids_; }
  const CryptoProvider& crypto() const { return *crypto_; }
  uint64_t clock() const { return clock_; }
  uint64_t envelopes_sealed() const { return sealed_; }
  uint64_t rejects() const { return rejects_; }

  // Names (first components) in the friends list of the agent's social_graph goal.
  std::vector<std::string> friends(const std::string& name) const;
  // Agent name for an identity atom, or empty.
  std::string name_of(const std::string& identity) const;

private:
  struct InFlight {
    Bytes wire;
  };
  enum class TxKind { Reduce, Deliver, Network, Observe, Inject };
  struct Tx {
    TxKind kind;
    Agent* a;
    Agent* b;
  };

  std::vector<Tx> enabled();
  void apply(const Tx& tx);
  void reduce_tx(Agent& p);
  void deliver_tx(Agent& from, Agent& to);
  void network_tx(Agent& p);
  void observe_tx(Agent& p);
  void inject_tx(Agent& p);
  bool fire_idle_rule();

  // Routing of values and abandonment after local state changes.
  void after_bindings(Agent& p, const std::vector<std::pair<uint64_t, Term>>& bindings);
  void after_abandon(Agent& p, const std::vector<VarKey>& abandoned);
  void request_blockers(Agent& p, const std::vector<Term>& blockers);
  Term export_term(Agent& p, const Term& t);
  void import_term(Agent& q, const Term& t, const Agent& from);
  void send(Agent& from, Agent& to, const Term& payload);
  void append_stream(Agent& p, Term& tail, const Term& item, TraceRecord& rec);
  std::string substitute_names(const Agent& p, const std::string& text) const;
  Term instantiate(Agent& p, const std::string& text, const std::map<std::string, Term>& captures);
  void route_assignment(Agent& to, uint64_t id, const Term& value, TraceRecord& rec);

  Scenario scenario_;
  std::unique_ptr<CryptoProvider> crypto_;
  std::vector<std::unique_ptr<Program>> programs_;
  std::vector<std::unique_ptr<Agent>> agents_;
  std::map<std::pair<std::string, std::string>, std::deque<InFlight>> inflight_;
  std::vector<Bytes> known_keys_;
  IdSource ids_;
  std::mt19937_64 rng_;
  uint64_t clock_ = 0;
  uint64_t sealed_ = 0;
  uint64_t rejects_ = 0;
  std::vector<TraceRecord> trace_;
  std::vector<Term> spawned_;   // spawn(Gid, Goal) relays of the current transaction
  std::vector<Term> returned_;  // values of local halves that came home in the current transaction
};

// One-way match of a pattern (source variables by name) against a term; fills captures.
bool match_pattern(const Term& pattern, const Term& t, const View& view, const std::map<uint64_t, std::string>& names,
                   std::map<std::string, Term>& captures);

}  // namespace glp

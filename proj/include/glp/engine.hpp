#pragma once

#include "glp/program.hpp"
#include "glp/store.hpp"
#include "glp/trace.hpp"
#include "glp/unify.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace glp {

struct Goal {
  uint64_t gid = 0;
  Term atom;
};

enum class RunStatus { Running, QuiescentSuccess, Deadlock, Failed, FuelExhausted };
const char* run_status_name(RunStatus s);

// Source of attestation/2 answers. The default answers att(self, Hash) for every known term.
class AttestationSource {
public:
  virtual ~AttestationSource() = default;
  // `resolved` is fully dereferenced through `view`, which includes tentative guard bindings.
  virtual std::optional<Term> attestation(const Term& resolved, const View& view) const = 0;
};

// Outcome of one clause attempt or guard call.
struct TryOutcome {
  enum class Kind { Commit, Suspend, Fail };
  Kind kind = Kind::Fail;
  std::vector<std::pair<uint64_t, Term>> bindings;  // head mgu then guard bindings, in order
  std::vector<Term> blockers;
  std::string reason;
  Term head, guard, body;  // renamed clause parts (lists for guard and body)
  std::vector<Term> body_goals;
  uint64_t max_id = 0;  // highest id used by the renamed clause
};

// Details of one reduce transaction, for the multiagent layer.
struct StepInfo {
  enum class Kind { Reduce, Suspend, Fail };
  Kind kind = Kind::Fail;
  Goal goal;
  std::vector<std::pair<uint64_t, Term>> bindings;
  std::vector<Term> blockers;
  std::vector<VarKey> abandoned;  // counterparts whose partner vanished
  TraceRecord record;
};

class Engine {
public:
  Engine(const Program& program, IdSource& ids, std::string agent = "local");

  void set_attestation_source(const AttestationSource* src) { attest_ = src; }
  const std::string& agent() const { return agent_; }
  const Program& program() const { return *program_; }

  // Enqueue a goal whose variables already carry global ids.
  uint64_t spawn(const Term& atom);
  // Enqueue each conjunct of a ','/2 tree, left to right.
  std::vector<uint64_t> spawn_conjunction(const Term& goal);
  // Parse `text` as a goal or conjunction, give each named variable a fresh pair, and enqueue the conjuncts.
  std::map<std::string, Term> spawn_text(const std::string& text);

  bool has_active() const { return !queue_.empty(); }
  // Reduce the head goal of the active queue.
  StepInfo step(uint64_t stepno);
  // Single-agent run until the queue empties or fuel runs out.
  RunStatus run(uint64_t fuel, std::vector<TraceRecord>* trace = nullptr);
  RunStatus status() const;

  // Clause attempt without side effects (apart from nothing): used by tests and checks.
  TryOutcome try_clause(const Term& goal, size_t clause_index, const std::vector<TryOutcome>& earlier) const;
  // Which clauses of the goal's procedure would commit right now, checked independently.
  std::vector<size_t> committable(const Term& goal) const;

  // Bind an external assignment onto pair `id` and wake its readers. Returns woken gids.
  std::vector<uint64_t> deliver(uint64_t id, const Term& value);
  // Mark a local half abandoned; readers wake so their goals can fail.
  std::vector<uint64_t> abandon(VarKey k);

  const BindingStore& store() const { return store_; }
  View view() const { return View(store_); }
  Term resolve(const Term& t) const { return View(store_).resolve(t); }
  const std::deque<Goal>& queue() const { return queue_; }
  const std::map<uint64_t, std::pair<Goal, std::vector<Term>>>& suspended() const { return suspended_; }
  const std::vector<std::pair<Goal, std::string>>& failed() const { return failed_; }
  // All live goals (active then suspended), unresolved.
  std::vector<Goal> resolvent() const;
  uint64_t next_gid() const { return next_gid_; }
  uint64_t reductions() const { return reductions_; }

private:
  struct GuardResult {
    TryOutcome::Kind kind = TryOutcome::Kind::Commit;
    std::vector<Term> blockers;
    std::vector<std::pair<uint64_t, Term>> bindings;
  };

  GuardResult eval_guard(const Term& call, std::unordered_map<uint64_t, Term>& tentative, uint64_t local_from,
                         uint64_t& next_local, const std::vector<TryOutcome>& earlier) const;
  GuardResult unify_guard(const Term& a, const Term& b, const std::unordered_map<uint64_t, Term>& tentative,
                          uint64_t local_from) const;
  std::vector<Term> outside_readers(const Term& t, const View& v, uint64_t local_from) const;
  StepInfo reduce_builtin(const Goal& g, const Term& resolved, uint64_t stepno);
  void commit(StepInfo& info, const std::vector<std::pair<uint64_t, Term>>& bindings,
              const std::vector<Term>& body, const std::vector<VarKey>& before);
  void suspend(StepInfo& info, const Goal& g, std::vector<Term> blockers);
  void fail(StepInfo& info, const Goal& g, const std::string& reason);
  std::vector<uint64_t> wake(uint64_t id);
  std::vector<Term> filter_blockers(const std::vector<Term>& blockers) const;

  const Program* program_;
  IdSource* ids_;
  std::string agent_;
  const AttestationSource* attest_ = nullptr;
  BindingStore store_;
  std::deque<Goal> queue_;
  std::map<uint64_t, std::pair<Goal, std::vector<Term>>> suspended_;
  std::unordered_map<uint64_t, std::vector<uint64_t>> waiting_;  // reader id -> suspended gids
  std::vector<std::pair<Goal, std::string>> failed_;
  uint64_t next_gid_ = 1;
  uint64_t reductions_ = 0;
  uint64_t clock_ = 0;
};

// Rename a clause template: template id k becomes base + k - 1.
Term rename_term(const Term& t, uint64_t base);
// Variables of t occurring more than once per polarity.
std::vector<Term> srsw_term_violations(const Term& t);

}  // namespace glp

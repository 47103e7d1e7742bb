#pragma once

#include "glp/term.hpp"

#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace glp {

struct InternalCorruption : std::logic_error {
  using std::logic_error::logic_error;
};

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Assignment set {X:=T, X?:=T, ...} keyed by variable and polarity.
class Substitution {
public:
  void bind(const Term& var, Term value);
  const Term* lookup(VarKey k) const;
  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  const std::map<VarKey, Term>& entries() const { return map_; }
  bool is_writer_substitution() const;

private:
  std::map<VarKey, Term> map_;
};

// Single-assignment store shared by both halves of a pair: binding the writer
// also delivers the value to its reader.
class BindingStore {
public:
  const Term* lookup(uint64_t id) const;
  bool bound(uint64_t id) const { return map_.count(id) != 0; }
  void bind(uint64_t id, Term value);

  void abandon(VarKey k) { abandoned_.insert(k); }
  bool is_abandoned(VarKey k) const { return abandoned_.count(k) != 0; }
  const std::unordered_set<VarKey, VarKeyHash>& abandoned() const { return abandoned_; }

  size_t size() const { return map_.size(); }

private:
  std::unordered_map<uint64_t, Term> map_;
  std::unordered_set<VarKey, VarKeyHash> abandoned_;
};

// Read view over a store plus tentative writer bindings that are not yet committed.
class View {
public:
  View(const BindingStore& s) : store_(&s) {}  // NOLINT implicit
  View(const BindingStore& s, const std::unordered_map<uint64_t, Term>* tentative)
      : store_(&s), tentative_(tentative) {}

  const Term* lookup(uint64_t id) const;
  Term deref(Term t) const;
  // Fully dereferenced copy; throws InternalCorruption on a cyclic binding chain.
  Term resolve(const Term& t) const;
  const BindingStore& store() const { return *store_; }

private:
  const BindingStore* store_;
  const std::unordered_map<uint64_t, Term>* tentative_ = nullptr;
};

// Replace every variable bound in subst or the store by its fully dereferenced value.
Term apply(const Term& t, const Substitution& subst, const BindingStore& store);
Term apply(const Term& t, const Substitution& subst);

Substitution reader_counterpart(const Substitution& sigma);

enum class Status { Ground, KnownNonground, UnboundWriter, UnboundReader };
Status classify(const Term& t, const View& view);
const char* status_name(Status s);

// Unbound readers reachable in t after dereference (the frontier that blocks groundness).
void frontier_readers(const Term& t, const View& view, std::vector<Term>& out);
bool is_ground(const Term& t, const View& view);

}  // namespace glp

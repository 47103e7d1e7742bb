#pragma once

#include "glp/decimal.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace glp {

enum class Kind : uint8_t { Writer, Reader, Constant, Number, Compound };

class Term;

struct Node {
  Kind kind;
  uint64_t id = 0;            // variable pair id
  std::string text;           // constant text, functor, or variable name hint
  std::shared_ptr<const Decimal> num;
  std::vector<Term> args;
};

// Immutable, cheaply copyable term handle.
class Term {
public:
  Term() = default;

  static Term writer(uint64_t id, std::string hint = {});
  static Term reader(uint64_t id, std::string hint = {});
  static Term constant(std::string text);
  static Term number(Decimal d);
  static Term number(long v) { return number(Decimal(v)); }
  static Term compound(std::string functor, std::vector<Term> args);
  static Term nil();
  static Term cons(Term head, Term tail);
  static Term list(const std::vector<Term>& items, Term tail = nil());

  // X? for a writer X; identity on readers and non-variables.
  static Term reader_of(const Term& t);
  // The writer of a variable's pair; identity on non-variables.
  static Term writer_of(const Term& t);

  bool valid() const { return static_cast<bool>(node_); }
  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Writer || kind() == Kind::Reader; }
  bool is_writer() const { return kind() == Kind::Writer; }
  bool is_reader() const { return kind() == Kind::Reader; }
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_number() const { return kind() == Kind::Number; }
  bool is_compound() const { return kind() == Kind::Compound; }
  bool is_atomic() const { return is_constant() || is_number(); }
  bool is_nil() const { return is_constant() && node_->text == "[]"; }
  bool is_cons() const { return is_compound() && node_->args.size() == 2 && node_->text == "."; }

  uint64_t id() const { return node_->id; }
  const std::string& name() const { return node_->text; }   // functor, constant text, or hint
  const Decimal& num() const { return *node_->num; }
  const std::vector<Term>& args() const { return node_->args; }
  const Term& arg(size_t i) const { return node_->args[i]; }
  size_t arity() const { return is_compound() ? node_->args.size() : 0; }

  // Predicate indicator for atoms: name/arity. Constants have arity 0.
  std::string indicator() const;

  const Node* ptr() const { return node_.get(); }
  bool same_node(const Term& o) const { return node_ == o.node_; }

private:
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

struct VarKey {
  uint64_t id;
  bool reader;
  bool operator==(const VarKey&) const = default;
  bool operator<(const VarKey& o) const { return id != o.id ? id < o.id : reader < o.reader; }
};

struct VarKeyHash {
  size_t operator()(const VarKey& k) const { return std::hash<uint64_t>()(k.id * 2 + (k.reader ? 1 : 0)); }
};

inline VarKey key_of(const Term& v) { return VarKey{v.id(), v.is_reader()}; }

// Global source of fresh variable pairs. Ids are strictly increasing and never
// reused; each id remembers the agent that created it.
class IdSource {
public:
  uint64_t fresh();
  std::pair<Term, Term> fresh_pair(const std::string& hint = {});
  uint64_t peek() const { return next_; }
  void set_owner(const std::string& owner);
  const std::string& owner() const { return owners_[current_]; }
  const std::string& creator(uint64_t id) const;
  // Reserve ids up to and including `id` (used when reading terms that carry ids).
  void observe(uint64_t id);

private:
  uint64_t next_ = 1;
  std::vector<std::string> owners_{"local"};
  uint16_t current_ = 0;
  std::vector<uint16_t> created_by_{0};  // index 0 unused
};

// Canonical serialization: prefix form, quoted functors where needed, list sugar.
std::string to_string(const Term& t);
std::string quote_atom(const std::string& text);
bool atom_needs_quotes(const std::string& text);

// Variables occurring in t (no store involved), in first-occurrence order.
void collect_vars(const Term& t, std::vector<Term>& out);
bool occurs(uint64_t id, const Term& t);

}  // namespace glp

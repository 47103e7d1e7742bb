#include "glp/term.hpp"

#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace glp {

Term Term::writer(uint64_t id, std::string hint) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Writer;
  n->id = id;
  n->text = std::move(hint);
  return Term(std::move(n));
}

Term Term::reader(uint64_t id, std::string hint) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Reader;
  n->id = id;
  n->text = std::move(hint);
  return Term(std::move(n));
}

Term Term::constant(std::string text) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->text = std::move(text);
  return Term(std::move(n));
}

Term Term::number(Decimal d) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->num = std::make_shared<const Decimal>(std::move(d));
  return Term(std::move(n));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) throw std::invalid_argument("compound term needs arity >= 1: " + functor);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compound;
  n->text = std::move(functor);
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::nil() {
  static const Term kNil = constant("[]");
  return kNil;
}

Term Term::cons(Term head, Term tail) { return compound(".", {std::move(head), std::move(tail)}); }

Term Term::list(const std::vector<Term>& items, Term tail) {
  Term t = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) t = cons(*it, t);
  return t;
}

Term Term::reader_of(const Term& t) {
  if (t.is_writer()) return reader(t.id(), t.name());
  return t;
}

Term Term::writer_of(const Term& t) {
  if (t.is_reader()) return writer(t.id(), t.name());
  return t;
}

std::string Term::indicator() const {
  if (is_compound()) return name() + "/" + std::to_string(arity());
  if (is_constant()) return name() + "/0";
  return "?/0";
}

bool operator==(const Term& a, const Term& b) {
  if (a.same_node(b)) return true;
  if (!a.valid() || !b.valid()) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Writer:
    case Kind::Reader:
      return a.id() == b.id();
    case Kind::Constant:
      return a.name() == b.name();
    case Kind::Number:
      return a.num() == b.num();
    case Kind::Compound:
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (size_t i = 0; i < a.arity(); ++i)
        if (!(a.arg(i) == b.arg(i))) return false;
      return true;
  }
  return false;
}

uint64_t IdSource::fresh() {
  uint64_t id = next_++;
  created_by_.push_back(current_);
  return id;
}

std::pair<Term, Term> IdSource::fresh_pair(const std::string& hint) {
  uint64_t id = fresh();
  return {Term::writer(id, hint), Term::reader(id, hint)};
}

void IdSource::set_owner(const std::string& owner) {
  for (size_t i = 0; i < owners_.size(); ++i) {
    if (owners_[i] == owner) {
      current_ = static_cast<uint16_t>(i);
      return;
    }
  }
  owners_.push_back(owner);
  current_ = static_cast<uint16_t>(owners_.size() - 1);
}

const std::string& IdSource::creator(uint64_t id) const {
  if (id == 0 || id >= created_by_.size()) return owners_[0];
  return owners_[created_by_[id]];
}

void IdSource::observe(uint64_t id) {
  while (next_ <= id) fresh();
}

bool atom_needs_quotes(const std::string& text) {
  if (text.empty()) return true;
  if (text == "[]") return false;
  if (!(text[0] >= 'a' && text[0] <= 'z')) return true;
  for (char c : text)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return true;
  return false;
}

std::string quote_atom(const std::string& text) {
  if (!atom_needs_quotes(text)) return text;
  std::string out = "'";
  for (char c : text) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

static void print(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Kind::Writer:
      out += "_W" + std::to_string(t.id());
      return;
    case Kind::Reader:
      out += "_W" + std::to_string(t.id()) + "?";
      return;
    case Kind::Constant:
      out += quote_atom(t.name());
      return;
    case Kind::Number:
      out += t.num().str();
      return;
    case Kind::Compound:
      break;
  }
  if (t.is_cons()) {
    out.push_back('[');
    Term cur = t;
    bool first = true;
    while (cur.is_cons()) {
      if (!first) out.push_back(',');
      first = false;
      print(cur.arg(0), out);
      cur = cur.arg(1);
    }
    if (!cur.is_nil()) {
      out.push_back('|');
      print(cur, out);
    }
    out.push_back(']');
    return;
  }
  out += quote_atom(t.name());
  out.push_back('(');
  for (size_t i = 0; i < t.arity(); ++i) {
    if (i) out.push_back(',');
    print(t.arg(i), out);
  }
  out.push_back(')');
}

std::string to_string(const Term& t) {
  std::string out;
  print(t, out);
  return out;
}

void collect_vars(const Term& t, std::vector<Term>& out) {
  std::unordered_set<VarKey, VarKeyHash> seen;
  for (const auto& v : out) seen.insert(key_of(v));
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (cur.is_var()) {
      if (seen.insert(key_of(cur)).second) out.push_back(cur);
    } else if (cur.is_compound()) {
      for (auto it = cur.args().rbegin(); it != cur.args().rend(); ++it) stack.push_back(*it);
    }
  }
}

bool occurs(uint64_t id, const Term& t) {
  if (t.is_var()) return t.id() == id;
  if (!t.is_compound()) return false;
  for (const auto& a : t.args())
    if (occurs(id, a)) return true;
  return false;
}

}  // namespace glp

#include "glp/lp_oracle.hpp"

#include <algorithm>

namespace glp::lp {

Term pure(const Term& t) {
  switch (t.kind()) {
    case Kind::Reader: return Term::writer(t.id());
    case Kind::Compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const auto& a : t.args()) args.push_back(pure(a));
      return Term::compound(t.name(), std::move(args));
    }
    default: return t;
  }
}

Term apply(const Term& t, const Subst& s) {
  if (t.is_var()) {
    auto it = s.find(t.id());
    return it == s.end() ? t : lp::apply(it->second, s);
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(lp::apply(a, s));
  return Term::compound(t.name(), std::move(args));
}

uint64_t max_var_id(const Term& t) {
  if (t.is_var()) return t.id();
  uint64_t m = 0;
  if (t.is_compound())
    for (const auto& a : t.args()) m = std::max(m, max_var_id(a));
  return m;
}

namespace {

Term walk(Term t, const Subst& s) {
  while (t.is_var()) {
    auto it = s.find(t.id());
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

bool occurs_in(uint64_t id, const Term& t, const Subst& s) {
  Term w = walk(t, s);
  if (w.is_var()) return w.id() == id;
  if (!w.is_compound()) return false;
  for (const auto& a : w.args())
    if (occurs_in(id, a, s)) return true;
  return false;
}

bool unify_into(const Term& a0, const Term& b0, Subst& s) {
  std::vector<std::pair<Term, Term>> work{{a0, b0}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    Term a = walk(x, s), b = walk(y, s);
    if (a.is_var() && b.is_var() && a.id() == b.id()) continue;
    if (a.is_var() || b.is_var()) {
      Term v = a.is_var() ? a : b, val = a.is_var() ? b : a;
      if (occurs_in(v.id(), val, s)) return false;
      s.emplace(v.id(), val);
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

void make_idempotent(Subst& s) {
  Subst out;
  for (const auto& [id, v] : s) out.emplace(id, lp::apply(v, s));
  s = std::move(out);
}

bool variant_rec(const Term& a, const Term& b, std::map<uint64_t, uint64_t>& ab, std::map<uint64_t, uint64_t>& ba) {
  if (a.is_var() || b.is_var()) {
    if (!a.is_var() || !b.is_var() || a.kind() != b.kind()) return false;
    auto [i, fresh_a] = ab.emplace(a.id(), b.id());
    auto [j, fresh_b] = ba.emplace(b.id(), a.id());
    return i->second == b.id() && j->second == a.id();
  }
  if (a.kind() != b.kind()) return false;
  if (a.is_constant()) return a.name() == b.name();
  if (a.is_number()) return a.num() == b.num();
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (size_t i = 0; i < a.arity(); ++i)
    if (!variant_rec(a.arg(i), b.arg(i), ab, ba)) return false;
  return true;
}

Term rename(const Term& t, uint64_t base) {
  if (t.is_var()) return Term::writer(base + t.id() - 1);
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(rename(a, base));
  return Term::compound(t.name(), std::move(args));
}

std::vector<std::string> sorted_strings(const std::vector<Term>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(to_string(t));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::optional<Subst> mgu(const Term& a, const Term& b, Subst s) {
  if (!unify_into(a, b, s)) return std::nullopt;
  make_idempotent(s);
  return s;
}

std::optional<Subst> mgu_all(const std::vector<std::pair<Term, Term>>& eqs, Subst s) {
  for (const auto& [a, b] : eqs)
    if (!unify_into(a, b, s)) return std::nullopt;
  make_idempotent(s);
  return s;
}

bool is_variant(const Term& a, const Term& b) {
  std::map<uint64_t, uint64_t> ab, ba;
  return variant_rec(a, b, ab, ba);
}

Program Program::from_module(const Module& m) {
  Program p;
  for (const auto& c : m.clauses) {
    Clause lc;
    lc.head = pure(c.head);
    for (const auto& b : c.body) lc.body.push_back(pure(b));
    lc.nvars = c.nvars;
    p.clauses.push_back(std::move(lc));
  }
  return p;
}

Program Program::from_source(const std::string& text) { return from_module(parse_module(text, "lp")); }

std::optional<Reduction> reduce(const Resolvent& r, size_t index, const Clause& c, uint64_t& next_id) {
  const Term& atom = r.atoms.at(index);
  Term head = rename(c.head, next_id);
  auto m = mgu(atom, head);
  if (!m) return std::nullopt;
  Reduction out;
  for (const auto& b : c.body) out.body.push_back(rename(b, next_id));
  next_id += c.nvars;
  for (size_t i = 0; i < r.atoms.size(); ++i)
    if (i != index) out.next.atoms.push_back(lp::apply(r.atoms[i], *m));
  // Body atoms go first so that leftmost selection is depth-first, as in Prolog.
  std::vector<Term> body;
  for (const auto& b : out.body) body.push_back(lp::apply(b, *m));
  out.next.atoms.insert(out.next.atoms.begin(), body.begin(), body.end());
  for (const auto& [id, v] : r.sigma) out.next.sigma.emplace(id, lp::apply(v, *m));
  for (const auto& [id, v] : *m) out.next.sigma.emplace(id, v);
  out.mgu = std::move(*m);
  return out;
}

namespace {

struct Search {
  const Program& p;
  Term goal;
  uint64_t bound = 0;
  bool cutoff = false;
  std::vector<Term> answers;

  void add(const Term& ans) {
    for (const auto& a : answers)
      if (is_variant(a, ans)) return;
    answers.push_back(ans);
  }

  void dfs(const Resolvent& r, uint64_t depth, uint64_t next_id) {
    if (r.atoms.empty()) {
      add(lp::apply(goal, r.sigma));
      return;
    }
    if (depth == bound) {
      cutoff = true;
      return;
    }
    const Term& a = r.atoms.front();
    if (a.is_compound() && a.name() == "=" && a.arity() == 2) {
      auto m = mgu(a.arg(0), a.arg(1));
      if (!m) return;
      Resolvent next;
      for (size_t i = 1; i < r.atoms.size(); ++i) next.atoms.push_back(lp::apply(r.atoms[i], *m));
      for (const auto& [id, v] : r.sigma) next.sigma.emplace(id, lp::apply(v, *m));
      for (const auto& [id, v] : *m) next.sigma.emplace(id, v);
      dfs(next, depth + 1, next_id);
      return;
    }
    for (const auto& c : p.clauses) {
      if (c.head.indicator() != a.indicator()) continue;
      uint64_t id = next_id;
      auto red = reduce(r, 0, c, id);
      if (red) dfs(red->next, depth + 1, id);
    }
  }
};

}  // namespace

Solutions solve(const Program& p, const Term& goal, uint64_t max_depth) {
  Solutions out;
  Resolvent start;
  start.atoms.push_back(goal);
  uint64_t next_id = max_var_id(goal) + 1;
  for (uint64_t d = 1; d <= max_depth; ++d) {
    Search s{p, goal, d, false, {}};
    s.dfs(start, 0, next_id);
    out.answers = std::move(s.answers);
    out.depth = d;
    if (!s.cutoff) {
      out.exhaustive = true;
      break;
    }
  }
  return out;
}

StepVerdict check_step(const std::vector<Term>& before, size_t index, const Term& head, const std::vector<Term>& body,
                       const Subst& claimed, const std::vector<Term>& after) {
  StepVerdict v;
  if (index >= before.size()) return {false, "selected atom is not in the resolvent"};
  const Term& atom = before[index];
  if (lp::apply(atom, claimed) != lp::apply(head, claimed)) return {false, "claimed substitution does not unify goal and head"};
  auto m = mgu(atom, head);
  if (!m) return {false, "goal and head have no unifier"};
  std::vector<Term> all = before;
  all.push_back(head);
  all.insert(all.end(), body.begin(), body.end());
  Term config = Term::compound("config", all);
  if (!is_variant(lp::apply(config, claimed), lp::apply(config, *m)))
    return {false, "claimed substitution is not a most general unifier"};
  std::vector<Term> expect;
  for (size_t i = 0; i < before.size(); ++i)
    if (i != index) expect.push_back(lp::apply(before[i], claimed));
  for (const auto& b : body) expect.push_back(lp::apply(b, claimed));
  if (sorted_strings(expect) != sorted_strings(after)) return {false, "successor resolvent differs"};
  return v;
}

}  // namespace glp::lp

#pragma once

#include "glp/parser.hpp"
#include "glp/term.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// A small nondeterministic resolution engine for pure logic programs. It knows nothing
// about readers: callers map GLP terms through pure() first. Used as an independent
// oracle by the verifier and the tests.
namespace glp::lp {

// Writer id -> term. Kept idempotent by mgu().
using Subst = std::map<uint64_t, Term>;

// The pure logic variant: every reader X? becomes its paired writer X.
Term pure(const Term& t);
Term apply(const Term& t, const Subst& s);
uint64_t max_var_id(const Term& t);

// Most general unifier with occurs check, extending `s`.
std::optional<Subst> mgu(const Term& a, const Term& b, Subst s = {});
std::optional<Subst> mgu_all(const std::vector<std::pair<Term, Term>>& eqs, Subst s = {});
// Equal up to a bijective renaming of variables.
bool is_variant(const Term& a, const Term& b);

struct Clause {
  Term head;
  std::vector<Term> body;
  uint64_t nvars = 0;
};

struct Program {
  std::vector<Clause> clauses;
  static Program from_module(const Module& m);  // guards are dropped; terms go through pure()
  static Program from_source(const std::string& text);
};

struct Resolvent {
  std::vector<Term> atoms;
  Subst sigma;  // accumulated answer substitution
};

struct Reduction {
  Resolvent next;
  Subst mgu;
  std::vector<Term> body;  // renamed clause body
};

// Reduce atom `index` with clause `c`, renamed apart starting at `next_id` (advanced on
// success). A body atom `=`/2 is not special here; see solve().
std::optional<Reduction> reduce(const Resolvent& r, size_t index, const Clause& c, uint64_t& next_id);

struct Solutions {
  std::vector<Term> answers;  // instances of the goal, distinct up to variant
  bool exhaustive = false;    // the search tree was explored completely
  uint64_t depth = 0;         // final depth bound
};

// Iterative deepening over all derivations (leftmost selection, every clause). `=`/2 body
// atoms are solved by unification.
Solutions solve(const Program& p, const Term& goal, uint64_t max_depth = 64);

struct StepVerdict {
  bool ok = true;
  std::string why;
};

// Checks one resolution step: `claimed` unifies before[index] with `head`, it is most
// general (variant of an independently computed mgu over the whole configuration), and
// `after` equals (before minus the atom, plus body) under `claimed`, as multisets.
StepVerdict check_step(const std::vector<Term>& before, size_t index, const Term& head, const std::vector<Term>& body,
                       const Subst& claimed, const std::vector<Term>& after);

}  // namespace glp::lp

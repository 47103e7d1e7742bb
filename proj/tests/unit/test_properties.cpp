// Randomized properties. Each draws a few thousand cases from a fixed seed.
#include "gen.hpp"

#include "glp/corpus.hpp"
#include "glp/engine.hpp"
#include "glp/lp_oracle.hpp"
#include "glp/parser.hpp"
#include "glp/rewrite.hpp"
#include "glp/security.hpp"
#include "glp/unify.hpp"
#include "glp/verifier.hpp"

#include <doctest.h>
#include <gmpxx.h>

#include <set>

using namespace glp;

namespace {

constexpr uint64_t kReaderOffset = 1000;

// Readers and writers as unrelated variables, so the plain mgu is the regular unifier.
Term split_polarity(const Term& t) {
  if (t.is_reader()) return Term::writer(t.id() + kReaderOffset);
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(split_polarity(a));
  return Term::compound(t.name(), std::move(args));
}

mpq_class rational(const Decimal& d) {
  mpz_class den = 1;
  for (unsigned i = 0; i < d.scale(); ++i) den *= 10;
  mpq_class q(d.unscaled(), den);
  q.canonicalize();
  return q;
}

Decimal random_decimal(gen::Gen& g) {
  std::string s = (g.coin(0.3) ? "-" : "") + std::to_string(g.below(10000));
  if (g.coin()) s += "." + std::to_string(g.below(1000));
  return *Decimal::parse(s);
}

const char* kMerge =
    "merge([X|Xs],Ys,[X?|Zs?]) :- merge(Ys?,Xs?,Zs).\n"
    "merge(Xs,[Y|Ys],[Y?|Zs?]) :- merge(Xs?,Ys?,Zs).\n"
    "merge([],[],[]).\n";

}  // namespace

TEST_CASE("property: writer_unify success is a most general writer unifier") {
  gen::Gen g(101);
  BindingStore empty;
  int successes = 0;
  for (int i = 0; i < 4000; ++i) {
    Term a = g.term(3), b = g.term(3);
    CAPTURE(to_string(a));
    CAPTURE(to_string(b));
    auto o = writer_unify(a, b, View(empty));
    auto oracle = lp::mgu(split_polarity(a), split_polarity(b));
    if (!oracle) {
      REQUIRE_FALSE(o.success());
      continue;
    }
    if (o.failed() && o.reason == FailReason::Clash) FAIL("clash reported although a unifier exists");
    if (!o.success()) continue;
    ++successes;
    Substitution s = o.substitution();
    Term as = apply(a, s), bs = apply(b, s);
    REQUIRE(as == bs);
    for (const auto& [id, v] : o.bindings) {
      REQUIRE_FALSE(v.is_writer());
      REQUIRE_FALSE(occurs(id, apply(v, s)));
    }
    Term config = Term::compound("c", {a, b});
    REQUIRE(lp::is_variant(split_polarity(apply(config, s)), lp::apply(split_polarity(config), *oracle)));
  }
  CHECK(successes > 200);
}

TEST_CASE("property: writer_unify is deterministic") {
  gen::Gen g(202);
  BindingStore store;
  store.bind(1, Term::constant("a"));
  for (int i = 0; i < 1000; ++i) {
    Term a = g.term(3), b = g.term(3);
    auto x = writer_unify(a, b, View(store)), y = writer_unify(a, b, View(store));
    REQUIRE(x.kind == y.kind);
    REQUIRE(x.bindings.size() == y.bindings.size());
    for (size_t k = 0; k < x.bindings.size(); ++k) {
      REQUIRE(x.bindings[k].first == y.bindings[k].first);
      REQUIRE(x.bindings[k].second == y.bindings[k].second);
    }
    REQUIRE(x.blockers == y.blockers);
  }
}

TEST_CASE("property: instantiating a blocker never makes unification less defined") {
  gen::Gen g(303);
  int suspensions = 0;
  for (int i = 0; i < 4000; ++i) {
    Term a = g.term(3), b = g.term(3);
    BindingStore store;
    auto before = writer_unify(a, b, View(store));
    if (!before.suspended()) continue;
    ++suspensions;
    Term blocker = before.blockers[g.below(before.blockers.size())];
    // Values mention only ids outside the generated range, as a fresh writer would.
    Term value = g.coin() ? g.ground(2) : Term::compound("f", {Term::writer(50 + g.below(3))});
    store.bind(blocker.id(), value);
    auto after = writer_unify(a, b, View(store));
    CAPTURE(to_string(a));
    CAPTURE(to_string(b));
    if (after.suspended()) {
      for (const auto& r : after.blockers) REQUIRE(r.id() != blocker.id());
      std::set<uint64_t> old_ids;
      for (const auto& r : before.blockers) old_ids.insert(r.id());
      for (const auto& r : after.blockers) REQUIRE((old_ids.count(r.id()) || r.id() >= 50));
    }
  }
  CHECK(suspensions > 200);
}

TEST_CASE("property: substitutions are idempotent") {
  gen::Gen g(404);
  for (int i = 0; i < 3000; ++i) {
    Term a = g.term(3, 4, false), b = g.term(3, 4, false);
    auto s = lp::mgu(a, b);
    if (!s) continue;
    Term t = g.term(3, 4, false);
    REQUIRE(lp::apply(lp::apply(t, *s), *s) == lp::apply(t, *s));
    REQUIRE(lp::apply(a, *s) == lp::apply(b, *s));
  }
  BindingStore empty;
  for (int i = 0; i < 3000; ++i) {
    Term a = g.term(3), b = g.term(3);
    auto o = writer_unify(a, b, View(empty));
    if (!o.success()) continue;
    Substitution s = o.substitution();
    Term t = g.term(3);
    REQUIRE(apply(apply(t, s), s) == apply(t, s));
  }
}

TEST_CASE("property: canonical printing round trips") {
  gen::Gen g(505);
  for (int i = 0; i < 3000; ++i) {
    Term t = g.coin() ? g.ground(4) : g.term(4, 6);
    std::string s = to_string(t);
    CAPTURE(s);
    REQUIRE(parse_term(s, true).term == t);
  }
}

TEST_CASE("property: decimal arithmetic agrees with exact rationals") {
  gen::Gen g(606);
  for (int i = 0; i < 3000; ++i) {
    Decimal a = random_decimal(g), b = random_decimal(g);
    REQUIRE(rational(a + b) == rational(a) + rational(b));
    REQUIRE(rational(a - b) == rational(a) - rational(b));
    REQUIRE(rational(a * b) == rational(a) * rational(b));
    REQUIRE((a < b) == (rational(a) < rational(b)));
    REQUIRE(*Decimal::parse(a.str()) == a);
    if (!b.is_zero()) {
      // Truncated to kDivisionDigits places: the error is below one unit in the last place.
      mpq_class err = rational(*Decimal::divide(a, b)) - rational(a) / rational(b);
      mpz_class ulp = 1;
      for (unsigned k = 0; k < Decimal::kDivisionDigits; ++k) ulp *= 10;
      REQUIRE(abs(err) < mpq_class(1, ulp));
    }
  }
}

TEST_CASE("property: merge output interleaves its inputs; equal lengths alternate") {
  gen::Gen g(707);
  Program p = Program::from_source(kMerge);
  for (int i = 0; i < 150; ++i) {
    auto xs = g.items(g.below(7), "x"), ys = g.items(g.below(7), "y");
    IdSource ids;
    Engine e(p, ids);
    auto [zw, zr] = ids.fresh_pair("Zs");
    e.spawn(Term::compound("merge", {Term::list(xs), Term::list(ys), zw}));
    REQUIRE(e.run(1000) == RunStatus::QuiescentSuccess);
    Term zs = e.resolve(zw);
    CAPTURE(to_string(zs));
    REQUIRE(is_interleaving(zs, Term::list({Term::list(xs), Term::list(ys)})));
    if (xs.size() == ys.size()) {
      std::vector<Term> alt;
      for (size_t k = 0; k < xs.size(); ++k) {
        alt.push_back(xs[k]);
        alt.push_back(ys[k]);
      }
      REQUIRE(zs == Term::list(alt));
    }
  }
}

TEST_CASE("property: on ground merges the GLP result is an LP answer") {
  gen::Gen g(808);
  Program p = Program::from_source(kMerge);
  lp::Program lpp = lp::Program::from_module(parse_module(kMerge, "merge"));
  for (int i = 0; i < 40; ++i) {
    auto xs = g.items(g.below(4), "x"), ys = g.items(g.below(4), "y");
    IdSource ids;
    ids.observe(1);
    Engine e(p, ids);
    Term goal = Term::compound("merge", {Term::list(xs), Term::list(ys), Term::writer(1)});
    e.spawn(goal);
    REQUIRE(e.run(1000) == RunStatus::QuiescentSuccess);
    Term answer = e.resolve(goal);
    auto sols = lp::solve(lpp, goal);
    REQUIRE(sols.exhaustive);
    bool found = false;
    for (const auto& s : sols.answers) found = found || s == answer;
    CAPTURE(to_string(answer));
    REQUIRE(found);
  }
}

TEST_CASE("property: random merge trees keep srsw, acyclicity and deduction") {
  gen::Gen g(909);
  Program p = Program::from_source(kMerge);
  ProgramSet ps;
  ps.fallback = &p;
  for (int i = 0; i < 25; ++i) {
    // A left-leaning tree: merge(S1, S2, T1), merge(T1?, S3, T2), ...
    uint64_t leaves = 2 + g.below(4);
    std::string goal;
    std::string prev = "[" + std::to_string(g.below(9)) + "]";
    for (uint64_t k = 1; k < leaves; ++k) {
      std::string leaf = "[";
      for (uint64_t j = g.below(4); j > 0; --j) leaf += std::to_string(g.below(9)) + (j > 1 ? "," : "");
      leaf += "]";
      std::string out = "T" + std::to_string(k);
      goal += (goal.empty() ? "" : ", ") + ("merge(" + prev + ", " + leaf + ", " + out + ")");
      prev = out + "?";
    }
    auto run = engine_run(p, goal, 2000);
    CAPTURE(goal);
    REQUIRE(run.status == RunStatus::QuiescentSuccess);
    for (const auto& v : run_checks(run.trace, ps, {"srsw", "acyclic", "deduction", "streams"})) {
      CAPTURE(v.str());
      REQUIRE(v.ok);
    }
  }
}

TEST_CASE("property: envelopes reject tampering and wrong recipients") {
  gen::Gen g(1010);
  for (const char* name : {"mock", "real"}) {
    auto cp = make_provider(name);
    std::vector<KeyPair> keys;
    std::vector<Bytes> known;
    for (uint64_t s = 1; s <= 4; ++s) {
      keys.push_back(cp->keypair(s));
      known.push_back(keys.back().pub);
    }
    for (int i = 0; i < 100; ++i) {
      size_t from = g.below(4), to = g.below(4);
      Bytes payload;
      for (uint64_t k = 1 + g.below(40); k > 0; --k) payload.push_back(static_cast<uint8_t>(g.below(256)));
      Bytes wire = seal(*cp, payload, "m_x", keys[from], keys[to].pub, i);
      REQUIRE(open_envelope(*cp, wire, keys[to], known).ok);
      Bytes bad = wire;
      bad[g.below(bad.size())] ^= static_cast<uint8_t>(1 + g.below(255));
      REQUIRE_FALSE(open_envelope(*cp, bad, keys[to], known).ok);
      REQUIRE_FALSE(open_envelope(*cp, wire, keys[(to + 1) % 4], known).ok);
    }
  }
}

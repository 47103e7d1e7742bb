#include "glp/corpus.hpp"
#include "glp/parser.hpp"

#include <doctest.h>

using namespace glp;

TEST_CASE("clause structure: head, guard, body") {
  Module m = parse_module("p(X?, Y) :- X? = a, ground(Z) | q(Y?, Z?), r.\nq(_, _).\nr.\n", "t");
  REQUIRE(m.clauses.size() == 3);
  const Clause& c = m.clauses[0];
  CHECK(c.head.indicator() == "p/2");
  CHECK(c.has_guard);
  CHECK(c.guard.size() == 2);
  CHECK(c.body.size() == 2);
  CHECK(c.nvars == 3);
  CHECK(m.clauses[2].head.indicator() == "r/0");
}

TEST_CASE("list sugar and operators") {
  auto p = parse_term("[X|Xs?]");
  CHECK(p.term.is_cons());
  CHECK(p.term.arg(1).is_reader());
  CHECK(to_string(parse_term("X := Y? + 1 * 2").term.arg(1)) == "'+'(_W2?,'*'(1,2))");
  CHECK(to_string(parse_term("[a,b]").term) == "[a,b]");
  CHECK(to_string(parse_term("\"hi\"").term).size() > 0);
}

TEST_CASE("canonical mode keeps pair ids") {
  auto p = parse_term("f(_W12, _W12?)", true);
  CHECK(p.term.arg(0).id() == 12);
  CHECK(p.term.arg(1).is_reader());
  CHECK_THROWS(parse_term("f(X)", true));
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_module("p(a :- q.\n", "bad");
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("srsw flags a repeated writer and a repeated reader") {
  Module m = parse_module("p(X, X) :- q(Y?, Y?).\n", "t");
  REQUIRE(m.srsw.size() == 2);
  CHECK_FALSE(m.srsw[0].reader);
  CHECK(m.srsw[0].var == "X");
  CHECK(m.srsw[1].reader);
  CHECK(m.writer_violations());
}

TEST_CASE("srsw: anonymous variables and ground-guarded readers are fine") {
  CHECK(parse_module("p(_, _, X) :- q(X?).\n", "t").srsw.empty());
  CHECK(parse_module("p(X) :- ground(X) | q(X?), r(X?).\n", "t").srsw.empty());
}

TEST_CASE("print then parse is stable on every corpus module") {
  for (const auto& e : load_corpus()) {
    CAPTURE(e.name);
    std::string once = print_module(e.module);
    Module again = parse_module(once, e.module.name);
    CHECK(print_module(again) == once);
    CHECK(module_hash(again) == e.module.hash);
  }
}

TEST_CASE("module hash ignores layout and comments") {
  Module a = parse_module("p(X?) :- q(X).\n", "m");
  Module b = parse_module("% comment\np( X? ):-\n   q(X).", "m");
  Module c = parse_module("p(X?) :- r(X).\n", "m");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
}

TEST_CASE("parse_canonical_terms reads a dot-separated sequence") {
  auto ts = parse_canonical_terms("f(_W1). [a|_W2?]. 'x y'.");
  REQUIRE(ts.size() == 3);
  CHECK(ts[2] == Term::constant("x y"));
}

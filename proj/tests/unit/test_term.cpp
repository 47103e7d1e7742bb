#include "glp/decimal.hpp"
#include "glp/store.hpp"
#include "glp/term.hpp"

#include <doctest.h>

using namespace glp;

TEST_CASE("reader_of is identity on readers and non-variables") {
  Term x = Term::writer(4);
  Term r = Term::reader_of(x);
  CHECK(r.is_reader());
  CHECK(r.id() == 4);
  CHECK(Term::reader_of(r) == r);
  Term a = Term::constant("a");
  CHECK(Term::reader_of(a) == a);
  CHECK(Term::writer_of(r) == x);
}

TEST_CASE("canonical printing") {
  CHECK(to_string(Term::list({Term::number(1), Term::constant("a")})) == "[1,a]");
  CHECK(to_string(Term::cons(Term::constant("a"), Term::reader(3))) == "[a|_W3?]");
  CHECK(to_string(Term::compound("=", {Term::writer(1), Term::constant("b")})) == "'='(_W1,b)");
  CHECK(to_string(Term::constant("Hello")) == "'Hello'");
  CHECK(to_string(Term::constant("it's")) == "'it\\'s'");
  CHECK(to_string(Term::nil()) == "[]");
}

TEST_CASE("structural equality ignores name hints") {
  CHECK(Term::writer(2, "X") == Term::writer(2, "Y"));
  CHECK(Term::writer(2) != Term::reader(2));
  CHECK(Term::number(Decimal::parse("1.50").value()) == Term::number(Decimal::parse("1.5").value()));
}

TEST_CASE("IdSource hands out increasing ids and remembers creators") {
  IdSource ids;
  ids.set_owner("p");
  uint64_t a = ids.fresh();
  ids.set_owner("q");
  auto [w, r] = ids.fresh_pair("X");
  CHECK(w.id() > a);
  CHECK(r.id() == w.id());
  CHECK(ids.creator(a) == "p");
  CHECK(ids.creator(w.id()) == "q");
  ids.observe(100);
  CHECK(ids.fresh() == 101);
}

TEST_CASE("collect_vars and occurs") {
  Term t = Term::compound("f", {Term::writer(1), Term::compound("g", {Term::reader(2), Term::writer(1)})});
  std::vector<Term> vs;
  collect_vars(t, vs);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0] == Term::writer(1));
  CHECK(vs[1] == Term::reader(2));
  CHECK(occurs(2, t));
  CHECK_FALSE(occurs(3, t));
}

TEST_CASE("decimal arithmetic is exact") {
  auto d = [](const char* s) { return Decimal::parse(s).value(); };
  CHECK((d("0.1") + d("0.2")).str() == "0.3");
  CHECK((d("1.25") * d("4")).str() == "5");
  CHECK((d("3") - d("5.5")).str() == "-2.5");
  CHECK(Decimal::divide(d("1"), d("4"))->str() == "0.25");
  CHECK_FALSE(Decimal::divide(d("1"), d("0")).has_value());
  CHECK(Decimal::mod(d("-7"), d("3"))->str() == "2");
  CHECK_FALSE(Decimal::mod(d("7.5"), d("3")).has_value());
  CHECK(d("2.50").str() == "2.5");
  CHECK(d("10") < d("10.01"));
}

TEST_CASE("binding store keeps single assignment") {
  BindingStore s;
  s.bind(1, Term::constant("a"));
  CHECK(s.bound(1));
  CHECK_THROWS(s.bind(1, Term::constant("b")));
  View v(s);
  CHECK(v.resolve(Term::compound("f", {Term::reader(1)})) == Term::compound("f", {Term::constant("a")}));
}

TEST_CASE("View::resolve reports cycles") {
  BindingStore s;
  s.bind(1, Term::compound("f", {Term::reader(2)}));
  s.bind(2, Term::compound("g", {Term::reader(1)}));
  CHECK_THROWS_AS(View(s).resolve(Term::writer(1)), InternalCorruption);
}

TEST_CASE("reader counterpart of a writer substitution") {
  Substitution s;
  s.bind(Term::writer(3), Term::constant("x"));
  Substitution r = reader_counterpart(s);
  REQUIRE(r.lookup(VarKey{3, true}));
  CHECK(*r.lookup(VarKey{3, true}) == Term::constant("x"));
  Substitution bad;
  bad.bind(Term::reader(3), Term::constant("x"));
  CHECK_THROWS_AS(reader_counterpart(bad), ContractViolation);
}

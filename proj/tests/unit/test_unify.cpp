#include "glp/parser.hpp"
#include "glp/unify.hpp"

#include <doctest.h>

using namespace glp;

namespace {

Term t(const std::string& s) { return parse_term(s, true).term; }

UnifyOutcome unify(const std::string& a, const std::string& b, const BindingStore& store = BindingStore()) {
  return writer_unify(t(a), t(b), View(store));
}

}  // namespace

TEST_CASE("writer binds to a term") {
  auto o = unify("_W1", "f(a)");
  REQUIRE(o.success());
  REQUIRE(o.bindings.size() == 1);
  CHECK(o.bindings[0].first == 1);
  CHECK(o.bindings[0].second == t("f(a)"));
}

TEST_CASE("writer against reader binds the writer") {
  auto o = unify("f(_W1,b)", "f(_W2?,b)");
  REQUIRE(o.success());
  CHECK(o.bindings[0].first == 1);
  CHECK(o.bindings[0].second == t("_W2?"));
}

TEST_CASE("two writers fail") {
  auto o = unify("_W1", "_W2");
  CHECK(o.failed());
  CHECK(o.reason == FailReason::WriterWriter);
}

TEST_CASE("reader needing a value suspends") {
  auto o = unify("_W1?", "a");
  REQUIRE(o.suspended());
  REQUIRE(o.blockers.size() == 1);
  CHECK(o.blockers[0] == t("_W1?"));
}

TEST_CASE("bound reader is dereferenced through the store") {
  BindingStore s;
  s.bind(1, t("a"));
  CHECK(unify("_W1?", "a", s).success());
  CHECK(unify("_W1?", "b", s).failed());
}

TEST_CASE("clash and occurs check fail") {
  CHECK(unify("f(a)", "f(b)").reason == FailReason::Clash);
  CHECK(unify("f(a)", "g(a,b)").failed());
  auto o = unify("_W1", "f(_W1?)");
  CHECK(o.failed());
  CHECK(o.reason == FailReason::Cycle);
}

TEST_CASE("a clash elsewhere beats a suspension") {
  CHECK(unify("f(_W1?,a)", "f(b,c)").failed());
}

TEST_CASE("local readers never block") {
  UnifyOptions opts;
  opts.local_from = 10;
  auto o = writer_unify(t("_W10?"), t("a"), View(BindingStore()), opts);
  CHECK(o.failed());
  CHECK(o.reason == FailReason::ReaderNeedsValue);
}

TEST_CASE("unify_equations threads bindings") {
  std::vector<std::pair<Term, Term>> eqs = {{t("_W1"), t("a")}, {t("_W2"), t("g(_W1?)")}};
  auto o = unify_equations(eqs, View(BindingStore()));
  REQUIRE(o.success());
  CHECK(o.bindings.size() == 2);
}

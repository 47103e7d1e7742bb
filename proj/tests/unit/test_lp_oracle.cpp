#include "glp/corpus.hpp"
#include "glp/lp_oracle.hpp"
#include "glp/parser.hpp"

#include <doctest.h>

using namespace glp;

namespace {

Term t(const std::string& s) { return parse_term(s, true).term; }

lp::Program append() { return lp::Program::from_module(load_module_file(default_corpus_dir() + "/lp/append.lp")); }

}  // namespace

TEST_CASE("mgu is idempotent and unifies") {
  auto s = lp::mgu(t("f(_W1,g(_W2))"), t("f(h(_W2),g(a))"));
  REQUIRE(s.has_value());
  CHECK(to_string(lp::apply(t("_W1"), *s)) == "h(a)");
  for (const auto& [id, v] : *s) CHECK(lp::apply(v, *s) == v);
}

TEST_CASE("mgu: occurs check and clash") {
  CHECK_FALSE(lp::mgu(t("_W1"), t("f(_W1)")).has_value());
  CHECK_FALSE(lp::mgu(t("f(a)"), t("f(b)")).has_value());
  CHECK(lp::mgu(t("_W1"), t("_W1")).has_value());
}

TEST_CASE("pure forgets reader polarity") {
  CHECK(lp::pure(t("f(_W3?,[_W4?|_W5])")) == t("f(_W3,[_W4|_W5])"));
}

TEST_CASE("is_variant needs a bijection") {
  CHECK(lp::is_variant(t("f(_W1,_W2)"), t("f(_W7,_W9)")));
  CHECK_FALSE(lp::is_variant(t("f(_W1,_W1)"), t("f(_W7,_W9)")));
  CHECK_FALSE(lp::is_variant(t("f(_W1,_W2)"), t("f(_W7,_W7)")));
  CHECK_FALSE(lp::is_variant(t("f(_W1)"), t("f(a)")));
}

TEST_CASE("append: forward, backward and split") {
  lp::Program p = append();
  auto one = lp::solve(p, t("append([a],[b],_W1)"));
  REQUIRE(one.exhaustive);
  REQUIRE(one.answers.size() == 1);
  CHECK(to_string(one.answers[0]) == "append([a],[b],[a,b])");
  CHECK(lp::solve(p, t("append(_W1,_W2,[a])")).answers.size() == 2);
  CHECK(lp::solve(p, t("append(_W1,_W2,[a,b,c])")).answers.size() == 4);
  CHECK(lp::solve(p, t("append(_W1,[c],[a,b,c])")).answers.size() == 1);
  CHECK(lp::solve(p, t("append(_W1,[x],[a,b,c])")).answers.empty());
}

TEST_CASE("solve reports a non-exhaustive search on an infinite tree") {
  auto s = lp::solve(append(), t("append(_W1,[a],_W2)"), 6);
  CHECK_FALSE(s.exhaustive);
  CHECK(s.answers.size() >= 5);
}

TEST_CASE("check_step accepts a genuine step and rejects doctored ones") {
  lp::Program p = append();
  lp::Resolvent r;
  r.atoms = {t("append([a],[b],_W1)"), t("q(_W1)")};
  uint64_t next = 10;
  auto red = lp::reduce(r, 0, p.clauses[1], next);
  REQUIRE(red.has_value());
  Term head = Term::compound("append", {t("[_W10|_W11]"), t("_W12"), t("[_W10|_W13]")});
  CHECK(lp::check_step(r.atoms, 0, head, red->body, red->mgu, red->next.atoms).ok);

  lp::Subst too_specific = red->mgu;
  too_specific[13] = t("[b]");
  CHECK_FALSE(lp::check_step(r.atoms, 0, head, red->body, too_specific, red->next.atoms).ok);

  auto wrong_after = red->next.atoms;
  wrong_after.pop_back();
  CHECK_FALSE(lp::check_step(r.atoms, 0, head, red->body, red->mgu, wrong_after).ok);
}

TEST_CASE("merge with ground inputs: the GLP answer is among the LP answers") {
  auto corpus = load_corpus();
  lp::Program p = lp::Program::from_module(find_entry(corpus, "merge").module);
  auto s = lp::solve(p, t("merge([1,2],[a],_W1)"));
  REQUIRE(s.exhaustive);
  bool found = false;
  for (const auto& a : s.answers) found = found || to_string(a) == "merge([1,2],[a],[1,a,2])";
  CHECK(found);
  CHECK(s.answers.size() == 3);
}

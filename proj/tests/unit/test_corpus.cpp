#include "glp/corpus.hpp"
#include "glp/parser.hpp"

#include <doctest.h>

#include <map>

using namespace glp;

namespace {
Term t(const std::string& s) { return parse_term(s).term; }
}  // namespace

TEST_CASE("every listing caption is covered by exactly one entry") {
  auto corpus = load_corpus();
  std::map<std::string, int> covered;
  for (const auto& e : corpus)
    for (const auto& l : e.loci) ++covered[l];
  for (const auto& c : listing_captions()) {
    CAPTURE(c);
    CHECK(covered[c] == 1);
  }
  for (const auto& [c, n] : covered) {
    CAPTURE(c);
    CHECK(std::find(listing_captions().begin(), listing_captions().end(), c) != listing_captions().end());
  }
}

TEST_CASE("normalized entries say what changed") {
  for (const auto& e : load_corpus()) {
    CAPTURE(e.name);
    bool verbatim = e.source.find("Verbatim") != std::string::npos || e.source.find("verbatim") != std::string::npos;
    CHECK((verbatim || !e.notes.empty()));
  }
}

TEST_CASE("shipped entries satisfy the single-reader/single-writer rule") {
  for (const auto& e : load_corpus()) {
    CAPTURE(e.name);
    CHECK(e.module.srsw.empty());
  }
}

TEST_CASE("every expectation holds") {
  auto corpus = load_corpus();
  for (const auto& e : corpus)
    for (const auto& r : e.runs) {
      CAPTURE(r.text);
      auto res = run_expectation(e, r, corpus);
      CHECK_MESSAGE(res.ok, res.detail);
    }
}

TEST_CASE("pattern_match treats pattern variables as wildcards") {
  CHECK(pattern_match(t("[a,X|_]"), t("[a,b,c]")));
  CHECK_FALSE(pattern_match(t("[a,b]"), t("[a,c]")));
  CHECK_FALSE(pattern_match(t("f(a)"), parse_term("f(_W3)", true).term));
}

TEST_CASE("is_interleaving keeps each list's order") {
  CHECK(is_interleaving(t("[1,a,2,b]"), t("[[1,2],[a,b]]")));
  CHECK(is_interleaving(t("[a,b,1,2]"), t("[[1,2],[a,b]]")));
  CHECK_FALSE(is_interleaving(t("[2,1,a,b]"), t("[[1,2],[a,b]]")));
  CHECK_FALSE(is_interleaving(t("[1,a,2]"), t("[[1,2],[a,b]]")));
}

TEST_CASE("the response-processing defects are the two repeated-writer unit clauses") {
  auto d = srsw_defects(defects_path());
  REQUIRE(d.size() == 2);
  CHECK(d[0].clause == "bind_response(no,_,no,Fs,Fs,In,In)");
  CHECK(d[1].clause == "handle_response(no,_,Fs,Fs,In,In)");
  for (const auto& r : d) {
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0].var == "Fs");
    CHECK(r.violations[1].var == "In");
  }
}

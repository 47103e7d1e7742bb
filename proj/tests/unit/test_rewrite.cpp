#include "glp/corpus.hpp"
#include "glp/rewrite.hpp"

#include <doctest.h>

using namespace glp;

TEST_CASE("rewrite and engine agree on merge") {
  Program p = Program::from_source(
      "merge([X|Xs],Ys,[X?|Zs?]) :- merge(Ys?,Xs?,Zs).\n"
      "merge(Xs,[Y|Ys],[Y?|Zs?]) :- merge(Xs?,Ys?,Zs).\n"
      "merge([],[],[]).\n");
  auto a = engine_run(p, "merge([1,2,3],[a,b],Zs)", 100);
  auto b = rewrite_run(p, "merge([1,2,3],[a,b],Zs)", 100);
  CHECK(a.status == RunStatus::QuiescentSuccess);
  CHECK(b.status == a.status);
  CHECK(normalize_trace(a.trace) == normalize_trace(b.trace));
}

TEST_CASE("rewrite and engine agree on suspension and wake-up") {
  Program p = Program::from_source("p(X?) :- q(Y?, X), r(Y).\nq(a, X?) :- X = done.\nr(a).\n");
  auto a = engine_run(p, "p(Z)", 50);
  auto b = rewrite_run(p, "p(Z)", 50);
  CHECK(a.status == RunStatus::QuiescentSuccess);
  CHECK(normalize_trace(a.trace) == normalize_trace(b.trace));
  bool suspended = false;
  for (const auto& r : a.trace) suspended = suspended || r.kind == "suspend";
  CHECK(suspended);
}

TEST_CASE("normalize_trace renumbers ids by first occurrence") {
  std::vector<TraceRecord> t(1);
  t[0].step = 1;
  t[0].agent = "local";
  t[0].kind = "inject";
  t[0].set("gid", "1").set("boot", "f(_W40,_W17?,_W40?)");
  auto n = normalize_trace(t);
  REQUIRE(n.size() == 1);
  CHECK(n[0].find("f(_W1,_W2?,_W1?)") != std::string::npos);
}

TEST_CASE("a different run does not normalize to the same trace") {
  Program p = Program::from_source("p(a).\np(b).\n");
  auto a = engine_run(p, "p(a)", 10);
  auto b = rewrite_run(p, "p(b)", 10);
  CHECK(normalize_trace(a.trace) != normalize_trace(b.trace));
}

#include "glp/corpus.hpp"
#include "glp/engine.hpp"
#include "glp/parser.hpp"

#include <doctest.h>

#include <set>

using namespace glp;

namespace {

const char* kMerge =
    "merge([X|Xs],Ys,[X?|Zs?]) :- merge(Ys?,Xs?,Zs).\n"
    "merge(Xs,[Y|Ys],[Y?|Zs?]) :- merge(Xs?,Ys?,Zs).\n"
    "merge([],[],[]).\n";

struct Run {
  Program program;
  IdSource ids;
  Engine engine;
  std::map<std::string, Term> vars;
  RunStatus status;
  std::vector<TraceRecord> trace;
  Run(const std::string& src, const std::string& goal, uint64_t fuel = 1000)
      : program(Program::from_source(src)), engine(program, ids) {
    vars = engine.spawn_text(goal);
    status = engine.run(fuel, &trace);
  }
  std::string value(const std::string& name) const { return to_string(engine.resolve(vars.at(name))); }
};

}  // namespace

TEST_CASE("merge runs to quiescent success") {
  Run r(kMerge, "merge([1,2,3],[a],Zs)");
  CHECK(r.status == RunStatus::QuiescentSuccess);
  CHECK(r.value("Zs") == "[1,a,2,3]");
}

TEST_CASE("a goal on an unbound reader suspends and the run deadlocks") {
  Run r(kMerge, "merge(Xs?,[],Zs)");
  CHECK(r.status == RunStatus::Deadlock);
  REQUIRE(r.engine.suspended().size() == 1);
  bool saw_suspend = false;
  for (const auto& rec : r.trace)
    if (rec.kind == "suspend") saw_suspend = rec.at("blockers").find('?') != std::string::npos;
  CHECK(saw_suspend);
}

TEST_CASE("a goal with no matching clause fails") {
  Run r(kMerge, "merge(a,b,Zs)");
  CHECK(r.status == RunStatus::Failed);
  CHECK(r.engine.failed().size() == 1);
}

TEST_CASE("suspended goal wakes when its blocker is delivered") {
  Program p = Program::from_source(kMerge);
  IdSource ids;
  Engine e(p, ids);
  auto vars = e.spawn_text("merge(Xs?,[],Zs)");
  CHECK(e.run(10) == RunStatus::Deadlock);
  auto woken = e.deliver(vars.at("Xs").id(), Term::nil());
  CHECK(woken.size() == 1);
  CHECK(e.run(10) == RunStatus::QuiescentSuccess);
  CHECK(to_string(e.resolve(vars.at("Zs"))) == "[]");
}

TEST_CASE("a blocker whose writer vanished fails the waiting goal") {
  Program p = Program::from_source(kMerge);
  IdSource ids;
  Engine e(p, ids);
  auto vars = e.spawn_text("merge(Xs?,[],Zs)");
  e.run(10);
  e.abandon(VarKey{vars.at("Xs").id(), true});
  CHECK(e.run(10) == RunStatus::Failed);
}

TEST_CASE("arithmetic through := and evaluate") {
  Run r("go(X?) :- Y := 2 * 3 + 1, twice(Y?, X).\ntwice(N, M?) :- M := N? * 2.\n", "go(R)");
  CHECK(r.status == RunStatus::QuiescentSuccess);
  CHECK(r.value("R") == "14");
}

TEST_CASE("guards: otherwise, comparison, known") {
  const char* src =
      "cls(N, small) :- N? < 10 | true.\n"
      "cls(_, big) :- otherwise | true.\n"
      "k(X, yes) :- known(X) | true.\n";
  CHECK(Run(src, "cls(3, S)").value("S") == "small");
  CHECK(Run(src, "cls(30, S)").value("S") == "big");
  Run waiting(src, "k(X?, A)");
  CHECK(waiting.status == RunStatus::Deadlock);
}

TEST_CASE("fuel bounds the run") {
  Run r("loop(X) :- loop(X?).\n", "loop(a)", 25);
  CHECK(r.status == RunStatus::FuelExhausted);
  CHECK(r.engine.reductions() == 25);
}

TEST_CASE("committable lists the clauses that would commit now") {
  Program p = Program::from_source(kMerge);
  IdSource ids;
  Engine e(p, ids);
  auto [w, r] = ids.fresh_pair();
  Term goal = parse_term("merge([1],[a],_W" + std::to_string(w.id()) + ")", true).term;
  auto c = e.committable(goal);
  CHECK(c == std::vector<size_t>{0, 1});
}

TEST_CASE("each goal is in exactly one of active, suspended, failed; failed never shrinks") {
  for (const auto& e : load_corpus()) {
    auto paths = entry_paths(e, load_corpus());
    Program p = Program::from_files(paths);
    for (const auto& r : e.runs) {
      CAPTURE(r.text);
      IdSource ids;
      ids.observe(r.nvars);
      Engine eng(p, ids);
      eng.spawn_conjunction(r.goal);
      size_t failed_before = 0;
      for (uint64_t step = 1; step <= 2000 && eng.has_active(); ++step) {
        eng.step(step);
        std::set<uint64_t> seen;
        bool disjoint = true;
        for (const auto& g : eng.queue()) disjoint = disjoint && seen.insert(g.gid).second;
        for (const auto& [gid, s] : eng.suspended()) disjoint = disjoint && seen.insert(gid).second;
        for (const auto& [g, why] : eng.failed()) disjoint = disjoint && seen.insert(g.gid).second;
        REQUIRE(disjoint);
        REQUIRE(eng.failed().size() >= failed_before);
        failed_before = eng.failed().size();
      }
    }
  }
}

TEST_CASE("reduce records carry the committed substitution") {
  Run r(kMerge, "merge([1],[],Zs)");
  const TraceRecord* reduce = nullptr;
  for (const auto& rec : r.trace)
    if (rec.kind == "reduce") {
      reduce = &rec;
      break;
    }
  REQUIRE(reduce);
  CHECK(reduce->at("clause") == "0");
  CHECK(reduce->at("sigma").find("'='(") != std::string::npos);
}

// Acceptance criteria 1-11, one line each. Exit status is the number of failures.
#include "glp/corpus.hpp"
#include "glp/engine.hpp"
#include "glp/lp_oracle.hpp"
#include "glp/multiagent.hpp"
#include "glp/parser.hpp"
#include "glp/rewrite.hpp"
#include "glp/security.hpp"
#include "glp/verifier.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace glp;

namespace {

// Pinned limits.
constexpr uint64_t kTheoremTxLimit = 5000;
constexpr uint64_t kEquivalenceStepLimit = 200;
constexpr uint64_t kMonotonicitySamples = 16;
constexpr int kEnvelopesPerProvider = 1000;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail.clear();
    ok = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

const std::string kSource = GLP_SOURCE_DIR;

std::string scenario_path(const std::string& name) { return kSource + "/scenarios/" + name + ".json"; }

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> c = load_corpus(kSource + "/corpus");
  return c;
}

struct SimRun {
  std::unique_ptr<World> world;
  WorldResult result;
};

SimRun simulate(const std::string& name) {
  SimRun r;
  r.world = std::make_unique<World>(load_scenario(scenario_path(name)));
  r.result = r.world->run();
  return r;
}

std::vector<std::string> friend_names(const World& w, const std::string& agent) {
  std::vector<std::string> out;
  for (const auto& f : w.friends(agent))
    if (!w.name_of(f).empty()) out.push_back(w.name_of(f));
  std::sort(out.begin(), out.end());
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return "[" + s + "]";
}

size_t count_records(const std::vector<TraceRecord>& t, const std::string& agent, const std::string& kind,
                     const std::string& needle) {
  size_t n = 0;
  for (const auto& r : t)
    if ((agent.empty() || r.agent == agent) && r.kind == kind && r.str().find(needle) != std::string::npos) ++n;
  return n;
}

ExpectationResult run_entry(const std::string& name, size_t index = 0) {
  const CorpusEntry& e = find_entry(corpus(), name);
  return run_expectation(e, e.runs.at(index), corpus());
}

Outcome corpus_gate() {
  Outcome o;
  size_t runs = 0;
  for (const auto& e : corpus()) {
    if (!e.module.srsw.empty()) o.fail(e.name + " violates srsw: " + e.module.srsw[0].str());
    runs += e.runs.size();
  }
  for (const auto& c : listing_captions()) {
    int n = 0;
    for (const auto& e : corpus()) n += static_cast<int>(std::count(e.loci.begin(), e.loci.end(), c));
    if (n != 1) o.fail("caption '" + c + "' covered " + std::to_string(n) + " times");
  }
  std::vector<std::string> expected = {"bind_response(no,_,no,Fs,Fs,In,In)", "handle_response(no,_,Fs,Fs,In,In)"};
  std::vector<std::string> flagged;
  for (const auto& d : srsw_defects(defects_path(kSource + "/corpus"))) flagged.push_back(d.clause);
  if (flagged != expected) o.fail("defects flagged " + join(flagged));
  if (o.ok)
    o.detail = std::to_string(corpus().size()) + " entries (" + std::to_string(runs) + " runs) parse, " +
               std::to_string(listing_captions().size()) +
               " listings covered, srsw clean; flagged " + join(flagged);
  return o;
}

Outcome merge_fairness() {
  static const char* expected[] = {
      "[1,a]",
      "[1,a,2,b]",
      "[1,a,2,b,3,c]",
      "[1,a,2,b,3,c,4,d]",
      "[1,a,2,b,3,c,4,d,5,e]",
      "[1,a,2,b,3,c,4,d,5,e,6,f]",
      "[1,a,2,b,3,c,4,d,5,e,6,f,7,g]",
      "[1,a,2,b,3,c,4,d,5,e,6,f,7,g,8,h]",
  };
  Outcome o;
  Program p = Program::from_files({kSource + "/corpus/merge.glp"});
  std::string xs, ys;
  for (int n = 1; n <= 8; ++n) {
    xs += (n > 1 ? "," : "") + std::to_string(n);
    ys += (n > 1 ? "," : "") + std::string(1, static_cast<char>('a' + n - 1));
    IdSource ids;
    Engine e(p, ids);
    auto vars = e.spawn_text("merge([" + xs + "],[" + ys + "],Zs)");
    RunStatus st = e.run(1000);
    std::string got = to_string(e.resolve(vars.at("Zs")));
    if (st != RunStatus::QuiescentSuccess || got != expected[n - 1])
      o.fail("n=" + std::to_string(n) + " gave " + got + " (" + run_status_name(st) + ")");
  }
  if (o.ok) o.detail = "n=1..8 alternate exactly";
  return o;
}

Outcome theorem_suite() {
  Outcome o;
  const std::vector<std::string> checks = {"srsw", "acyclic", "deduction", "monotonicity"};
  // Single-agent runs of programs without unknown/1, writer/1 or reader/1 guards.
  const std::vector<std::pair<std::string, size_t>> runs = {
      {"merge", 0},  {"merge", 1},      {"merge", 2}, {"channel_operations", 0}, {"channel_operations", 1},
      {"distribute", 0}, {"relay", 0}, {"replicator", 0}, {"tag_stream", 0}, {"cooperative_producers", 0},
  };
  size_t verdicts = 0;
  for (const auto& [name, idx] : runs) {
    const CorpusEntry& e = find_entry(corpus(), name);
    auto res = run_expectation(e, e.runs.at(idx), corpus(), kTheoremTxLimit);
    if (res.trace.size() > kTheoremTxLimit) o.fail(name + " exceeds the transaction limit");
    Program p = Program::from_files(entry_paths(e, corpus()));
    ProgramSet ps;
    ps.fallback = &p;
    for (const auto& v : run_checks(res.trace, ps, checks)) {
      ++verdicts;
      if (!v.ok) o.fail(name + "#" + std::to_string(idx) + " " + v.str());
    }
  }
  for (const std::string s : {"coldcall_yes", "coldcall_no", "introduction", "introduction_mismatch", "grassroots"}) {
    SimRun r = simulate(s);
    if (r.result.transactions > kTheoremTxLimit) o.fail(s + " exceeds the transaction limit");
    ProgramSet ps;
    for (const auto& a : r.world->agents()) ps.by_agent[a->name] = a->program;
    for (const auto& v : run_checks(r.world->trace(), ps, checks)) {
      ++verdicts;
      if (!v.ok) o.fail(s + " " + v.str());
    }
  }
  Program merge = Program::from_files({kSource + "/corpus/merge.glp"});
  ProgramSet mps;
  mps.fallback = &merge;
  size_t planted = 0;
  for (const auto& pl : planted_counterexamples(merge)) {
    if (std::find(checks.begin(), checks.end(), pl.check) == checks.end()) continue;
    ++planted;
    Verdict v = pl.check == "monotonicity" ? verify_monotonicity(pl.trace, mps, kMonotonicitySamples)
                                           : run_checks(pl.trace, mps, {pl.check}).at(0);
    if (v.ok) o.fail("planted " + pl.check + " counterexample passed");
  }
  if (planted != checks.size()) o.fail("missing planted counterexamples");
  if (o.ok)
    o.detail = "10 runs + 5 scenarios: " + std::to_string(verdicts) + " verdicts pass; " + std::to_string(planted) +
               " planted traces fail";
  return o;
}

Outcome eager_equivalence() {
  Outcome o;
  size_t compared = 0;
  for (const auto& e : corpus()) {
    Program p = Program::from_files(entry_paths(e, corpus()));
    for (const auto& r : e.runs) {
      auto a = engine_run(p, r.goal, r.nvars, kEquivalenceStepLimit + 1);
      if (a.trace.size() > kEquivalenceStepLimit) continue;
      auto b = rewrite_run(p, r.goal, r.nvars, kEquivalenceStepLimit + 1);
      ++compared;
      if (a.status != b.status || normalize_trace(a.trace) != normalize_trace(b.trace))
        o.fail(e.name + ": " + r.text);
    }
  }
  if (compared < 10) o.fail("only " + std::to_string(compared) + " runs within the step limit");
  if (o.ok) o.detail = std::to_string(compared) + " corpus runs give equal traces modulo ids";
  return o;
}

Outcome cold_call() {
  Outcome o;
  {
    SimRun r = simulate("coldcall_yes");
    auto& w = *r.world;
    if (friend_names(w, "p") != std::vector<std::string>{"q"} || friend_names(w, "q") != std::vector<std::string>{"p"})
      o.fail("yes: friends p=" + join(friend_names(w, "p")) + " q=" + join(friend_names(w, "q")));
    if (count_records(w.trace(), "q", "observe", "befriend(") != 1) o.fail("yes: q was not asked exactly once");
    if (w.rejects() != 0) o.fail("yes: rejected envelopes");
  }
  {
    SimRun r = simulate("coldcall_no");
    auto& w = *r.world;
    if (!friend_names(w, "p").empty() || !friend_names(w, "q").empty()) o.fail("no: someone befriended");
    if (count_records(w.trace(), "q", "observe", "befriend(") != 1) o.fail("no: q was not asked");
  }
  {
    SimRun r = simulate("coldcall_tamper");
    auto& w = *r.world;
    if (!friend_names(w, "p").empty() || !friend_names(w, "q").empty()) o.fail("tamper: someone befriended");
    if (w.rejects() != 1 || count_records(w.trace(), "q", "reject", "stage=") != 1)
      o.fail("tamper: expected one reject at q");
    if (count_records(w.trace(), "q", "observe", "befriend(") != 0) o.fail("tamper: q saw the request");
  }
  if (o.ok) o.detail = "yes befriends p and q; no leaves both alone; tamper is rejected at q";
  return o;
}

Outcome introduction() {
  Outcome o;
  {
    SimRun r = simulate("introduction");
    auto& w = *r.world;
    if (friend_names(w, "p") != std::vector<std::string>{"q", "r"}) o.fail("p friends " + join(friend_names(w, "p")));
    if (friend_names(w, "q") != std::vector<std::string>{"p", "r"}) o.fail("q friends " + join(friend_names(w, "q")));
    if (count_records(w.trace(), "p", "observe", "befriend_verified(") != 1 ||
        count_records(w.trace(), "q", "observe", "befriend_verified(") != 1)
      o.fail("verified introduction not offered to both");
    // The attestation request crosses between p and q, and each handles a verified_intro.
    if (count_records(w.trace(), "p", "communicate", "attest_req(") == 0 ||
        count_records(w.trace(), "q", "communicate", "attest_req(") == 0)
      o.fail("attest_req exchange missing");
    if (count_records(w.trace(), "p", "reduce", "verified_intro(") == 0 ||
        count_records(w.trace(), "q", "reduce", "verified_intro(") == 0)
      o.fail("verified_intro not handled by both");
  }
  {
    SimRun r = simulate("introduction_mismatch");
    auto& w = *r.world;
    if (friend_names(w, "p") != std::vector<std::string>{"r"} || friend_names(w, "q") != std::vector<std::string>{"r"})
      o.fail("mismatch: p=" + join(friend_names(w, "p")) + " q=" + join(friend_names(w, "q")));
    if (count_records(w.trace(), "", "observe", "befriend_verified(") != 0 ||
        count_records(w.trace(), "", "communicate", "attest_req(") != 0)
      o.fail("mismatch: the introduction went ahead");
  }
  if (o.ok) o.detail = "attest_req and verified_intro cross between p and q, who befriend; mismatched introducer: no introduction";
  return o;
}

Outcome streams() {
  Outcome o;
  for (const std::string name : {"interlaced_streams", "cooperative_producers"}) {
    auto res = run_entry(name);
    if (!res.ok) o.fail(name + " run: " + res.detail);
    Verdict v = verify_streams(res.trace);
    if (!v.ok) o.fail(name + " " + v.str());
  }
  Program merge = Program::from_files({kSource + "/corpus/merge.glp"});
  bool planted = false;
  for (const auto& pl : planted_counterexamples(merge))
    if (pl.check == "streams") {
      planted = true;
      if (verify_streams(pl.trace).ok) o.fail("planted double assignment passed");
    }
  if (!planted) o.fail("no planted double assignment");
  if (o.ok) o.detail = "interlaced 3x5 and cooperative producers pass; double assignment fails";
  return o;
}

Outcome grassroots() {
  Outcome o;
  SimRun r = simulate("grassroots");
  auto& w = *r.world;
  bool c_to_a = false;
  for (const auto& rec : w.trace())
    if (rec.agent == "c" && rec.kind == "network" && rec.at("to") == "a") c_to_a = true;
  if (!c_to_a) o.fail("c never messaged a");
  Verdict v = verify_grassroots_interaction(w.trace(), {"a", "b"});
  if (!v.ok) o.fail(v.str());
  if (o.ok) o.detail = v.detail;
  return o;
}

Outcome determinism() {
  Outcome o;
  for (const std::string s : {"coldcall_yes", "coldcall_tamper", "introduction", "grassroots"}) {
    std::string text[2];
    for (auto& t : text) {
      SimRun r = simulate(s);
      std::ostringstream out;
      write_trace(out, r.world->trace());
      t = out.str();
    }
    if (text[0] != text[1] || text[0].empty()) o.fail(s + " traces differ");
  }
  if (o.ok) o.detail = "4 scenarios, two runs each, identical bytes";
  return o;
}

Outcome lp_append() {
  Outcome o;
  lp::Program p = lp::Program::from_module(load_module_file(kSource + "/corpus/lp/append.lp"));
  const std::vector<std::pair<std::string, size_t>> queries = {
      {"append([1],[2],_W1)", 1}, {"append(_W1,_W2,[1])", 2}, {"append(_W1,_W2,[1,2,3])", 4}};
  std::string counts;
  for (const auto& [q, want] : queries) {
    auto s = lp::solve(p, parse_term(q, true).term);
    counts += (counts.empty() ? "" : ",") + std::to_string(s.answers.size());
    if (!s.exhaustive || s.answers.size() != want) o.fail(q + " gave " + std::to_string(s.answers.size()));
  }
  if (o.ok) o.detail = "solution counts " + counts;
  return o;
}

Outcome security_triad() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::string summary;
  for (const std::string name : {"mock", "real"}) {
    auto cp = make_provider(name);
    std::vector<KeyPair> keys;
    std::vector<Bytes> known;
    for (uint64_t s = 1; s <= 6; ++s) {
      keys.push_back(cp->keypair(1000 + s));
      known.push_back(keys.back().pub);
    }
    int tamper_rejected = 0, wrong_rejected = 0, unique = 0;
    for (int i = 0; i < kEnvelopesPerProvider; ++i) {
      size_t from = rng() % keys.size(), to = rng() % keys.size();
      Bytes payload(1 + rng() % 64);
      for (auto& b : payload) b = static_cast<uint8_t>(rng());
      Bytes wire = seal(*cp, payload, "m_accept", keys[from], keys[to].pub, i);

      Bytes bad = wire;
      bad[rng() % bad.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
      if (!open_envelope(*cp, bad, keys[to], known).ok) ++tamper_rejected;

      size_t other = (to + 1 + rng() % (keys.size() - 1)) % keys.size();
      if (!open_envelope(*cp, wire, keys[other], known).ok) ++wrong_rejected;

      Opened ok = open_envelope(*cp, wire, keys[to], known);
      auto env = decode_envelope(wire);
      if (ok.ok && env && ok.sender == keys[from].pub && verifying_keys(*cp, *env, ok.payload, known) == 1 &&
          ok.payload == payload)
        ++unique;
    }
    auto check = [&](const char* what, int n) {
      if (n != kEnvelopesPerProvider)
        o.fail(name + " " + what + " " + std::to_string(n) + "/" + std::to_string(kEnvelopesPerProvider));
    };
    check("tamper rejected", tamper_rejected);
    check("wrong recipient rejected", wrong_rejected);
    check("unique verified signer", unique);
    summary += (summary.empty() ? "" : ", ") + name + " " + std::to_string(kEnvelopesPerProvider) + "/" +
               std::to_string(kEnvelopesPerProvider);
  }
  if (o.ok) o.detail = summary + " envelopes, zero failures";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"corpus gate", corpus_gate},
      {"merge fairness", merge_fairness},
      {"theorem suite", theorem_suite},
      {"eager-substitution equivalence", eager_equivalence},
      {"cold-call befriending", cold_call},
      {"friend-mediated introduction", introduction},
      {"stream checks", streams},
      {"grassroots interaction", grassroots},
      {"deterministic simulation", determinism},
      {"LP append solutions", lp_append},
      {"security triad", security_triad},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += o.ok ? 0 : 1;
    std::cout << "criterion " << n << " " << name << ": " << (o.ok ? "PASS" : "FAIL") << " -- " << o.detail
              << std::endl;
  }
  return failures;
}

// glp: check, run, sim, verify and corpus-test.
#include "glp/corpus.hpp"
#include "glp/engine.hpp"
#include "glp/lexer.hpp"
#include "glp/multiagent.hpp"
#include "glp/program.hpp"
#include "glp/scenario.hpp"
#include "glp/trace.hpp"
#include "glp/verifier.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace glp;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntimeFailure = 3;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_trace(out, trace);
}

int cmd_check(const std::vector<std::string>& files) {
  bool clean = true;
  for (const auto& f : files) {
    Module m = load_module_file(f);
    for (const auto& v : m.srsw) {
      std::cerr << f << ": " << v.str() << "\n";
      clean = false;
    }
    std::cout << f << ": " << m.clauses.size() << " clauses, " << (m.srsw.empty() ? "clean" : "srsw violations")
              << "\n";
  }
  return clean ? kOk : kCheckFailed;
}

int cmd_run(const std::vector<std::string>& files, const std::string& goal, uint64_t fuel, const std::string& trace_path) {
  Program program = Program::from_files(files);
  IdSource ids;
  Engine engine(program, ids);
  auto vars = engine.spawn_text(goal);
  std::vector<TraceRecord> trace;
  RunStatus status = engine.run(fuel, trace_path.empty() ? nullptr : &trace);
  for (const auto& [name, v] : vars)
    if (name[0] != '_') std::cout << name << " = " << to_string(engine.resolve(v)) << "\n";
  std::cout << "% " << run_status_name(status) << " after " << engine.reductions() << " reductions\n";
  for (const auto& [g, why] : engine.failed()) std::cerr << "failed: " << to_string(engine.resolve(g.atom)) << " (" << why << ")\n";
  if (!trace_path.empty()) write_trace_file(trace_path, trace);
  return status == RunStatus::Failed ? kRuntimeFailure : kOk;
}

int cmd_sim(const std::string& path, std::optional<uint64_t> seed, const std::string& trace_path) {
  Scenario sc = load_scenario(path);
  if (seed) sc.seed = *seed;
  if (const char* env = std::getenv("GLP_SEED")) sc.seed = std::stoull(env);
  World world(sc);
  WorldResult r = world.run();
  bool failed = false;
  for (const auto& [name, st] : r.status) {
    std::cout << name << ": " << run_status_name(st);
    auto fr = world.friends(name);
    if (!fr.empty()) {
      std::cout << ", friends";
      for (const auto& f : fr) std::cout << " " << (world.name_of(f).empty() ? f : world.name_of(f));
    }
    std::cout << "\n";
    failed = failed || st == RunStatus::Failed;
  }
  std::cout << "% " << r.transactions << " transactions, " << world.envelopes_sealed() << " envelopes, "
            << world.rejects() << " rejected, seed " << sc.seed << "\n";
  if (!trace_path.empty()) write_trace_file(trace_path, world.trace());
  return failed ? kRuntimeFailure : kOk;
}

int cmd_verify(const std::string& trace_path, const std::string& checks, const std::vector<std::string>& modules,
               const std::string& scenario_path, const std::string& group, uint64_t seed) {
  auto trace = read_trace_file(trace_path);
  std::vector<std::unique_ptr<Program>> owned;
  ProgramSet programs;
  if (!modules.empty()) {
    owned.push_back(std::make_unique<Program>(Program::from_files(modules)));
    programs.fallback = owned.back().get();
  }
  if (!scenario_path.empty()) {
    Scenario sc = load_scenario(scenario_path);
    owned.push_back(std::make_unique<Program>(Program::from_files(sc.modules)));
    programs.fallback = owned.back().get();
    for (const auto& a : sc.agents)
      if (!a.modules.empty()) {
        owned.push_back(std::make_unique<Program>(Program::from_files(a.modules)));
        programs.by_agent[a.name] = owned.back().get();
      }
  }
  std::vector<std::string> names = checks.empty() ? check_names() : split_commas(checks);
  bool need_programs = false;
  std::vector<Verdict> verdicts;
  for (const auto& n : names) {
    if (n == "grassroots") {
      auto g = split_commas(group);
      verdicts.push_back(verify_grassroots_interaction(trace, {g.begin(), g.end()}));
      continue;
    }
    if ((n == "deduction" || n == "monotonicity") && !programs.fallback) {
      need_programs = true;
      continue;
    }
    auto v = run_checks(trace, programs, {n}, seed);
    verdicts.insert(verdicts.end(), v.begin(), v.end());
  }
  if (need_programs) {
    std::cerr << "deduction and monotonicity need --modules or --scenario\n";
    return kUsage;
  }
  bool ok = true;
  for (const auto& v : verdicts) {
    std::cout << v.str() << "\n";
    ok = ok && v.ok;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_corpus_test(const std::string& dir) {
  auto corpus = load_corpus(dir);
  bool ok = true;
  size_t runs = 0;
  for (const auto& e : corpus) {
    for (const auto& v : e.module.srsw) {
      std::cout << e.name << ": srsw " << v.str() << "\n";
      ok = false;
    }
    for (const auto& r : e.runs) {
      auto res = run_expectation(e, r, corpus);
      ++runs;
      std::cout << e.name << ": " << (res.ok ? "ok" : "FAIL") << " " << r.text;
      if (!res.ok) std::cout << "  -- " << res.detail;
      std::cout << "\n";
      ok = ok && res.ok;
    }
  }
  for (const auto& d : srsw_defects(defects_path(dir))) {
    std::cout << "defect: " << d.clause << " --";
    for (const auto& v : d.violations) std::cout << " " << v.str();
    std::cout << "\n";
  }
  std::cout << "% " << corpus.size() << " entries, " << runs << " runs, " << (ok ? "all passed" : "failures") << "\n";
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grassroots Logic Programs: interpreter, multiagent simulator and verifier"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  auto* check = app.add_subcommand("check", "parse modules and report single-reader/single-writer violations");
  check->add_option("files", files, "module files")->required();

  std::string goal, trace_path;
  uint64_t fuel = 100000;
  auto* run = app.add_subcommand("run", "run a goal on the single-agent engine");
  run->add_option("files", files, "module files")->required();
  run->add_option("-g,--goal", goal, "goal or conjunction")->required();
  run->add_option("--fuel", fuel, "maximum reductions");
  run->add_option("--trace", trace_path, "write the trace here");

  std::string scenario_path;
  std::optional<uint64_t> seed;
  auto* sim = app.add_subcommand("sim", "run a multiagent scenario");
  sim->add_option("scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--seed", seed, "scheduler seed (GLP_SEED overrides)");
  sim->add_option("--trace", trace_path, "write the trace here");

  std::string checks, group, verify_scenario;
  std::vector<std::string> modules;
  uint64_t sample_seed = 0;
  auto* verify = app.add_subcommand("verify", "check a trace");
  verify->add_option("trace", trace_path, "trace file")->required();
  verify->add_option("--checks", checks, "comma list: srsw,acyclic,deduction,monotonicity,streams,grassroots");
  verify->add_option("--modules", modules, "modules of a single-agent run");
  verify->add_option("--scenario", verify_scenario, "scenario whose modules the agents ran");
  verify->add_option("--group", group, "agent group for the grassroots check, comma separated");
  verify->add_option("--seed", sample_seed, "seed for monotonicity sampling");

  std::string dir = default_corpus_dir();
  auto* corpus = app.add_subcommand("corpus-test", "run every corpus expectation");
  corpus->add_option("--dir", dir, "corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(files);
    if (*run) return cmd_run(files, goal, fuel, trace_path);
    if (*sim) return cmd_sim(scenario_path, seed, trace_path);
    if (*verify) return cmd_verify(trace_path, checks, modules, verify_scenario, group, sample_seed);
    if (*corpus) return cmd_corpus_test(dir);
  } catch (const ParseError& e) {
    std::cerr << "glp: " << e.what() << "\n";
    return kUsage;
  } catch (const LoadError& e) {
    std::cerr << "glp: " << e.what() << "\n";
    return kUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "glp: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "glp: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "glp: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

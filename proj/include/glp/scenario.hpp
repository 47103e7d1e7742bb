#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glp {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scripted user rule. Patterns and injections use source syntax; `$self` stands for the
// agent's own identity and `$<name>` for another agent's.
struct ScriptRule {
  enum class Trigger { OnStep, OnMatch, OnIdle };
  Trigger trigger = Trigger::OnStep;
  uint64_t step = 0;
  std::string pattern;
  std::string inject;
};

struct AgentConfig {
  std::string name;
  uint64_t key_seed = 0;
  std::vector<std::string> modules;  // overrides the scenario modules when non-empty
};

struct Scenario {
  std::string name;
  std::vector<std::string> modules;
  std::vector<AgentConfig> agents;
  std::map<std::string, std::vector<ScriptRule>> scripts;
  // Boot goal per agent. Named variables UserIn/UserOut/NetIn/NetOut become the runtime's
  // stream ends.
  std::string boot = "agent($self, ch(UserIn?, UserOut), ch(NetIn?, NetOut))";
  uint64_t seed = 0;
  uint64_t fuel = 100000;
  std::string crypto = "mock";
  std::optional<uint64_t> tamper_envelope;  // 1-based index over all sealed envelopes
};

// Module paths are resolved relative to `base_dir`.
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir, const std::string& name = "");
Scenario load_scenario(const std::string& path);

}  // namespace glp

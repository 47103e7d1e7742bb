#include "glp/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace glp {

namespace {

std::string resolve_path(const std::string& p, const std::string& base) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path.lexically_normal().string();
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

std::vector<std::string> paths(const nlohmann::json& j, const std::string& base) {
  std::vector<std::string> out;
  if (j.is_string()) {
    out.push_back(resolve_path(j.get<std::string>(), base));
  } else {
    for (const auto& p : j) out.push_back(resolve_path(p.get<std::string>(), base));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir, const std::string& name) {
  Scenario s;
  s.name = name;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario JSON: ") + e.what());
  }
  try {
    if (!j.contains("module")) throw ScenarioError("scenario has no module");
    s.modules = paths(j.at("module"), base_dir);
    std::set<std::string> names;
    for (const auto& a : j.at("agents")) {
      AgentConfig ac;
      ac.name = a.at("name").get<std::string>();
      ac.key_seed = a.value("key_seed", uint64_t{0});
      if (a.contains("module")) ac.modules = paths(a.at("module"), base_dir);
      if (!names.insert(ac.name).second) throw ScenarioError("duplicate agent name: " + ac.name);
      s.agents.push_back(std::move(ac));
    }
    if (s.agents.empty()) throw ScenarioError("scenario has no agents");
    if (j.contains("scripts")) {
      for (const auto& [agent, rules] : j.at("scripts").items()) {
        if (!names.count(agent)) throw ScenarioError("script for unknown agent: " + agent);
        for (const auto& r : rules) {
          ScriptRule rule;
          if (r.contains("on_step")) {
            rule.trigger = ScriptRule::Trigger::OnStep;
            rule.step = r.at("on_step").get<uint64_t>();
          } else if (r.contains("on_match")) {
            rule.trigger = ScriptRule::Trigger::OnMatch;
            rule.pattern = r.at("on_match").get<std::string>();
          } else if (r.contains("on_idle")) {
            rule.trigger = ScriptRule::Trigger::OnIdle;
          } else {
            throw ScenarioError("script rule without trigger for agent " + agent);
          }
          rule.inject = r.at("inject").get<std::string>();
          s.scripts[agent].push_back(std::move(rule));
        }
      }
    }
    if (j.contains("boot")) s.boot = j.at("boot").get<std::string>();
    s.seed = j.value("seed", uint64_t{0});
    s.fuel = j.value("fuel", uint64_t{100000});
    s.crypto = j.value("crypto", std::string("mock"));
    if (s.crypto != "mock" && s.crypto != "real") throw ScenarioError("unknown crypto provider: " + s.crypto);
    if (s.fuel == 0) throw ScenarioError("fuel must be positive");
    if (j.contains("tamper")) s.tamper_envelope = j.at("tamper").at("nth_envelope").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario field: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::filesystem::path p(path);
  return parse_scenario(ss.str(), p.parent_path().string(), p.stem().string());
}

}  // namespace glp

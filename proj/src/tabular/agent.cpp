#include "gtt/tabular/agent.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "gtt/common/errors.hpp"

namespace gtt {

const MixedPolicy& TabularAgent::policy_for(AgentRole role, const std::string& self_model,
                                            const std::string& target) const {
  switch (role) {
    case AgentRole::kTarget:
    case AgentRole::kSpecimen:
      if (self.empty()) break;
      return self;
    case AgentRole::kDistinguisher:
      if (self_model != target) {
        if (const auto it = judging.find(target); it != judging.end()) return it->second;
        break;
      }
      if (distinguisher) return *distinguisher;
      break;
    case AgentRole::kActor:
      if (const auto it = imitating.find(target); it != imitating.end()) return it->second;
      if (imitating_default) return *imitating_default;
      break;
  }
  throw ConfigError("tabular agent '" + name + "' has no table for role " + std::string(to_string(role)) +
                    " with target '" + target + "'");
}

AgentReply TabularAgent::next_turn(const Conversation& conversation) {
  const MixedPolicy& mix = policy_for(conversation.role, conversation.self_model, conversation.target_model);
  const TabularPolicy& policy = mix.components()[mix.choose(conversation.seed)].second;
  auto rng = call_rng(conversation.seed, conversation.own_turns());
  AgentReply reply;
  reply.content = sample_tabular(policy, conversation.dialogue(), rng);
  reply.route = {"tabular", "local", name, name};
  return reply;
}

TabularAgent TabularAgent::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabular agent file " + path.string());
  try {
    return nlohmann::json::parse(in).get<TabularAgent>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed tabular agent file " + path.string() + ": " + e.what());
  }
}

void to_json(nlohmann::json& j, const TabularAgent& a) {
  j = nlohmann::json::object();
  j["name"] = a.name;
  if (!a.self.empty()) j["self"] = a.self;
  if (a.distinguisher) j["distinguisher"] = *a.distinguisher;
  if (!a.judging.empty()) j["judging"] = a.judging;
  if (!a.imitating.empty()) j["imitating"] = a.imitating;
  if (a.imitating_default) j["imitating_default"] = *a.imitating_default;
}

void from_json(const nlohmann::json& j, TabularAgent& a) {
  a.name = j.value("name", std::string{});
  if (j.contains("self")) a.self = j.at("self").get<MixedPolicy>();
  if (j.contains("distinguisher")) a.distinguisher = j.at("distinguisher").get<MixedPolicy>();
  if (j.contains("judging")) a.judging = j.at("judging").get<std::map<std::string, MixedPolicy>>();
  if (j.contains("imitating")) a.imitating = j.at("imitating").get<std::map<std::string, MixedPolicy>>();
  if (j.contains("imitating_default")) a.imitating_default = j.at("imitating_default").get<MixedPolicy>();
}

}  // namespace gtt

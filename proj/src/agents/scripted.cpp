#include "gtt/agents/scripted.hpp"

#include <nlohmann/json.hpp>

namespace gtt {

ScriptedAgent::ScriptedAgent(std::string name, std::map<AgentRole, Script> by_role, Script fallback)
    : name_(std::move(name)), by_role_(std::move(by_role)), fallback_(std::move(fallback)) {
  for (const auto& [role, script] : by_role_) {
    if (script.replies.empty()) {
      throw ConfigError("script for " + std::string(to_string(role)) + " of '" + name_ + "' has no replies");
    }
  }
  if (by_role_.empty() && fallback_.replies.empty()) {
    throw ConfigError("scripted agent '" + name_ + "' has no replies");
  }
}

const Script& ScriptedAgent::script_for(AgentRole role) const {
  const auto it = by_role_.find(role);
  if (it != by_role_.end()) return it->second;
  if (fallback_.replies.empty()) {
    throw BackendError("scripted agent '" + name_ + "' has no script for role " + std::string(to_string(role)));
  }
  return fallback_;
}

AgentReply ScriptedAgent::next_turn(const Conversation& conversation) {
  const Script& script = script_for(conversation.role);
  AgentReply reply;
  reply.route = {"scripted", "local", name_, name_};

  const ChatTurn* incoming = nullptr;
  for (auto it = conversation.turns.rbegin(); it != conversation.turns.rend(); ++it) {
    if (it->role == ChatRole::kUser) {
      incoming = &*it;
      break;
    }
  }
  if (incoming) {
    for (const auto& t : script.triggers) {
      if (incoming->content.find(t.contains) != std::string::npos) {
        reply.content = t.reply;
        return reply;
      }
    }
  }
  const std::size_t i = std::min(conversation.own_turns(), script.replies.size() - 1);
  reply.content = script.replies[i];
  return reply;
}

void from_json(const nlohmann::json& j, Script& s) {
  s = {};
  if (j.is_array()) {
    s.replies = j.get<std::vector<std::string>>();
    return;
  }
  s.replies = j.value("replies", std::vector<std::string>{});
  if (j.contains("triggers")) {
    for (const auto& t : j.at("triggers")) {
      s.triggers.push_back({t.at("contains").get<std::string>(), t.at("reply").get<std::string>()});
    }
  }
}

void to_json(nlohmann::json& j, const Script& s) {
  j = {{"replies", s.replies}};
  if (!s.triggers.empty()) {
    auto triggers = nlohmann::json::array();
    for (const auto& t : s.triggers) triggers.push_back({{"contains", t.contains}, {"reply", t.reply}});
    j["triggers"] = std::move(triggers);
  }
}

}  // namespace gtt

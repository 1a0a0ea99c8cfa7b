#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gtt/protocol/agent.hpp"

namespace gtt {

struct ScriptTrigger {
  /// Fires when the last incoming message contains this text.
  std::string contains;
  std::string reply;
};

struct Script {
  std::vector<std::string> replies;
  std::vector<ScriptTrigger> triggers;
};

/// Deterministic agent. Triggers are tried in order against the latest
/// incoming message; otherwise the reply at the agent's own turn index is
/// used, repeating the last one once the list runs out.
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::string name, std::map<AgentRole, Script> by_role, Script fallback = {});

  AgentReply next_turn(const Conversation& conversation) override;

 private:
  const Script& script_for(AgentRole role) const;

  std::string name_;
  std::map<AgentRole, Script> by_role_;
  Script fallback_;
};

void from_json(const nlohmann::json& j, Script& s);
void to_json(nlohmann::json& j, const Script& s);

}  // namespace gtt

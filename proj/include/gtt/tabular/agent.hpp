#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "gtt/protocol/agent.hpp"
#include "gtt/tabular/policy.hpp"

namespace gtt {

/// A model made of role-conditioned tables. As target or specimen it plays
/// `self`; as distinguisher it uses `distinguisher` for its own type and
/// `judging[target]` for a fixed-distinguisher game; as actor it uses
/// `imitating[target]`, falling back to `imitating_default`.
class TabularAgent : public Agent {
 public:
  std::string name;
  MixedPolicy self;
  std::optional<MixedPolicy> distinguisher;
  std::map<std::string, MixedPolicy> judging;
  std::map<std::string, MixedPolicy> imitating;
  std::optional<MixedPolicy> imitating_default;

  /// Throws ConfigError when the agent has no table for the role.
  const MixedPolicy& policy_for(AgentRole role, const std::string& self_model, const std::string& target) const;

  AgentReply next_turn(const Conversation& conversation) override;

  static TabularAgent from_file(const std::filesystem::path& path);
};

void to_json(nlohmann::json& j, const TabularAgent& a);
void from_json(const nlohmann::json& j, TabularAgent& a);

}  // namespace gtt

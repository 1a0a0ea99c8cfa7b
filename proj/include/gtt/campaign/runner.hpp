#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtt/campaign/env.hpp"
#include "gtt/campaign/plan.hpp"
#include "gtt/protocol/agent.hpp"
#include "gtt/protocol/prompts.hpp"

namespace gtt {

using AgentResolver = std::function<std::shared_ptr<Agent>(const std::string& model_id)>;

struct RunOptions {
  bool resume = false;
  /// Overrides the plan's parallelism.
  std::optional<std::size_t> parallelism;
  const PromptTemplates* templates = nullptr;
  /// capture_env() when unset.
  std::optional<EnvBlock> env;
  std::function<void(std::string_view)> progress;
};

struct Shortfall {
  std::string trial_id;
  std::string pair;
  std::size_t attempts = 0;
  std::string last_reason;
};

struct CampaignSummary {
  std::size_t pairs = 0;
  std::size_t requested = 0;
  std::size_t already_complete = 0;
  std::size_t completed = 0;
  std::size_t failed_attempts = 0;
  std::vector<Shortfall> shortfalls;

  bool ok() const { return shortfalls.empty(); }
};

/// Plays every requested trial until it is analyzable or its attempts run
/// out. Completed trials on disk are skipped, so a finished directory costs
/// no backend calls. Exceptions other than backend failures abort the run
/// after in-flight trials finish; the directory stays resumable.
CampaignSummary run_campaign(const CampaignPlan& plan, const AgentResolver& resolve,
                             const std::filesystem::path& out, const RunOptions& options = {});

/// Resolver over an AgentRegistry built from the plan's models.
AgentResolver registry_resolver(std::shared_ptr<class AgentRegistry> registry);

}  // namespace gtt

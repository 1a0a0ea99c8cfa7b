#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtt/agents/factory.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

enum class BranchAssignment {
  /// Each consecutive pair of trial indices gets one game per branch.
  kStratified,
  /// Independent fair coin per trial index.
  kIid,
};

std::string_view to_string(BranchAssignment b);
BranchAssignment branch_assignment_from_string(std::string_view s);

/// Protocol flags and budgets applied to every pair of a campaign.
struct ProtocolTemplate {
  bool actor_query_phase = false;
  bool distinguisher_query_phase = false;
  /// One sub-campaign per entry; empty means the target judges.
  std::vector<std::string> fixed_distinguishers;
  std::size_t max_distinguisher_turns = 40;
  std::size_t max_specimen_turns = 20;
  std::optional<std::size_t> controlled_turn_budget;
  std::optional<std::size_t> controlled_query_budget;

  bool operator==(const ProtocolTemplate&) const = default;
};

struct CampaignPlan {
  std::vector<ModelSpec> models;
  ProtocolTemplate protocol;
  std::size_t trials_per_ordered_pair = 10;
  bool include_self_pairs = true;
  std::size_t max_attempts_per_trial = 3;
  std::size_t parallelism = 1;
  std::size_t max_in_flight = 16;
  std::uint64_t seed = 0;
  BranchAssignment branches = BranchAssignment::kStratified;
  RetryPolicy retry;

  /// Throws ConfigError on zero counts, duplicate ids, too few models or
  /// an unknown fixed distinguisher.
  void validate() const;
  std::vector<std::string> model_ids() const;
  const ModelSpec& model(const std::string& id) const;

  static CampaignPlan from_toml_file(const std::filesystem::path& path);
  static CampaignPlan from_toml(std::string_view text);
};

void to_json(nlohmann::json& j, const CampaignPlan& p);
void from_json(const nlohmann::json& j, CampaignPlan& p);

/// The [[models]] array of a TOML file, for rosters outside a campaign.
std::vector<ModelSpec> load_roster(const std::filesystem::path& path);

/// One ordered game of the campaign.
struct PairSpec {
  std::string actor;
  std::string target;
  std::optional<std::string> fixed_distinguisher;

  /// "A->B", with "@D" for a fixed distinguisher.
  std::string label() const;
  bool operator==(const PairSpec&) const = default;
};

/// One requested trial: a pair, an index within it, and its branch.
struct TrialSlot {
  PairSpec pair;
  std::size_t index = 0;
  std::string trial_id;
  std::uint64_t seed = 0;
  SecretIdentity secret = SecretIdentity::kTarget;

  /// Config for a given 1-based attempt; the seed changes per attempt,
  /// the branch does not.
  TrialConfig config(const CampaignPlan& plan, std::size_t attempt) const;
};

std::vector<PairSpec> enumerate_pairs(const CampaignPlan& plan);
std::vector<TrialSlot> enumerate_trials(const CampaignPlan& plan);

/// File-name safe form of a model id.
std::string sanitize_id(std::string_view id);

}  // namespace gtt

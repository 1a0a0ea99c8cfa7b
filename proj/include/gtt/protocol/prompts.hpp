#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "gtt/protocol/types.hpp"

namespace gtt {

enum class TemplateId {
  kGttActor,
  kDistinguisher,
  kGttqActor,
  kControlledSpecimenQuery,
  kControlledTurnDistinguisher,
  kFdActor,
  kFdJudge,
  // Not part of the published template set; shipped as editable assets.
  kFdSpecimenQuery,
  kDistinguisherSpecimenQuery,
};

inline constexpr std::size_t kTemplateCount = 9;

std::string_view to_string(TemplateId id);
/// Asset path relative to assets/, e.g. "prompts/gtt_actor.txt".
std::string_view asset_path(TemplateId id);
bool is_experimental(TemplateId id);

inline constexpr std::string_view kTargetSlugPlaceholder = "target model slug";
inline constexpr std::string_view kFirstMessagePlaceholder = "first distinguisher message";
inline constexpr std::string_view kSpecimenQueriesPlaceholder = "number of specimen queries";
inline constexpr std::string_view kDistinguisherTurnsPlaceholder = "number of distinguisher turns";

struct PromptParams {
  std::optional<std::string> target_slug;
  std::optional<std::string> first_message;
  std::optional<std::size_t> specimen_queries;
  std::optional<std::size_t> distinguisher_turns;
};

/// The template texts used by a run. Defaults come from the embedded
/// assets; a directory with the same layout may override any subset.
class PromptTemplates {
 public:
  static const PromptTemplates& defaults();
  /// Files missing from `dir` keep their default text.
  static PromptTemplates from_directory(const std::filesystem::path& dir);

  std::string_view text(TemplateId id) const { return texts_[static_cast<std::size_t>(id)]; }
  void set(TemplateId id, std::string text) { texts_[static_cast<std::size_t>(id)] = std::move(text); }

  /// Bumped whenever a shipped template changes.
  static constexpr std::string_view kVersion = "1";

 private:
  std::array<std::string, kTemplateCount> texts_;
};

/// Substitutes every `{placeholder}` in `tmpl`. Throws ConfigError naming the
/// first placeholder with no value, or an unknown placeholder.
std::string render_template(std::string_view tmpl, const PromptParams& params);

enum class PromptRole {
  /// The actor's first instruction (its query-stage prompt when it has one).
  kActor,
  /// The instruction that opens the actor's main game after a query stage.
  /// Absent for the plain querying game, whose prompt already covers it.
  kActorMainPhase,
  kDistinguisher,
  kDistinguisherQuery,
};

std::optional<TemplateId> select_template(PromptRole role, const TrialConfig& config);

/// Renders the template selected for `role`. Budget placeholders are filled
/// from the config when params leave them unset.
std::string render_prompt(PromptRole role, const TrialConfig& config, const PromptParams& params,
                          const PromptTemplates& templates = PromptTemplates::defaults());

}  // namespace gtt

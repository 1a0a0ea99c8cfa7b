#include "gtt/protocol/prompts.hpp"

#include <fstream>
#include <sstream>

#include "gtt/common/assets.hpp"
#include "gtt/common/errors.hpp"

namespace gtt {
namespace {

struct TemplateInfo {
  TemplateId id;
  std::string_view name;
  std::string_view path;
  bool experimental;
};

constexpr std::array<TemplateInfo, kTemplateCount> kTemplates = {{
    {TemplateId::kGttActor, "gtt_actor", "prompts/gtt_actor.txt", false},
    {TemplateId::kDistinguisher, "distinguisher", "prompts/distinguisher.txt", false},
    {TemplateId::kGttqActor, "gttq_actor", "prompts/gttq_actor.txt", false},
    {TemplateId::kControlledSpecimenQuery, "controlled_specimen_query", "prompts/controlled_specimen_query.txt",
     false},
    {TemplateId::kControlledTurnDistinguisher, "controlled_turn_distinguisher",
     "prompts/controlled_turn_distinguisher.txt", false},
    {TemplateId::kFdActor, "fd_actor", "prompts/fd_actor.txt", false},
    {TemplateId::kFdJudge, "fd_judge", "prompts/fd_judge.txt", false},
    {TemplateId::kFdSpecimenQuery, "fd_specimen_query", "prompts/experimental/fd_specimen_query.txt", true},
    {TemplateId::kDistinguisherSpecimenQuery, "distinguisher_specimen_query",
     "prompts/experimental/distinguisher_specimen_query.txt", true},
}};

const TemplateInfo& info(TemplateId id) { return kTemplates[static_cast<std::size_t>(id)]; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

std::optional<std::string> lookup(std::string_view name, const PromptParams& params) {
  if (name == kTargetSlugPlaceholder) return params.target_slug;
  if (name == kFirstMessagePlaceholder) return params.first_message;
  if (name == kSpecimenQueriesPlaceholder && params.specimen_queries) {
    return std::to_string(*params.specimen_queries);
  }
  if (name == kDistinguisherTurnsPlaceholder && params.distinguisher_turns) {
    return std::to_string(*params.distinguisher_turns);
  }
  if (name == kSpecimenQueriesPlaceholder || name == kDistinguisherTurnsPlaceholder) return std::nullopt;
  throw ConfigError("unknown prompt placeholder {" + std::string(name) + "}");
}

}  // namespace

std::string_view to_string(TemplateId id) { return info(id).name; }
std::string_view asset_path(TemplateId id) { return info(id).path; }
bool is_experimental(TemplateId id) { return info(id).experimental; }

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates kDefaults = [] {
    PromptTemplates t;
    for (const auto& entry : kTemplates) {
      t.texts_[static_cast<std::size_t>(entry.id)] = std::string(assets::get(entry.path));
    }
    return t;
  }();
  return kDefaults;
}

PromptTemplates PromptTemplates::from_directory(const std::filesystem::path& dir) {
  PromptTemplates t = defaults();
  for (const auto& entry : kTemplates) {
    // asset paths start with "prompts/"; the directory stands in for it
    const auto rel = std::filesystem::path(std::string(entry.path)).lexically_relative("prompts");
    const auto file = dir / rel;
    if (std::filesystem::exists(file)) {
      t.set(entry.id, read_file(file));
    }
  }
  return t;
}

std::string render_template(std::string_view tmpl, const PromptParams& params) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const auto close = tmpl.find('}', open);
    if (close == std::string_view::npos) {
      throw ConfigError("unterminated placeholder in prompt template");
    }
    out.append(tmpl.substr(pos, open - pos));
    const auto name = tmpl.substr(open + 1, close - open - 1);
    const auto value = lookup(name, params);
    if (!value) {
      throw ConfigError("missing value for prompt placeholder {" + std::string(name) + "}");
    }
    out.append(*value);
    pos = close + 1;
  }
  return out;
}

std::optional<TemplateId> select_template(PromptRole role, const TrialConfig& config) {
  const auto& v = config.variant;
  const bool fixed = v.fixed_distinguisher.has_value();
  switch (role) {
    case PromptRole::kActor:
      if (!v.actor_query_phase) return fixed ? TemplateId::kFdActor : TemplateId::kGttActor;
      if (config.controlled_query_budget) return TemplateId::kControlledSpecimenQuery;
      return fixed ? TemplateId::kFdSpecimenQuery : TemplateId::kGttqActor;
    case PromptRole::kActorMainPhase:
      if (!v.actor_query_phase) return fixed ? TemplateId::kFdActor : TemplateId::kGttActor;
      if (!config.controlled_query_budget && !fixed) return std::nullopt;
      return fixed ? TemplateId::kFdActor : TemplateId::kGttActor;
    case PromptRole::kDistinguisher:
      if (config.controlled_turn_budget) return TemplateId::kControlledTurnDistinguisher;
      return fixed ? TemplateId::kFdJudge : TemplateId::kDistinguisher;
    case PromptRole::kDistinguisherQuery:
      if (!v.distinguisher_query_phase) return std::nullopt;
      return TemplateId::kDistinguisherSpecimenQuery;
  }
  return std::nullopt;
}

std::string render_prompt(PromptRole role, const TrialConfig& config, const PromptParams& params,
                          const PromptTemplates& templates) {
  const auto id = select_template(role, config);
  if (!id) {
    throw ConfigError("no prompt for this role in protocol " + config.variant.family());
  }
  PromptParams filled = params;
  if (!filled.target_slug && !config.variant.target.empty()) filled.target_slug = config.variant.target;
  if (!filled.specimen_queries && config.controlled_query_budget) {
    filled.specimen_queries = config.controlled_query_budget;
  }
  if (!filled.distinguisher_turns && config.controlled_turn_budget) {
    filled.distinguisher_turns = config.controlled_turn_budget;
  }
  return render_template(templates.text(*id), filled);
}

}  // namespace gtt

#include "gtt/agents/factory.hpp"

#include <cstdlib>

#include "gtt/agents/human.hpp"
#include "gtt/common/errors.hpp"
#include "gtt/tabular/agent.hpp"

namespace gtt {

namespace {

using json = nlohmann::json;

constexpr std::string_view kDefaultBase = "https://openrouter.ai/api/v1";

AgentRole role_from_key(std::string_view s) {
  if (s == "actor") return AgentRole::kActor;
  if (s == "target") return AgentRole::kTarget;
  if (s == "distinguisher") return AgentRole::kDistinguisher;
  if (s == "specimen") return AgentRole::kSpecimen;
  throw ConfigError("unknown role in script: " + std::string(s));
}

}  // namespace

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::kRemote:
      return "remote";
    case BackendKind::kScripted:
      return "scripted";
    case BackendKind::kTabular:
      return "tabular";
    case BackendKind::kHumanRelay:
      return "human-relay";
  }
  return "?";
}

BackendKind backend_kind_from_string(std::string_view s) {
  if (s == "remote") return BackendKind::kRemote;
  if (s == "scripted") return BackendKind::kScripted;
  if (s == "tabular") return BackendKind::kTabular;
  if (s == "human-relay") return BackendKind::kHumanRelay;
  throw ConfigError("unknown backend kind: " + std::string(s));
}

void ModelSpec::validate() const {
  if (id.empty()) throw ConfigError("model spec without an id");
  switch (kind) {
    case BackendKind::kRemote:
      if (model.empty()) throw ConfigError("remote model '" + id + "' has no model slug");
      break;
    case BackendKind::kScripted: {
      bool any = !script.replies.empty();
      for (const auto& [role, s] : scripts) {
        if (s.replies.empty()) throw ConfigError("scripted model '" + id + "' has an empty script");
        any = true;
      }
      if (!any) throw ConfigError("scripted model '" + id + "' has no replies");
      break;
    }
    case BackendKind::kTabular:
      if (!table_file && !table) throw ConfigError("tabular model '" + id + "' has no table");
      break;
    case BackendKind::kHumanRelay:
      break;
  }
}

std::string ModelSpec::slug() const { return kind == BackendKind::kRemote ? model : id; }

void to_json(json& j, const ModelSpec& s) {
  j = {{"id", s.id}, {"kind", to_string(s.kind)}};
  switch (s.kind) {
    case BackendKind::kRemote:
      j["model"] = s.model;
      if (!s.display_name.empty()) j["display_name"] = s.display_name;
      if (s.base_url) j["base_url"] = *s.base_url;
      j["api_key_env"] = s.api_key_env;
      if (!s.sampling.empty()) j["sampling"] = s.sampling;
      break;
    case BackendKind::kScripted:
      if (!s.script.replies.empty()) j["script"] = s.script;
      if (!s.scripts.empty()) {
        json by_role = json::object();
        for (const auto& [role, script] : s.scripts) by_role[std::string(to_string(role))] = script;
        j["scripts"] = std::move(by_role);
      }
      break;
    case BackendKind::kTabular:
      if (s.table_file) j["table_file"] = s.table_file->string();
      if (s.table) j["table"] = *s.table;
      break;
    case BackendKind::kHumanRelay:
      break;
  }
}

void from_json(const json& j, ModelSpec& s) {
  s = {};
  s.id = j.at("id").get<std::string>();
  s.kind = backend_kind_from_string(j.value("kind", std::string("remote")));
  s.model = j.value("model", std::string{});
  s.display_name = j.value("display_name", std::string{});
  if (j.contains("base_url")) s.base_url = j.at("base_url").get<std::string>();
  s.api_key_env = j.value("api_key_env", std::string("GTT_API_KEY"));
  if (j.contains("sampling")) s.sampling = j.at("sampling");
  if (j.contains("script")) s.script = j.at("script").get<Script>();
  if (j.contains("scripts")) {
    for (const auto& [k, v] : j.at("scripts").items()) s.scripts[role_from_key(k)] = v.get<Script>();
  }
  if (j.contains("table_file")) s.table_file = j.at("table_file").get<std::string>();
  if (j.contains("table")) s.table = j.at("table");
}

std::optional<std::string> BackendContext::lookup(const std::string& name) const {
  if (env) return env(name);
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

std::shared_ptr<Agent> make_agent(const ModelSpec& spec, const BackendContext& ctx) {
  spec.validate();
  switch (spec.kind) {
    case BackendKind::kRemote: {
      RemoteConfig cfg;
      cfg.name = spec.id;
      cfg.model = spec.model;
      cfg.display_name = spec.display_name.empty() ? spec.model : spec.display_name;
      cfg.base_url = spec.base_url.value_or(ctx.lookup("GTT_API_BASE").value_or(std::string(kDefaultBase)));
      cfg.api_key = ctx.lookup(spec.api_key_env).value_or("");
      cfg.sampling = spec.sampling;
      cfg.retry = ctx.retry;
      cfg.debug_sink = ctx.debug_sink;
      auto transport = ctx.transport ? ctx.transport : std::make_shared<HttplibTransport>();
      return std::make_shared<RemoteAgent>(std::move(cfg), std::move(transport), ctx.limit, ctx.sleeper);
    }
    case BackendKind::kScripted:
      return std::make_shared<ScriptedAgent>(spec.id, spec.scripts, spec.script);
    case BackendKind::kTabular: {
      auto agent = std::make_shared<TabularAgent>();
      if (spec.table) {
        try {
          *agent = spec.table->get<TabularAgent>();
        } catch (const json::exception& e) {
          throw ConfigError("malformed inline table for '" + spec.id + "': " + e.what());
        }
      } else {
        const auto path = spec.table_file->is_absolute() ? *spec.table_file : ctx.base_dir / *spec.table_file;
        *agent = TabularAgent::from_file(path);
      }
      if (agent->name.empty()) agent->name = spec.id;
      return agent;
    }
    case BackendKind::kHumanRelay:
      return std::make_shared<HumanRelayAgent>(spec.id);
  }
  throw ConfigError("unhandled backend kind");
}

AgentRegistry::AgentRegistry(std::vector<ModelSpec> specs, BackendContext ctx) : ctx_(std::move(ctx)) {
  for (auto& s : specs) {
    s.validate();
    if (specs_.contains(s.id)) throw ConfigError("duplicate model id '" + s.id + "'");
    order_.push_back(s.id);
    specs_.emplace(s.id, std::move(s));
  }
}

bool AgentRegistry::contains(const std::string& id) const { return specs_.contains(id); }

const ModelSpec& AgentRegistry::spec(const std::string& id) const {
  const auto it = specs_.find(id);
  if (it == specs_.end()) throw ConfigError("unknown model '" + id + "'");
  return it->second;
}

std::shared_ptr<Agent> AgentRegistry::agent(const std::string& id) {
  const ModelSpec& s = spec(id);
  std::lock_guard lock(mu_);
  auto& slot = agents_[id];
  if (!slot) slot = make_agent(s, ctx_);
  return slot;
}

std::vector<std::string> AgentRegistry::ids() const { return order_; }

}  // namespace gtt

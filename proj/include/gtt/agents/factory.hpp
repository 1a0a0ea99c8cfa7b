#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gtt/agents/remote.hpp"
#include "gtt/agents/scripted.hpp"
#include "gtt/protocol/agent.hpp"

namespace gtt {

enum class BackendKind { kRemote, kScripted, kTabular, kHumanRelay };

std::string_view to_string(BackendKind k);
BackendKind backend_kind_from_string(std::string_view s);

/// How to build the agent for one model id.
struct ModelSpec {
  std::string id;
  BackendKind kind = BackendKind::kScripted;

  // remote
  std::string model;
  std::string display_name;
  std::optional<std::string> base_url;
  std::string api_key_env = "GTT_API_KEY";
  nlohmann::json sampling = nlohmann::json::object();

  // scripted
  std::map<AgentRole, Script> scripts;
  Script script;

  // tabular: a file, resolved against the spec's base directory, or inline
  std::optional<std::filesystem::path> table_file;
  std::optional<nlohmann::json> table;

  /// Throws ConfigError when the kind's required fields are missing.
  void validate() const;
  /// The name models are told to imitate: the remote slug, or the id.
  std::string slug() const;
};

void to_json(nlohmann::json& j, const ModelSpec& s);
void from_json(const nlohmann::json& j, ModelSpec& s);

/// Shared plumbing for every agent a factory builds.
struct BackendContext {
  std::shared_ptr<HttpTransport> transport;
  std::shared_ptr<InFlightLimit> limit;
  Sleeper sleeper = thread_sleeper();
  RetryPolicy retry;
  std::function<void(std::string_view)> debug_sink;
  std::filesystem::path base_dir = ".";
  /// Environment lookup; std::getenv when unset.
  std::function<std::optional<std::string>(const std::string&)> env;

  std::optional<std::string> lookup(const std::string& name) const;
};

std::shared_ptr<Agent> make_agent(const ModelSpec& spec, const BackendContext& ctx);

/// Model roster with one lazily built agent per id.
class AgentRegistry {
 public:
  AgentRegistry(std::vector<ModelSpec> specs, BackendContext ctx);

  bool contains(const std::string& id) const;
  const ModelSpec& spec(const std::string& id) const;
  /// Throws ConfigError("unknown model ...") for ids not in the roster.
  std::shared_ptr<Agent> agent(const std::string& id);
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, ModelSpec> specs_;
  std::vector<std::string> order_;
  BackendContext ctx_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Agent>> agents_;
};

}  // namespace gtt

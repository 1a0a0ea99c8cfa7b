#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "gtt/agents/factory.hpp"
#include "gtt/arena/leaderboard.hpp"
#include "gtt/arena/session.hpp"
#include "gtt/campaign/env.hpp"
#include "gtt/protocol/prompts.hpp"

namespace gtt {

struct ArenaConfig {
  std::shared_ptr<AgentRegistry> roster;
  std::size_t max_distinguisher_turns = 40;
  std::chrono::seconds ttl{1800};
  /// Append-only log of revealed sessions; the board is replayed from it.
  std::optional<std::filesystem::path> store;
  std::function<Timestamp()> now;
  /// Session ids and secrets; random_device when unset.
  std::optional<std::uint64_t> seed;
  const PromptTemplates* templates = nullptr;
  EnvBlock env;
};

struct CreateRequest {
  ArenaMode mode = ArenaMode::kHumanDistinguisher;
  std::string target;
  /// Imitator for human_distinguisher games; the first other roster model
  /// when unset.
  std::optional<std::string> actor;
  std::string handle = "anonymous";
  std::optional<std::size_t> max_distinguisher_turns;
};

CreateRequest create_request_from_json(const nlohmann::json& j);

/// Live games between a person and roster models. Every public method
/// returns the JSON body the HTTP layer sends; none of them reveal the
/// secret, the imitating model or agent routes before the reveal.
class ArenaService {
 public:
  explicit ArenaService(ArenaConfig config);
  ~ArenaService();

  nlohmann::json create_session(const CreateRequest& request);
  nlohmann::json get_session(const std::string& id);
  nlohmann::json post_message(const std::string& id, const std::string& text);
  nlohmann::json submit_verdict(const std::string& id, int bit);
  nlohmann::json leaderboard() const;
  nlohmann::json models() const;

  /// Marks idle sessions expired; returns how many changed.
  std::size_t expire_idle();

  /// Current board entries, for tests.
  std::vector<LeaderboardEntry> board_entries() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  void touch(Session& s);
  void check_expiry(Session& s);
  nlohmann::json view(const Session& s) const;
  void finish(Session& s);
  std::string agent_turn(Session& s);
  Timestamp now() const;

  ArenaConfig config_;
  const PromptTemplates& templates_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  mutable std::mutex board_mu_;
  Leaderboard board_;
};

}  // namespace gtt

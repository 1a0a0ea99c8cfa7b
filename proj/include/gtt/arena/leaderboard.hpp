#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gtt/arena/session.hpp"

namespace gtt {

/// What a revealed session contributes to the board.
struct ArenaOutcome {
  ArenaMode mode = ArenaMode::kHumanDistinguisher;
  std::string handle;
  std::string actor;
  std::string target;
  SecretIdentity secret = SecretIdentity::kTarget;
  /// Success of whoever judged; empty when the model never answered.
  std::optional<bool> success;
};

struct LeaderboardEntry {
  std::string subject;
  bool human = false;
  std::size_t games = 0;
  std::size_t successes = 0;
  std::size_t fooling_games = 0;
  std::size_t fooling_successes = 0;
  std::size_t distinguishing_games = 0;
  std::size_t distinguishing_successes = 0;

  std::optional<double> fooling() const;
  std::optional<double> distinguishing() const;
  /// Mean of the available fooling and distinguishing rates.
  double score() const;
  bool operator==(const LeaderboardEntry&) const = default;
};

class Leaderboard {
 public:
  void apply(const ArenaOutcome& outcome);
  /// Score descending, then subject ascending.
  std::vector<LeaderboardEntry> entries() const;
  const LeaderboardEntry* find(const std::string& subject) const;

  /// Replays an arena session log.
  static Leaderboard from_jsonl(const std::filesystem::path& path);

 private:
  LeaderboardEntry& entry(const std::string& subject, bool human);
  std::map<std::string, LeaderboardEntry> by_subject_;
};

/// Subject name for a human handle on the board.
std::string human_subject(const std::string& handle);

ArenaOutcome outcome_from_json(const nlohmann::json& line);

void to_json(nlohmann::json& j, const LeaderboardEntry& e);

}  // namespace gtt

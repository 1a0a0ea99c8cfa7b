#include "gtt/arena/leaderboard.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gtt/protocol/serialize.hpp"

namespace gtt {

std::string human_subject(const std::string& handle) { return "human:" + handle; }

std::optional<double> LeaderboardEntry::fooling() const {
  if (fooling_games == 0) return std::nullopt;
  return static_cast<double>(fooling_successes) / static_cast<double>(fooling_games);
}

std::optional<double> LeaderboardEntry::distinguishing() const {
  if (distinguishing_games == 0) return std::nullopt;
  return static_cast<double>(distinguishing_successes) / static_cast<double>(distinguishing_games);
}

double LeaderboardEntry::score() const {
  const auto f = fooling();
  const auto d = distinguishing();
  if (f && d) return 0.5 * *f + 0.5 * *d;
  if (f) return *f;
  if (d) return *d;
  return 0.0;
}

LeaderboardEntry& Leaderboard::entry(const std::string& subject, bool human) {
  auto& e = by_subject_[subject];
  e.subject = subject;
  e.human = human;
  return e;
}

void Leaderboard::apply(const ArenaOutcome& o) {
  if (!o.success) return;
  const bool judge_right = *o.success;
  const std::string human = human_subject(o.handle);
  if (o.mode == ArenaMode::kHumanDistinguisher) {
    auto& h = entry(human, true);
    ++h.distinguishing_games;
    h.distinguishing_successes += judge_right;
    if (o.secret == SecretIdentity::kImitator) {
      auto& a = entry(o.actor, false);
      ++a.fooling_games;
      a.fooling_successes += !judge_right;
    }
  } else {
    auto& h = entry(human, true);
    ++h.fooling_games;
    h.fooling_successes += !judge_right;
    auto& d = entry(o.target, false);
    ++d.distinguishing_games;
    d.distinguishing_successes += judge_right;
  }
  for (auto& [name, e] : by_subject_) {
    e.games = e.fooling_games + e.distinguishing_games;
    e.successes = e.fooling_successes + e.distinguishing_successes;
  }
}

std::vector<LeaderboardEntry> Leaderboard::entries() const {
  std::vector<LeaderboardEntry> out;
  for (const auto& [name, e] : by_subject_) out.push_back(e);
  std::stable_sort(out.begin(), out.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.score() != b.score()) return a.score() > b.score();
    return a.subject < b.subject;
  });
  return out;
}

const LeaderboardEntry* Leaderboard::find(const std::string& subject) const {
  const auto it = by_subject_.find(subject);
  return it == by_subject_.end() ? nullptr : &it->second;
}

ArenaOutcome outcome_from_json(const nlohmann::json& line) {
  const TrialRecord record = line.get<TrialRecord>();
  const auto& arena = line.at("arena");
  ArenaOutcome o;
  o.mode = arena_mode_from_string(arena.at("mode").get<std::string>());
  o.handle = arena.at("handle").get<std::string>();
  o.actor = arena.at("actor_model").get<std::string>();
  o.target = record.config.variant.target;
  o.secret = record.secret;
  o.success = record.success;
  return o;
}

Leaderboard Leaderboard::from_jsonl(const std::filesystem::path& path) {
  Leaderboard board;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    board.apply(outcome_from_json(nlohmann::json::parse(line)));
  }
  return board;
}

void to_json(nlohmann::json& j, const LeaderboardEntry& e) {
  auto opt = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = {{"subject", e.subject},
       {"human", e.human},
       {"games", e.games},
       {"successes", e.successes},
       {"fooling_games", e.fooling_games},
       {"fooling_successes", e.fooling_successes},
       {"distinguishing_games", e.distinguishing_games},
       {"distinguishing_successes", e.distinguishing_successes},
       {"fooling", opt(e.fooling())},
       {"distinguishing", opt(e.distinguishing())},
       {"score", e.score()}};
}

}  // namespace gtt

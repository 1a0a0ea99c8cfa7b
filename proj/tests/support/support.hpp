#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gtt/agents/factory.hpp"
#include "gtt/analytics/probes.hpp"
#include "gtt/analytics/relation.hpp"
#include "gtt/campaign/plan.hpp"
#include "gtt/protocol/agent.hpp"
#include "gtt/protocol/types.hpp"
#include "gtt/tabular/agent.hpp"
#include "gtt/theory/exact.hpp"

namespace gtt::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path data_dir();
std::string read_file(const std::filesystem::path& path);

/// Rows of a simple CSV file (no quoted fields) keyed by header name.
std::vector<std::map<std::string, std::string>> read_csv(const std::filesystem::path& path);

/// Scripted model that asks one question as distinguisher, then says "same"
/// when the answer matches its own first reply and "different" otherwise.
ModelSpec scripted_model(const std::string& id);

/// Plan over scripted models m0..m{n-1}.
CampaignPlan scripted_plan(std::size_t models, std::size_t trials, bool self_pairs = true);

/// Fixed list of replies; repeats the last one.
class ListAgent : public Agent {
 public:
  explicit ListAgent(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  AgentReply next_turn(const Conversation& conversation) override;

 private:
  std::vector<std::string> replies_;
};

/// Throws a transient BackendError on its first `failures` calls overall.
class FlakyAgent : public Agent {
 public:
  FlakyAgent(std::shared_ptr<Agent> inner, std::size_t failures) : inner_(std::move(inner)), remaining_(failures) {}
  AgentReply next_turn(const Conversation& conversation) override;
  std::size_t calls() const { return calls_; }

 private:
  std::shared_ptr<Agent> inner_;
  std::atomic<std::size_t> remaining_;
  std::atomic<std::size_t> calls_{0};
};

/// Counts calls and delegates.
class CountingAgent : public Agent {
 public:
  explicit CountingAgent(std::shared_ptr<Agent> inner) : inner_(std::move(inner)) {}
  AgentReply next_turn(const Conversation& conversation) override;
  std::size_t calls() const { return calls_; }

 private:
  std::shared_ptr<Agent> inner_;
  std::atomic<std::size_t> calls_{0};
};

/// Random game with alphabet <= 3 and at most two distinguisher turns.
/// Every fourth game has an actor query stage of one round.
GameTables random_oracle_game(std::mt19937_64& rng);

struct MonteCarlo {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double p_hat() const { return static_cast<double>(successes) / static_cast<double>(trials); }
};

/// Plays `trials` games through run_trial with tabular backends built from
/// `game`. Only the secret coin and the tables' randomness vary.
MonteCarlo simulate_game(const GameTables& game, std::size_t trials, std::uint64_t seed);

/// The two tabular agents simulate_game uses.
struct TabularPair {
  std::shared_ptr<TabularAgent> actor;
  std::shared_ptr<TabularAgent> target;
};
TabularPair tabular_agents(const GameTables& game);

/// Square matrix with entries uniform in [-0.5, 0.5], a share of them on a
/// small grid so that ties with epsilon occur, and `missing` of them empty.
DMatrix random_d_matrix(std::mt19937_64& rng, std::size_t n, double missing = 0.05);

/// Relation recomputed by plain loops and Warshall closures.
struct BruteRelation {
  Adjacency edges;
  Adjacency strict_edges;
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::vector<std::size_t>> sccs;
  std::size_t violations = 0;
};
BruteRelation brute_relation(const DMatrix& d, double epsilon);

/// Triple loop over distinct (a, b, c).
std::size_t brute_violations(const Adjacency& edges);

/// Empty string when `g` matches `b`, otherwise the first difference.
std::string compare_relation(const RelationGraph& g, const BruteRelation& b);

/// Every disagreement between the rules and tests/data/probes_fixture.json:
/// unit boundaries and labels, one line each. Empty on an exact match.
std::vector<std::string> probe_fixture_mismatches(const ProbeRules& rules);

}  // namespace gtt::testing

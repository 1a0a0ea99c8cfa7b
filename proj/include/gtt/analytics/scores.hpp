#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gtt/analytics/estimate.hpp"

namespace gtt {

/// Where D(A)'s self term comes from.
enum class SelfPool {
  /// The secret=target branch of A's self-pair cell.
  kSelfPairCell,
  /// Every secret=target trial judged by A, across all actors.
  kPooled,
};

std::string_view to_string(SelfPool p);
SelfPool self_pool_from_string(std::string_view s);

/// Exact or estimated branch probabilities over a universe.
struct BranchProbabilities {
  /// s_A: A outputs 1 when talking to itself.
  std::map<std::string, double> self;
  /// s_{B,A} keyed (actor A, target B): B outputs 0 when A imitates B.
  std::map<std::pair<std::string, std::string>, double> imit;
};

struct ScoreRow {
  std::string model;
  double fooling = 0.0;
  double distinguishing = 0.0;
  double turing = 0.0;
};

struct ScoreTable {
  std::size_t universe = 0;
  std::string self_pool;
  std::vector<ScoreRow> rows;
};

/// Throws EstimationError listing every missing probability.
ScoreTable turing_scores(const std::vector<std::string>& models, const BranchProbabilities& probs);
ScoreTable turing_scores(const CountTable& table, SelfPool pool = SelfPool::kSelfPairCell);

struct FdScoreRow {
  std::string distinguisher;
  std::string model;
  double fooling = 0.0;
  double resistance = 0.0;
  double turing = 0.0;
};

/// q[(X, Y)]: probability that D accepts X imitating Y. `models` is the
/// universe and includes D.
std::vector<FdScoreRow> fd_turing_scores(const std::string& distinguisher, const std::vector<std::string>& models,
                                         const std::map<std::pair<std::string, std::string>, double>& q);
std::vector<FdScoreRow> fd_turing_scores(const CountTable& table, const std::string& distinguisher);

/// Distinguishers that appear in fixed-distinguisher cells, sorted.
std::vector<std::string> fixed_distinguishers(const CountTable& table);

void to_json(nlohmann::json& j, const ScoreRow& r);
void to_json(nlohmann::json& j, const ScoreTable& t);
void to_json(nlohmann::json& j, const FdScoreRow& r);

}  // namespace gtt
